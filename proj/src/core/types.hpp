#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace painfair {

// The four variants of a counterfactual group: original, skin-tone flipped,
// age flipped, and both flipped.
enum class VariantTag : int { I = 0, S = 1, A = 2, SA = 3 };

constexpr std::array<VariantTag, 4> kAllVariants = {VariantTag::I, VariantTag::S,
                                                    VariantTag::A, VariantTag::SA};

enum class Race : int { Black = 0, White = 1 };
enum class AgeBand : int { Young = 0, Senior = 1 };
enum class Gender : int { Female = 0, Male = 1 };

// Open enum: A and B are the two named study platforms, anything else maps to Other.
enum class Platform : int { A = 0, B = 1, Other = 2 };

const char* to_string(VariantTag v);
const char* to_string(Race r);
const char* to_string(AgeBand a);
const char* to_string(Gender g);
const char* to_string(Platform p);

std::optional<VariantTag> parse_variant(const std::string& s);
std::optional<Race> parse_race(const std::string& s);
std::optional<AgeBand> parse_age_band(const std::string& s);
std::optional<Gender> parse_gender(const std::string& s);
Platform parse_platform(const std::string& s);  // never fails, unknown -> Other

Race flip(Race r);
AgeBand flip(AgeBand a);

// Six Action-Unit intensities for one assessment. AU4..AU10 are 0..5, AU43 is 0 or 1.
struct AuVector {
  int au4 = 0;
  int au6 = 0;
  int au7 = 0;
  int au9 = 0;
  int au10 = 0;
  int au43 = 0;

  bool valid() const {
    auto in5 = [](int v) { return v >= 0 && v <= 5; };
    return in5(au4) && in5(au6) && in5(au7) && in5(au9) && in5(au10) &&
           (au43 == 0 || au43 == 1);
  }
  std::array<int, 6> as_array() const { return {au4, au6, au7, au9, au10, au43}; }
  static AuVector from_array(const std::array<int, 6>& a) {
    return AuVector{a[0], a[1], a[2], a[3], a[4], a[5]};
  }

  bool operator==(const AuVector&) const = default;
};

constexpr std::array<const char*, 6> kAuNames = {"AU4", "AU6", "AU7", "AU9", "AU10", "AU43"};

// One image variant and the perceived attributes an assessor sees.
// deepfake_flagged / verified_same_person are verdicts of external models,
// ingested as plain data fields.
struct ImageMeta {
  std::string image_id;
  std::string subject_id;
  VariantTag variant = VariantTag::I;
  Race race = Race::Black;
  AgeBand age_band = AgeBand::Young;
  Gender gender = Gender::Female;
  bool deepfake_flagged = false;
  bool verified_same_person = true;

  bool operator==(const ImageMeta&) const = default;
};

struct AssessmentRecord {
  std::string image_id;
  std::string assessor_id;
  Platform platform = Platform::Other;
  AuVector au;

  bool operator==(const AssessmentRecord&) const = default;
};

// Ordered facial landmark coordinates, normalized to [0,1].
struct LandmarkSet {
  std::vector<std::array<double, 2>> points;

  bool operator==(const LandmarkSet&) const = default;
};

// The four variants of one subject; the unit of splitting and pairing.
struct CounterfactualGroup {
  std::string subject_id;
  std::array<ImageMeta, 4> variants;  // indexed by VariantTag

  const ImageMeta& variant(VariantTag tag) const { return variants[static_cast<int>(tag)]; }
  ImageMeta& variant(VariantTag tag) { return variants[static_cast<int>(tag)]; }

  bool operator==(const CounterfactualGroup&) const = default;
};

}  // namespace painfair
