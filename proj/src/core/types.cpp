#include "core/types.hpp"

#include "core/error.hpp"

namespace painfair {

const char* error_category_name(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Argument: return "argument";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::Schema: return "schema";
    case ErrorCategory::Invariant: return "invariant";
    case ErrorCategory::Numeric: return "numeric";
    case ErrorCategory::State: return "state";
  }
  return "unknown";
}

const char* to_string(VariantTag v) {
  switch (v) {
    case VariantTag::I: return "I";
    case VariantTag::S: return "S";
    case VariantTag::A: return "A";
    case VariantTag::SA: return "SA";
  }
  return "?";
}

const char* to_string(Race r) { return r == Race::Black ? "Black" : "White"; }
const char* to_string(AgeBand a) { return a == AgeBand::Young ? "Young" : "Senior"; }
const char* to_string(Gender g) { return g == Gender::Female ? "Female" : "Male"; }

const char* to_string(Platform p) {
  switch (p) {
    case Platform::A: return "A";
    case Platform::B: return "B";
    case Platform::Other: return "Other";
  }
  return "?";
}

std::optional<VariantTag> parse_variant(const std::string& s) {
  if (s == "I") return VariantTag::I;
  if (s == "S") return VariantTag::S;
  if (s == "A") return VariantTag::A;
  if (s == "SA") return VariantTag::SA;
  return std::nullopt;
}

std::optional<Race> parse_race(const std::string& s) {
  if (s == "Black") return Race::Black;
  if (s == "White") return Race::White;
  return std::nullopt;
}

std::optional<AgeBand> parse_age_band(const std::string& s) {
  if (s == "Young") return AgeBand::Young;
  if (s == "Senior") return AgeBand::Senior;
  return std::nullopt;
}

std::optional<Gender> parse_gender(const std::string& s) {
  if (s == "Female") return Gender::Female;
  if (s == "Male") return Gender::Male;
  return std::nullopt;
}

Platform parse_platform(const std::string& s) {
  if (s == "A") return Platform::A;
  if (s == "B") return Platform::B;
  return Platform::Other;
}

Race flip(Race r) { return r == Race::Black ? Race::White : Race::Black; }
AgeBand flip(AgeBand a) { return a == AgeBand::Young ? AgeBand::Senior : AgeBand::Young; }

}  // namespace painfair
