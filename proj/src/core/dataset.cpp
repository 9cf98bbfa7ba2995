#include "core/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "core/csv.hpp"
#include "core/error.hpp"

namespace painfair {

namespace {

const std::vector<std::string> kGroupsHeader = {
    "subject_id", "image_id", "variant",          "race",
    "age_band",   "gender",   "deepfake_flagged", "verified_same_person"};
const std::vector<std::string> kRecordsHeader = {"image_id", "assessor_id", "platform", "au4",
                                                 "au6",      "au7",         "au9",      "au10",
                                                 "au43"};

void require_header(const CsvTable& table, const std::vector<std::string>& expected,
                    const std::string& origin) {
  if (table.header != expected) {
    std::string want;
    for (size_t i = 0; i < expected.size(); ++i) want += (i ? "," : "") + expected[i];
    throw SchemaError(origin + ": bad header, expected " + want);
  }
}

bool parse_bool01(const std::string& s, bool& out) {
  if (s == "0") { out = false; return true; }
  if (s == "1") { out = true; return true; }
  return false;
}

bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

Dataset Dataset::ingest(const std::string& groups_csv_path, const std::string& records_csv_path,
                        const std::string& landmarks_json_path, const IngestOptions& options) {
  Dataset ds;
  ds.options_ = options;

  // groups.csv: structural problems here are fatal.
  CsvTable gtab = read_csv_file(groups_csv_path);
  require_header(gtab, kGroupsHeader, groups_csv_path);
  std::map<std::string, size_t> group_slot;  // subject -> index, insertion order kept below
  std::vector<std::array<bool, 4>> seen_variant;
  for (size_t r = 0; r < gtab.rows.size(); ++r) {
    const auto& row = gtab.rows[r];
    std::string where = groups_csv_path + " row " + std::to_string(r + 1);
    ImageMeta meta;
    meta.subject_id = row[0];
    meta.image_id = row[1];
    if (meta.subject_id.empty() || meta.image_id.empty())
      throw SchemaError(where + ": empty subject_id or image_id");
    auto variant = parse_variant(row[2]);
    auto race = parse_race(row[3]);
    auto age = parse_age_band(row[4]);
    auto gender = parse_gender(row[5]);
    if (!variant) throw SchemaError(where + ": bad variant '" + row[2] + "'");
    if (!race) throw SchemaError(where + ": bad race '" + row[3] + "'");
    if (!age) throw SchemaError(where + ": bad age_band '" + row[4] + "'");
    if (!gender) throw SchemaError(where + ": bad gender '" + row[5] + "'");
    if (!parse_bool01(row[6], meta.deepfake_flagged))
      throw SchemaError(where + ": bad deepfake_flagged '" + row[6] + "' (expected 0/1)");
    if (!parse_bool01(row[7], meta.verified_same_person))
      throw SchemaError(where + ": bad verified_same_person '" + row[7] + "' (expected 0/1)");
    meta.variant = *variant;
    meta.race = *race;
    meta.age_band = *age;
    meta.gender = *gender;

    auto it = group_slot.find(meta.subject_id);
    size_t gi;
    if (it == group_slot.end()) {
      gi = ds.groups_.size();
      group_slot.emplace(meta.subject_id, gi);
      ds.groups_.push_back(CounterfactualGroup{meta.subject_id, {}});
      seen_variant.push_back({false, false, false, false});
    } else {
      gi = it->second;
    }
    int vi = static_cast<int>(meta.variant);
    if (seen_variant[gi][vi])
      throw InvariantError("group " + meta.subject_id + ": duplicate variant " +
                           to_string(meta.variant));
    seen_variant[gi][vi] = true;
    ds.groups_[gi].variants[vi] = meta;
  }
  for (size_t gi = 0; gi < ds.groups_.size(); ++gi) {
    for (int vi = 0; vi < 4; ++vi) {
      if (!seen_variant[gi][vi])
        throw InvariantError("incomplete counterfactual group " + ds.groups_[gi].subject_id +
                             ": missing variant " + to_string(static_cast<VariantTag>(vi)));
    }
  }

  // records.csv: row-level problems reject the row (itemized), structural
  // problems (unknown image) are fatal.
  CsvTable rtab = read_csv_file(records_csv_path);
  require_header(rtab, kRecordsHeader, records_csv_path);
  std::set<std::pair<std::string, std::string>> seen_pair;
  std::unordered_map<std::string, bool> known_image;
  for (const auto& g : ds.groups_)
    for (const auto& m : g.variants) known_image.emplace(m.image_id, true);
  for (size_t r = 0; r < rtab.rows.size(); ++r) {
    const auto& row = rtab.rows[r];
    AssessmentRecord rec;
    rec.image_id = row[0];
    rec.assessor_id = row[1];
    rec.platform = parse_platform(row[2]);
    if (!known_image.count(rec.image_id))
      throw InvariantError(records_csv_path + " row " + std::to_string(r + 1) +
                           ": dangling image_id '" + rec.image_id + "'");
    if (rec.assessor_id.empty()) {
      ds.rejections_.push_back({records_csv_path, r + 1, "empty assessor_id"});
      continue;
    }
    std::array<int, 6> au{};
    bool au_ok = true;
    std::string au_reason;
    for (int k = 0; k < 6; ++k) {
      const std::string& cell = row[3 + k];
      if (cell.empty()) {
        au_ok = false;
        au_reason = std::string("missing ") + kAuNames[k];
        break;
      }
      if (!parse_int(cell, au[k])) {
        au_ok = false;
        au_reason = std::string("unparseable ") + kAuNames[k] + " '" + cell + "'";
        break;
      }
    }
    if (au_ok) {
      rec.au = AuVector::from_array(au);
      if (!rec.au.valid()) {
        au_ok = false;
        au_reason = "AU intensity out of range";
      }
    }
    if (!au_ok) {
      ds.rejections_.push_back({records_csv_path, r + 1, au_reason});
      continue;
    }
    if (!seen_pair.emplace(rec.image_id, rec.assessor_id).second) {
      ds.rejections_.push_back({records_csv_path, r + 1,
                                "duplicate assessment (" + rec.image_id + ", " +
                                    rec.assessor_id + ")"});
      continue;
    }
    ds.records_.push_back(std::move(rec));
  }

  if (!landmarks_json_path.empty()) {
    std::ifstream in(landmarks_json_path, std::ios::binary);
    if (!in) throw IoError("cannot open " + landmarks_json_path);
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(landmarks_json_path + ": " + e.what());
    }
    if (!doc.is_array()) throw SchemaError(landmarks_json_path + ": expected a top-level array");
    for (const auto& entry : doc) {
      if (!entry.is_object() || !entry.contains("image_id") || !entry.contains("points"))
        throw SchemaError(landmarks_json_path + ": entries need image_id and points");
      std::string image_id = entry.at("image_id").get<std::string>();
      if (!known_image.count(image_id))
        throw InvariantError(landmarks_json_path + ": landmarks for unknown image '" + image_id +
                             "'");
      LandmarkSet set;
      for (const auto& p : entry.at("points")) {
        if (!p.is_array() || p.size() != 2)
          throw SchemaError(landmarks_json_path + ": point must be [x,y] (image " + image_id +
                            ")");
        double x = p[0].get<double>();
        double y = p[1].get<double>();
        if (!std::isfinite(x) || !std::isfinite(y) || x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0)
          throw SchemaError(landmarks_json_path + ": coordinates must be finite and in [0,1] " +
                            "(image " + image_id + ")");
        set.points.push_back({x, y});
      }
      if (set.points.empty())
        throw SchemaError(landmarks_json_path + ": empty landmark set for image " + image_id);
      if (!ds.landmarks_.emplace(image_id, std::move(set)).second)
        throw SchemaError(landmarks_json_path + ": duplicate landmarks for image " + image_id);
    }
  }

  ds.index_and_validate(groups_csv_path, records_csv_path);
  return ds;
}

Dataset Dataset::build(std::vector<CounterfactualGroup> groups,
                       std::vector<AssessmentRecord> records,
                       std::map<std::string, LandmarkSet> landmarks,
                       const IngestOptions& options) {
  Dataset ds;
  ds.options_ = options;
  ds.groups_ = std::move(groups);
  ds.records_ = std::move(records);
  ds.landmarks_ = std::move(landmarks);
  ds.index_and_validate("<memory>", "<memory>");
  return ds;
}

void Dataset::index_and_validate(const std::string& groups_origin,
                                 const std::string& records_origin) {
  group_index_by_image_.clear();
  group_index_by_subject_.clear();
  records_by_image_.clear();

  for (size_t gi = 0; gi < groups_.size(); ++gi) {
    const CounterfactualGroup& g = groups_[gi];
    if (g.subject_id.empty())
      throw InvariantError(groups_origin + ": group with empty subject_id");
    if (!group_index_by_subject_.emplace(g.subject_id, gi).second)
      throw InvariantError("duplicate subject_id " + g.subject_id);
    const ImageMeta& original = g.variant(VariantTag::I);
    for (VariantTag tag : kAllVariants) {
      const ImageMeta& m = g.variant(tag);
      if (m.variant != tag)
        throw InvariantError("group " + g.subject_id + ": variant slot/tag mismatch");
      if (m.subject_id != g.subject_id)
        throw InvariantError("group " + g.subject_id + ": image " + m.image_id +
                             " carries subject_id " + m.subject_id);
      if (m.image_id.empty())
        throw InvariantError("group " + g.subject_id + ": empty image_id");
      if (!group_index_by_image_.emplace(m.image_id, gi).second)
        throw InvariantError("duplicate image_id " + m.image_id);
      if (m.gender != original.gender)
        throw InvariantError("group " + g.subject_id + ": gender differs on variant " +
                             to_string(tag));
      bool race_flipped = m.race != original.race;
      bool age_flipped = m.age_band != original.age_band;
      bool want_race = tag == VariantTag::S || tag == VariantTag::SA;
      bool want_age = tag == VariantTag::A || tag == VariantTag::SA;
      if (race_flipped != want_race)
        throw InvariantError("group " + g.subject_id + ": variant " + to_string(tag) +
                             (want_race ? " must flip race" : " must keep race"));
      if (age_flipped != want_age)
        throw InvariantError("group " + g.subject_id + ": variant " + to_string(tag) +
                             (want_age ? " must flip age_band" : " must keep age_band"));
    }
  }

  std::set<std::pair<std::string, std::string>> seen_pair;
  for (size_t ri = 0; ri < records_.size(); ++ri) {
    const AssessmentRecord& rec = records_[ri];
    if (!group_index_by_image_.count(rec.image_id))
      throw InvariantError(records_origin + ": dangling image_id '" + rec.image_id + "'");
    if (!rec.au.valid())
      throw InvariantError(records_origin + ": AU intensity out of range for image " +
                           rec.image_id + ", assessor " + rec.assessor_id);
    if (!seen_pair.emplace(rec.image_id, rec.assessor_id).second)
      throw InvariantError(records_origin + ": duplicate assessment (" + rec.image_id + ", " +
                           rec.assessor_id + ")");
    records_by_image_[rec.image_id].push_back(ri);
  }

  for (const auto& [image_id, set] : landmarks_) {
    if (!group_index_by_image_.count(image_id))
      throw InvariantError("landmarks for unknown image '" + image_id + "'");
    if (set.points.empty()) throw InvariantError("empty landmark set for image " + image_id);
    for (const auto& p : set.points)
      if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
        throw InvariantError("non-finite landmark for image " + image_id);
  }
}

bool Dataset::has_image(const std::string& image_id) const {
  return group_index_by_image_.count(image_id) != 0;
}

const ImageMeta& Dataset::image(const std::string& image_id) const {
  const CounterfactualGroup& g = group_of(image_id);
  for (VariantTag tag : kAllVariants)
    if (g.variant(tag).image_id == image_id) return g.variant(tag);
  throw InvariantError("image index corrupt for " + image_id);
}

const CounterfactualGroup& Dataset::group_of(const std::string& image_id) const {
  auto it = group_index_by_image_.find(image_id);
  if (it == group_index_by_image_.end()) throw InvariantError("unknown image_id " + image_id);
  return groups_[it->second];
}

const CounterfactualGroup& Dataset::group_by_subject(const std::string& subject_id) const {
  auto it = group_index_by_subject_.find(subject_id);
  if (it == group_index_by_subject_.end())
    throw InvariantError("unknown subject_id " + subject_id);
  return groups_[it->second];
}

const std::vector<size_t>& Dataset::records_for(const std::string& image_id) const {
  static const std::vector<size_t> kEmpty;
  auto it = records_by_image_.find(image_id);
  return it == records_by_image_.end() ? kEmpty : it->second;
}

bool Dataset::record_included(size_t record_index) const {
  const AssessmentRecord& rec = records_.at(record_index);
  if (options_.include_flagged) return true;
  return !image(rec.image_id).deepfake_flagged;
}

bool Dataset::group_included(const CounterfactualGroup& group) const {
  if (options_.include_flagged) return true;
  for (VariantTag tag : kAllVariants)
    if (group.variant(tag).deepfake_flagged) return false;
  return true;
}

std::vector<size_t> Dataset::analysis_records() const {
  std::vector<size_t> out;
  out.reserve(records_.size());
  for (size_t i = 0; i < records_.size(); ++i)
    if (record_included(i)) out.push_back(i);
  return out;
}

std::vector<std::string> Dataset::export_files(const std::string& dir) const {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);

  std::vector<std::string> written;
  {
    std::string path = (fs::path(dir) / "groups.csv").string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << csv_line(kGroupsHeader);
    for (const auto& g : groups_) {
      for (VariantTag tag : kAllVariants) {
        const ImageMeta& m = g.variant(tag);
        out << csv_line({m.subject_id, m.image_id, to_string(m.variant), to_string(m.race),
                         to_string(m.age_band), to_string(m.gender),
                         m.deepfake_flagged ? "1" : "0", m.verified_same_person ? "1" : "0"});
      }
    }
    written.push_back(path);
  }
  {
    std::string path = (fs::path(dir) / "records.csv").string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << csv_line(kRecordsHeader);
    for (const auto& r : records_) {
      auto a = r.au.as_array();
      out << csv_line({r.image_id, r.assessor_id, to_string(r.platform), std::to_string(a[0]),
                       std::to_string(a[1]), std::to_string(a[2]), std::to_string(a[3]),
                       std::to_string(a[4]), std::to_string(a[5])});
    }
    written.push_back(path);
  }
  if (!landmarks_.empty()) {
    std::string path = (fs::path(dir) / "landmarks.json").string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    nlohmann::ordered_json doc = nlohmann::ordered_json::array();
    for (const auto& [image_id, set] : landmarks_) {
      nlohmann::ordered_json entry;
      entry["image_id"] = image_id;
      nlohmann::ordered_json pts = nlohmann::ordered_json::array();
      for (const auto& p : set.points) pts.push_back({p[0], p[1]});
      entry["points"] = std::move(pts);
      doc.push_back(std::move(entry));
    }
    out << doc.dump(1) << "\n";
    written.push_back(path);
  }
  return written;
}

bool check_age_band(const ImageMeta& original, const ImageMeta& manipulated) {
  if (original.subject_id != manipulated.subject_id)
    throw ArgumentError("age-band check requires images from the same group (got subjects " +
                        original.subject_id + " and " + manipulated.subject_id + ")");
  if (manipulated.variant != VariantTag::A && manipulated.variant != VariantTag::SA)
    throw ArgumentError("age-band check requires an age-manipulated variant, got " +
                        std::string(to_string(manipulated.variant)));
  return manipulated.age_band != original.age_band;
}

}  // namespace painfair
