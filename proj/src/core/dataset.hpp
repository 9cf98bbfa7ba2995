#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "core/types.hpp"

namespace painfair {

// A record-level problem that caused an input row to be dropped. Structural
// problems (bad group, dangling reference, malformed file) throw instead.
struct IngestRejection {
  std::string file;
  size_t row = 0;  // 1-based data row number, header excluded
  std::string reason;
};

struct IngestOptions {
  // Records on deepfake-flagged images are kept but excluded from analysis
  // unless this is set.
  bool include_flagged = false;
};

// Immutable after construction; safe for concurrent read-only analysis.
class Dataset {
public:
  Dataset() = default;

  static Dataset ingest(const std::string& groups_csv_path,
                        const std::string& records_csv_path,
                        const std::string& landmarks_json_path,  // "" = none
                        const IngestOptions& options = {});

  // Validates the same invariants as file ingestion.
  static Dataset build(std::vector<CounterfactualGroup> groups,
                       std::vector<AssessmentRecord> records,
                       std::map<std::string, LandmarkSet> landmarks,
                       const IngestOptions& options = {});

  const std::vector<CounterfactualGroup>& groups() const { return groups_; }
  const std::vector<AssessmentRecord>& records() const { return records_; }
  const std::map<std::string, LandmarkSet>& landmarks() const { return landmarks_; }
  const std::vector<IngestRejection>& rejections() const { return rejections_; }
  bool include_flagged() const { return options_.include_flagged; }

  bool has_image(const std::string& image_id) const;
  const ImageMeta& image(const std::string& image_id) const;
  const CounterfactualGroup& group_of(const std::string& image_id) const;
  const CounterfactualGroup& group_by_subject(const std::string& subject_id) const;

  // Indices into records() for one image (empty vector if none).
  const std::vector<size_t>& records_for(const std::string& image_id) const;

  // Exclusion policy: a record is excluded when its image is deepfake-flagged
  // and include_flagged is off.
  bool record_included(size_t record_index) const;
  bool group_included(const CounterfactualGroup& group) const;
  std::vector<size_t> analysis_records() const;

  // Writes groups.csv, records.csv and (when any landmarks exist)
  // landmarks.json into `dir`. Output is deterministic: stored order for
  // groups/records, image-id order for landmarks.
  std::vector<std::string> export_files(const std::string& dir) const;

private:
  void index_and_validate(const std::string& groups_origin, const std::string& records_origin);

  std::vector<CounterfactualGroup> groups_;
  std::vector<AssessmentRecord> records_;
  std::map<std::string, LandmarkSet> landmarks_;
  std::vector<IngestRejection> rejections_;
  IngestOptions options_;

  std::unordered_map<std::string, size_t> group_index_by_image_;
  std::unordered_map<std::string, size_t> group_index_by_subject_;
  std::unordered_map<std::string, std::vector<size_t>> records_by_image_;
};

// True iff the age band flipped Young<->Senior between an original and its
// age-manipulated counterpart. `manipulated` must be the A or SA variant of
// the same subject.
bool check_age_band(const ImageMeta& original, const ImageMeta& manipulated);

}  // namespace painfair
