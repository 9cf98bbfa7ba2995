#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/types.hpp"

namespace painfair {

enum class Condition : int { Original = 0, Average = 1, Auto = 2, AverageAuto = 3 };

const char* to_string(Condition c);
std::optional<Condition> parse_condition(const std::string& s);

// Sensitive attributes enter the feature vector only for the autocorrection
// conditions.
bool condition_uses_sensitive(Condition c);

// One PSPI label per (subject, variant).
class LabelTable {
public:
  void set(const std::string& subject_id, VariantTag tag, double label);
  double get(const std::string& subject_id, VariantTag tag) const;  // throws if missing
  bool has(const std::string& subject_id, VariantTag tag) const;
  size_t size() const { return labels_.size(); }
  const std::map<std::pair<std::string, int>, double>& entries() const { return labels_; }

private:
  std::map<std::pair<std::string, int>, double> labels_;
};

// Original/Auto return the table unchanged. Average/AverageAuto replace each
// race-counterfactual pair's labels with their mean: label(I) = label(S) =
// (PI+PS)/2 and label(A) = label(SA) = (PA+PSA)/2, per subject.
LabelTable apply_condition(const LabelTable& labels, Condition condition);

// Assessor pools. To keep the desk-scale regressor honest, the label for an
// image comes from a different set of assessors than its input features:
// each image's records are ordered by a fixed hash and alternate
// feature/label/feature/... so both pools are non-empty whenever an image
// has two or more records.
enum class AssessorPool { Feature = 0, Label = 1 };

std::vector<size_t> pool_records(const Dataset& dataset, const std::string& image_id,
                                 AssessorPool pool);

struct LabelSource {
  // When set, labels are this assessor's scores (the designated expert);
  // otherwise the mean over the label pool.
  std::string expert_assessor;
};

LabelTable build_label_table(const Dataset& dataset,
                             const std::vector<std::string>& subject_ids,
                             const LabelSource& source = {});

struct FeatureVector {
  std::array<double, 6> au_features{};  // mean AU intensities, feature pool
  // One-hot pairs in fixed order: race (White, Black), gender (Male, Female),
  // age band (Young, Senior).
  std::optional<std::array<double, 6>> sensitive;

  std::vector<double> flatten() const;
};

FeatureVector featurize(const ImageMeta& image, const Dataset& dataset, Condition condition);

struct TrainOptions {
  int epochs = 2000;
  double learning_rate = 0.01;
  double l2 = 0.0;
  uint64_t seed = 0;
  double grad_tolerance = 1e-10;
};

struct TrainingMeta {
  uint64_t seed = 0;
  int epochs_requested = 0;
  int epochs_run = 0;
  double learning_rate = 0.0;
  double l2 = 0.0;
  double final_loss = 0.0;
  double grad_norm = 0.0;
  bool converged = false;  // gradient norm under tolerance (vs budget exhausted)
};

// Linear pain regressor trained with full-batch gradient descent on MSE.
struct PredictorModel {
  std::array<double, 6> au_weights{};
  std::optional<std::array<double, 6>> sensitive_weights;
  double intercept = 0.0;
  TrainingMeta meta;

  double predict(const FeatureVector& features) const;
};

// Loss and gradient over parameters laid out as [weights..., intercept].
// The L2 penalty applies to the weights only. Exposed for the
// finite-difference oracle.
double mse_loss(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                const std::vector<double>& params, double l2);
std::vector<double> mse_gradient(const std::vector<std::vector<double>>& x,
                                 const std::vector<double>& y,
                                 const std::vector<double>& params, double l2);

// Initialization is zero weights with intercept = mean label; examples are
// canonically sorted first so training is invariant to input order.
PredictorModel train(const std::vector<FeatureVector>& features,
                     const std::vector<double>& labels, const TrainOptions& options);

struct SubjectSplit {
  std::vector<std::string> train_subjects;
  std::vector<std::string> test_subjects;
};

// Subject-level holdout: all four variants of a subject land on the same
// side. Deterministic given seed; test size = round(fraction * n_subjects).
SubjectSplit split_subjects(const Dataset& dataset, double test_fraction, uint64_t seed);

struct FairnessMetrics {
  double mse = 0.0;
  double rmse = 0.0;
  double if_raw = 0.0;  // PSPI points
  double if_pct = 0.0;  // 100 * if_raw / if_normalizer
};

// Individual fairness per test subject: |pred(I) - pred(S)| + |pred(A) -
// pred(SA)|, averaged over subjects.
FairnessMetrics evaluate(const PredictorModel& model, const Dataset& dataset,
                         const std::vector<std::string>& test_subjects,
                         const LabelTable& test_labels, Condition condition,
                         double if_normalizer = 16.0);

struct CorrectOptions {
  TrainOptions train;
  double test_fraction = 0.1;
  double if_normalizer = 16.0;
  LabelSource test_label_source;
};

struct FoldResult {
  int fold = 0;
  FairnessMetrics metrics;
  double train_mse = 0.0;
  TrainingMeta training;
};

struct CvResult {
  Condition condition = Condition::Original;
  std::vector<FoldResult> folds;
  FairnessMetrics mean_metrics;
  FairnessMetrics sd_metrics;
  double mean_train_mse = 0.0;
};

// k independent subject-level splits at test_fraction (fold seeds derived
// from the root seed), each trained and evaluated under `condition`.
// Label averaging applies to training labels only; test labels stay fixed
// across conditions.
CvResult cross_validate(const Dataset& dataset, Condition condition, int k, uint64_t seed,
                        const CorrectOptions& options = {});

// (before - after) / after, in percent. Requires after > 0.
double relative_improvement(double before, double after);

}  // namespace painfair
