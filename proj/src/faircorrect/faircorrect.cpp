#include "faircorrect/faircorrect.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"
#include "core/rng.hpp"
#include "pspi/pspi.hpp"
#include "stats/stats.hpp"

namespace painfair {

const char* to_string(Condition c) {
  switch (c) {
    case Condition::Original: return "original";
    case Condition::Average: return "average";
    case Condition::Auto: return "auto";
    case Condition::AverageAuto: return "average_auto";
  }
  return "?";
}

std::optional<Condition> parse_condition(const std::string& s) {
  if (s == "original") return Condition::Original;
  if (s == "average") return Condition::Average;
  if (s == "auto") return Condition::Auto;
  if (s == "average_auto" || s == "average+auto") return Condition::AverageAuto;
  return std::nullopt;
}

bool condition_uses_sensitive(Condition c) {
  return c == Condition::Auto || c == Condition::AverageAuto;
}

void LabelTable::set(const std::string& subject_id, VariantTag tag, double label) {
  labels_[{subject_id, static_cast<int>(tag)}] = label;
}

double LabelTable::get(const std::string& subject_id, VariantTag tag) const {
  auto it = labels_.find({subject_id, static_cast<int>(tag)});
  if (it == labels_.end())
    throw InvariantError("missing label for subject " + subject_id + " variant " +
                         to_string(tag));
  return it->second;
}

bool LabelTable::has(const std::string& subject_id, VariantTag tag) const {
  return labels_.count({subject_id, static_cast<int>(tag)}) != 0;
}

LabelTable apply_condition(const LabelTable& labels, Condition condition) {
  if (condition == Condition::Original || condition == Condition::Auto) return labels;
  LabelTable out;
  std::map<std::string, bool> done;
  for (const auto& [key, value] : labels.entries()) {
    (void)value;
    const std::string& subject = key.first;
    if (done.count(subject)) continue;
    done[subject] = true;
    double pi = labels.get(subject, VariantTag::I);
    double ps = labels.get(subject, VariantTag::S);
    double pa = labels.get(subject, VariantTag::A);
    double psa = labels.get(subject, VariantTag::SA);
    double avg_is = (pi + ps) / 2.0;
    double avg_asa = (pa + psa) / 2.0;
    out.set(subject, VariantTag::I, avg_is);
    out.set(subject, VariantTag::S, avg_is);
    out.set(subject, VariantTag::A, avg_asa);
    out.set(subject, VariantTag::SA, avg_asa);
  }
  return out;
}

namespace {

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace

std::vector<size_t> pool_records(const Dataset& dataset, const std::string& image_id,
                                 AssessorPool pool) {
  std::vector<size_t> included;
  for (size_t idx : dataset.records_for(image_id))
    if (dataset.record_included(idx)) included.push_back(idx);
  std::sort(included.begin(), included.end(), [&](size_t lhs, size_t rhs) {
    const auto& a = dataset.records()[lhs];
    const auto& b = dataset.records()[rhs];
    uint64_t ha = fnv1a64(image_id + "|" + a.assessor_id);
    uint64_t hb = fnv1a64(image_id + "|" + b.assessor_id);
    if (ha != hb) return ha < hb;
    return a.assessor_id < b.assessor_id;
  });
  std::vector<size_t> out;
  for (size_t i = static_cast<size_t>(pool); i < included.size(); i += 2)
    out.push_back(included[i]);
  return out;
}

LabelTable build_label_table(const Dataset& dataset,
                             const std::vector<std::string>& subject_ids,
                             const LabelSource& source) {
  LabelTable table;
  for (const auto& subject_id : subject_ids) {
    const CounterfactualGroup& group = dataset.group_by_subject(subject_id);
    for (VariantTag tag : kAllVariants) {
      const std::string& image_id = group.variant(tag).image_id;
      double sum = 0.0;
      int n = 0;
      if (!source.expert_assessor.empty()) {
        for (size_t idx : dataset.records_for(image_id)) {
          const AssessmentRecord& rec = dataset.records()[idx];
          if (rec.assessor_id != source.expert_assessor) continue;
          sum += pspi_score(rec.au);
          ++n;
        }
        if (n == 0)
          throw InvariantError("no assessment by expert '" + source.expert_assessor +
                               "' for image " + image_id);
      } else {
        for (size_t idx : pool_records(dataset, image_id, AssessorPool::Label)) {
          sum += pspi_score(dataset.records()[idx].au);
          ++n;
        }
        if (n == 0)
          throw InvariantError("no label-pool records for image " + image_id +
                               " (needs at least two assessments)");
      }
      table.set(subject_id, tag, sum / n);
    }
  }
  return table;
}

std::vector<double> FeatureVector::flatten() const {
  std::vector<double> out(au_features.begin(), au_features.end());
  if (sensitive) out.insert(out.end(), sensitive->begin(), sensitive->end());
  return out;
}

FeatureVector featurize(const ImageMeta& image, const Dataset& dataset, Condition condition) {
  std::vector<size_t> pool = pool_records(dataset, image.image_id, AssessorPool::Feature);
  if (pool.empty())
    throw InvariantError("no feature-pool records for image " + image.image_id);
  FeatureVector fv;
  for (size_t idx : pool) {
    auto au = dataset.records()[idx].au.as_array();
    for (int k = 0; k < 6; ++k) fv.au_features[k] += au[k];
  }
  for (int k = 0; k < 6; ++k) fv.au_features[k] /= static_cast<double>(pool.size());

  if (condition_uses_sensitive(condition)) {
    std::array<double, 6> s{};
    s[image.race == Race::White ? 0 : 1] = 1.0;
    s[2 + (image.gender == Gender::Male ? 0 : 1)] = 1.0;
    s[4 + (image.age_band == AgeBand::Young ? 0 : 1)] = 1.0;
    fv.sensitive = s;
  }
  return fv;
}

double PredictorModel::predict(const FeatureVector& features) const {
  double y = intercept;
  for (int k = 0; k < 6; ++k) y += au_weights[k] * features.au_features[k];
  if (sensitive_weights) {
    if (!features.sensitive)
      throw ArgumentError("model expects sensitive features but none were provided");
    for (int k = 0; k < 6; ++k) y += (*sensitive_weights)[k] * (*features.sensitive)[k];
  }
  return y;
}

double mse_loss(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                const std::vector<double>& params, double l2) {
  size_t n = x.size();
  if (n == 0 || y.size() != n) throw ArgumentError("mse_loss: bad shapes");
  size_t d = params.size() - 1;
  double loss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double pred = params[d];
    for (size_t j = 0; j < d; ++j) pred += params[j] * x[i][j];
    double err = pred - y[i];
    loss += err * err;
  }
  loss /= static_cast<double>(n);
  for (size_t j = 0; j < d; ++j) loss += l2 * params[j] * params[j];
  return loss;
}

std::vector<double> mse_gradient(const std::vector<std::vector<double>>& x,
                                 const std::vector<double>& y,
                                 const std::vector<double>& params, double l2) {
  size_t n = x.size();
  if (n == 0 || y.size() != n) throw ArgumentError("mse_gradient: bad shapes");
  size_t d = params.size() - 1;
  std::vector<double> grad(params.size(), 0.0);
  for (size_t i = 0; i < n; ++i) {
    double pred = params[d];
    for (size_t j = 0; j < d; ++j) pred += params[j] * x[i][j];
    double err = 2.0 * (pred - y[i]) / static_cast<double>(n);
    for (size_t j = 0; j < d; ++j) grad[j] += err * x[i][j];
    grad[d] += err;
  }
  for (size_t j = 0; j < d; ++j) grad[j] += 2.0 * l2 * params[j];
  return grad;
}

PredictorModel train(const std::vector<FeatureVector>& features,
                     const std::vector<double>& labels, const TrainOptions& options) {
  if (features.size() < 2) throw ArgumentError("train: needs at least two examples");
  if (features.size() != labels.size()) throw ArgumentError("train: feature/label size mismatch");
  if (options.epochs < 0) throw ArgumentError("train: negative epoch budget");
  if (!(options.learning_rate > 0.0)) throw ArgumentError("train: learning rate must be > 0");

  bool has_sensitive = features.front().sensitive.has_value();
  std::vector<std::vector<double>> x;
  x.reserve(features.size());
  for (const auto& f : features) {
    if (f.sensitive.has_value() != has_sensitive)
      throw ArgumentError("train: inconsistent sensitive blocks across examples");
    x.push_back(f.flatten());
    if (!std::all_of(x.back().begin(), x.back().end(),
                     [](double v) { return std::isfinite(v); }))
      throw ArgumentError("train: non-finite feature value");
  }
  size_t d = x.front().size();

  // Canonical example order makes full-batch training exactly invariant to
  // the order the caller assembled the examples in.
  std::vector<size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t i, size_t j) {
    if (x[i] != x[j]) return x[i] < x[j];
    return labels[i] < labels[j];
  });
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  xs.reserve(x.size());
  ys.reserve(x.size());
  for (size_t i : order) {
    xs.push_back(x[i]);
    ys.push_back(labels[i]);
  }

  std::vector<double> params(d + 1, 0.0);
  params[d] = mean(ys);  // intercept starts at the label mean

  TrainingMeta meta;
  meta.seed = options.seed;
  meta.epochs_requested = options.epochs;
  meta.learning_rate = options.learning_rate;
  meta.l2 = options.l2;

  std::vector<double> grad;
  int epoch = 0;
  for (; epoch < options.epochs; ++epoch) {
    grad = mse_gradient(xs, ys, params, options.l2);
    double norm = 0.0;
    for (double g : grad) norm += g * g;
    norm = std::sqrt(norm);
    if (norm <= options.grad_tolerance) {
      meta.converged = true;
      break;
    }
    for (size_t j = 0; j <= d; ++j) params[j] -= options.learning_rate * grad[j];
    if (!std::isfinite(params[d]))
      throw NumericError("train: diverged at epoch " + std::to_string(epoch + 1) +
                         " (learning_rate=" + std::to_string(options.learning_rate) + ")");
  }
  meta.epochs_run = epoch;
  meta.final_loss = mse_loss(xs, ys, params, options.l2);
  if (!std::isfinite(meta.final_loss))
    throw NumericError("train: diverged (learning_rate=" +
                       std::to_string(options.learning_rate) + ")");
  grad = mse_gradient(xs, ys, params, options.l2);
  meta.grad_norm = 0.0;
  for (double g : grad) meta.grad_norm += g * g;
  meta.grad_norm = std::sqrt(meta.grad_norm);
  if (meta.grad_norm <= options.grad_tolerance) meta.converged = true;

  PredictorModel model;
  for (int k = 0; k < 6; ++k) model.au_weights[k] = params[k];
  if (has_sensitive) {
    std::array<double, 6> sw{};
    for (int k = 0; k < 6; ++k) sw[k] = params[6 + k];
    model.sensitive_weights = sw;
  }
  model.intercept = params[d];
  model.meta = meta;
  return model;
}

SubjectSplit split_subjects(const Dataset& dataset, double test_fraction, uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw ArgumentError("split_subjects: test_fraction must be in (0,1)");
  std::vector<std::string> subjects;
  subjects.reserve(dataset.groups().size());
  for (const auto& g : dataset.groups())
    if (dataset.group_included(g)) subjects.push_back(g.subject_id);
  std::sort(subjects.begin(), subjects.end());

  long long n_test = std::llround(test_fraction * static_cast<double>(subjects.size()));
  if (n_test < 1 || n_test >= static_cast<long long>(subjects.size()))
    throw ArgumentError("split_subjects: fraction " + std::to_string(test_fraction) +
                        " leaves an empty train or test side for " +
                        std::to_string(subjects.size()) + " subjects");

  Rng rng(derive_seed(seed, 17));
  rng.shuffle(subjects);

  SubjectSplit split;
  split.test_subjects.assign(subjects.begin(), subjects.begin() + n_test);
  split.train_subjects.assign(subjects.begin() + n_test, subjects.end());
  std::sort(split.test_subjects.begin(), split.test_subjects.end());
  std::sort(split.train_subjects.begin(), split.train_subjects.end());
  return split;
}

FairnessMetrics evaluate(const PredictorModel& model, const Dataset& dataset,
                         const std::vector<std::string>& test_subjects,
                         const LabelTable& test_labels, Condition condition,
                         double if_normalizer) {
  if (test_subjects.empty()) throw ArgumentError("evaluate: empty test set");
  if (!(if_normalizer > 0.0)) throw ArgumentError("evaluate: if_normalizer must be > 0");

  double se_sum = 0.0;
  long long n_images = 0;
  double if_sum = 0.0;
  for (const auto& subject_id : test_subjects) {
    const CounterfactualGroup& group = dataset.group_by_subject(subject_id);
    std::array<double, 4> pred{};
    for (VariantTag tag : kAllVariants) {
      const ImageMeta& img = group.variant(tag);
      FeatureVector fv = featurize(img, dataset, condition);
      double p = model.predict(fv);
      pred[static_cast<int>(tag)] = p;
      double err = p - test_labels.get(subject_id, tag);
      se_sum += err * err;
      ++n_images;
    }
    if_sum += std::fabs(pred[static_cast<int>(VariantTag::I)] -
                        pred[static_cast<int>(VariantTag::S)]) +
              std::fabs(pred[static_cast<int>(VariantTag::A)] -
                        pred[static_cast<int>(VariantTag::SA)]);
  }

  FairnessMetrics m;
  m.mse = se_sum / static_cast<double>(n_images);
  m.rmse = std::sqrt(m.mse);
  m.if_raw = if_sum / static_cast<double>(test_subjects.size());
  m.if_pct = 100.0 * m.if_raw / if_normalizer;
  return m;
}

CvResult cross_validate(const Dataset& dataset, Condition condition, int k, uint64_t seed,
                        const CorrectOptions& options) {
  if (k < 2) throw ArgumentError("cross_validate: k must be >= 2");
  size_t n_subjects = 0;
  for (const auto& g : dataset.groups())
    if (dataset.group_included(g)) ++n_subjects;
  if (static_cast<size_t>(k) > n_subjects)
    throw ArgumentError("cross_validate: k exceeds subject count");

  CvResult result;
  result.condition = condition;

  for (int fold = 0; fold < k; ++fold) {
    uint64_t fold_seed = derive_seed(seed, static_cast<uint64_t>(fold) + 100);
    SubjectSplit split = split_subjects(dataset, options.test_fraction, fold_seed);

    LabelTable train_labels = apply_condition(
        build_label_table(dataset, split.train_subjects, LabelSource{}), condition);
    LabelTable test_labels =
        build_label_table(dataset, split.test_subjects, options.test_label_source);

    std::vector<FeatureVector> features;
    std::vector<double> labels;
    for (const auto& subject_id : split.train_subjects) {
      const CounterfactualGroup& group = dataset.group_by_subject(subject_id);
      for (VariantTag tag : kAllVariants) {
        features.push_back(featurize(group.variant(tag), dataset, condition));
        labels.push_back(train_labels.get(subject_id, tag));
      }
    }
    TrainOptions topt = options.train;
    topt.seed = fold_seed;
    PredictorModel model = train(features, labels, topt);

    FoldResult fr;
    fr.fold = fold + 1;
    fr.metrics = evaluate(model, dataset, split.test_subjects, test_labels, condition,
                          options.if_normalizer);
    fr.train_mse = model.meta.final_loss;
    fr.training = model.meta;
    result.folds.push_back(fr);
  }

  auto accumulate = [&](auto get) {
    double s = 0.0;
    for (const auto& f : result.folds) s += get(f);
    return s / static_cast<double>(result.folds.size());
  };
  auto spread = [&](auto get, double m) {
    if (result.folds.size() < 2) return 0.0;
    double s = 0.0;
    for (const auto& f : result.folds) s += (get(f) - m) * (get(f) - m);
    return std::sqrt(s / static_cast<double>(result.folds.size() - 1));
  };
  result.mean_metrics.mse = accumulate([](const FoldResult& f) { return f.metrics.mse; });
  result.mean_metrics.rmse = accumulate([](const FoldResult& f) { return f.metrics.rmse; });
  result.mean_metrics.if_raw = accumulate([](const FoldResult& f) { return f.metrics.if_raw; });
  result.mean_metrics.if_pct = accumulate([](const FoldResult& f) { return f.metrics.if_pct; });
  result.sd_metrics.mse =
      spread([](const FoldResult& f) { return f.metrics.mse; }, result.mean_metrics.mse);
  result.sd_metrics.rmse =
      spread([](const FoldResult& f) { return f.metrics.rmse; }, result.mean_metrics.rmse);
  result.sd_metrics.if_raw =
      spread([](const FoldResult& f) { return f.metrics.if_raw; }, result.mean_metrics.if_raw);
  result.sd_metrics.if_pct =
      spread([](const FoldResult& f) { return f.metrics.if_pct; }, result.mean_metrics.if_pct);
  result.mean_train_mse = accumulate([](const FoldResult& f) { return f.train_mse; });
  return result;
}

double relative_improvement(double before, double after) {
  if (!(after > 0.0)) throw ArgumentError("relative_improvement: 'after' must be > 0");
  return 100.0 * (before - after) / after;
}

}  // namespace painfair
