// C API implementation: translates between the opaque-handle surface in
// painfair.h and the C++ core. All exceptions stop at this boundary.

#include "painfair/painfair.h"

#include <cstring>
#include <exception>
#include <string>

#include "biastat/biastat.hpp"
#include "core/dataset.hpp"
#include "core/error.hpp"
#include "faircorrect/faircorrect.hpp"
#include "paircheck/paircheck.hpp"
#include "pspi/pspi.hpp"
#include "simgen/simgen.hpp"
#include "stats/stats.hpp"

using namespace painfair;

struct pf_dataset {
  Dataset data;
};

namespace {

thread_local std::string g_last_error;

pf_status status_of(const Error& e) {
  switch (e.category()) {
    case ErrorCategory::Argument: return PF_ERR_ARGUMENT;
    case ErrorCategory::Io: return PF_ERR_IO;
    case ErrorCategory::Schema: return PF_ERR_SCHEMA;
    case ErrorCategory::Invariant: return PF_ERR_INVARIANT;
    case ErrorCategory::Numeric: return PF_ERR_NUMERIC;
    case ErrorCategory::State: return PF_ERR_STATE;
  }
  return PF_ERR_INTERNAL;
}

template <typename Fn>
pf_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PF_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PF_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return PF_ERR_INTERNAL;
  }
}

pf_status fail_argument(const char* message) {
  g_last_error = message;
  return PF_ERR_ARGUMENT;
}

void copy_str(char* dst, size_t cap, const std::string& src) {
  size_t n = src.size() < cap - 1 ? src.size() : cap - 1;
  std::memcpy(dst, src.data(), n);
  dst[n] = '\0';
}

Filter filter_of(const pf_filter* f) {
  Filter out;
  if (!f) return out;
  if (f->gender == 0) out.gender = Gender::Female;
  if (f->gender == 1) out.gender = Gender::Male;
  if (f->platform == 0) out.platform = Platform::A;
  if (f->platform == 1) out.platform = Platform::B;
  if (f->platform == 2) out.platform = Platform::Other;
  return out;
}

SimConfig sim_config_of(const pf_sim_config* c) {
  SimConfig out;
  out.n_subjects = c->n_subjects;
  out.assessors_per_image = c->assessors_per_image;
  out.beta_race = c->beta_race;
  out.beta_age = c->beta_age;
  if (c->has_au_bias_profile) {
    std::array<double, 6> profile{};
    for (int k = 0; k < 6; ++k) profile[k] = c->au_bias_profile[k];
    out.au_bias_profile = profile;
  }
  out.noise_sd = c->noise_sd;
  out.landmark_noise_sd = c->landmark_noise_sd;
  out.n_landmarks = c->n_landmarks;
  out.seed = c->seed;
  return out;
}

}  // namespace

extern "C" {

const char* pf_version(void) { return "0.1.0"; }

const char* pf_last_error(void) { return g_last_error.c_str(); }

pf_status pf_dataset_open(const char* groups_csv, const char* records_csv,
                          const char* landmarks_json, int include_flagged, pf_dataset** out) {
  if (!out || !groups_csv || !records_csv) return fail_argument("pf_dataset_open: null argument");
  *out = nullptr;
  return guarded([&] {
    IngestOptions opts;
    opts.include_flagged = include_flagged != 0;
    auto ds = new pf_dataset{Dataset::ingest(groups_csv, records_csv,
                                             landmarks_json ? landmarks_json : "", opts)};
    *out = ds;
  });
}

void pf_dataset_close(pf_dataset* ds) { delete ds; }

long long pf_dataset_n_groups(const pf_dataset* ds) {
  return ds ? static_cast<long long>(ds->data.groups().size()) : 0;
}

long long pf_dataset_n_records(const pf_dataset* ds) {
  return ds ? static_cast<long long>(ds->data.records().size()) : 0;
}

long long pf_dataset_n_rejected(const pf_dataset* ds) {
  return ds ? static_cast<long long>(ds->data.rejections().size()) : 0;
}

long long pf_dataset_n_excluded(const pf_dataset* ds) {
  if (!ds) return 0;
  long long n = 0;
  for (size_t i = 0; i < ds->data.records().size(); ++i)
    if (!ds->data.record_included(i)) ++n;
  return n;
}

long long pf_dataset_n_landmark_sets(const pf_dataset* ds) {
  return ds ? static_cast<long long>(ds->data.landmarks().size()) : 0;
}

long long pf_dataset_n_flagged_images(const pf_dataset* ds) {
  if (!ds) return 0;
  long long n = 0;
  for (const auto& g : ds->data.groups())
    for (VariantTag tag : kAllVariants)
      if (g.variant(tag).deepfake_flagged) ++n;
  return n;
}

long long pf_dataset_n_unverified_images(const pf_dataset* ds) {
  if (!ds) return 0;
  long long n = 0;
  for (const auto& g : ds->data.groups())
    for (VariantTag tag : kAllVariants)
      if (!g.variant(tag).verified_same_person) ++n;
  return n;
}

size_t pf_dataset_rejections(const pf_dataset* ds, pf_rejection* out, size_t cap,
                             size_t* total) {
  if (!ds) return 0;
  const auto& rejections = ds->data.rejections();
  if (total) *total = rejections.size();
  if (!out) return 0;
  size_t n = rejections.size() < cap ? rejections.size() : cap;
  for (size_t i = 0; i < n; ++i) {
    copy_str(out[i].file, sizeof out[i].file, rejections[i].file);
    out[i].row = static_cast<long long>(rejections[i].row);
    copy_str(out[i].reason, sizeof out[i].reason, rejections[i].reason);
  }
  return n;
}

pf_status pf_dataset_export(const pf_dataset* ds, const char* dir) {
  if (!ds || !dir) return fail_argument("pf_dataset_export: null argument");
  return guarded([&] { ds->data.export_files(dir); });
}

int pf_pspi_score(int au4, int au6, int au7, int au9, int au10, int au43) {
  AuVector au{au4, au6, au7, au9, au10, au43};
  if (!au.valid()) return -1;
  return pspi_score(au);
}

pf_status pf_mean_pspi(const pf_dataset* ds, const char* image_id, double* out) {
  if (!ds || !image_id || !out) return fail_argument("pf_mean_pspi: null argument");
  return guarded([&] { *out = mean_pspi(ds->data, image_id); });
}

pf_status pf_welch_t(const double* a, size_t na, const double* b, size_t nb, double* t,
                     double* df) {
  if (!a || !b || !t || !df) return fail_argument("pf_welch_t: null argument");
  return guarded([&] {
    WelchResult r = welch_t({a, na}, {b, nb});
    *t = r.t;
    *df = r.df;
  });
}

pf_status pf_t_cdf(double t, double df, double* out) {
  if (!out) return fail_argument("pf_t_cdf: null argument");
  return guarded([&] { *out = t_cdf(t, df); });
}

pf_status pf_two_sided_p(double t, double df, double* out) {
  if (!out) return fail_argument("pf_two_sided_p: null argument");
  return guarded([&] { *out = two_sided_p(t, df); });
}

pf_status pf_bias_estimate(const pf_dataset* ds, pf_attribute attribute, const pf_filter* filter,
                           int paired, pf_bias_result* out) {
  if (!ds || !out) return fail_argument("pf_bias_estimate: null argument");
  return guarded([&] {
    BiasEstimate est = bias_estimate(ds->data,
                                     attribute == PF_ATTR_RACE ? Attribute::Race : Attribute::Age,
                                     filter_of(filter), paired != 0);
    out->group_a = {est.group_a.mean, est.group_a.se, est.group_a.n};
    out->group_b = {est.group_b.mean, est.group_b.se, est.group_b.n};
    out->diff = est.diff;
    out->diff_se = est.diff_se;
    out->t_stat = est.t_stat;
    out->df = est.df;
    out->p_value = est.p_value;
    out->pct_bias = est.pct_bias.value_or(0.0);
    out->pct_bias_defined = est.pct_bias.has_value() ? 1 : 0;
    copy_str(out->stars, sizeof out->stars, significance_stars(est.p_value));
  });
}

pf_status pf_rank_groups(const pf_dataset* ds, const pf_filter* filter, pf_ranking* out) {
  if (!ds || !out) return fail_argument("pf_rank_groups: null argument");
  return guarded([&] {
    GroupRanking ranking = rank_groups(ds->data, filter_of(filter));
    for (size_t i = 0; i < 4; ++i) {
      const RankedCell& cell = ranking.cells[i];
      copy_str(out->cells[i].label, sizeof out->cells[i].label,
               cell_label(cell.race, cell.age_band));
      out->cells[i].mean_pspi = cell.mean_pspi;
      out->cells[i].n = cell.n;
    }
    out->tie_flag = ranking.tie_flag ? 1 : 0;
  });
}

pf_status pf_au_level_tests(const pf_dataset* ds, pf_attribute attribute,
                            const pf_filter* filter, pf_au_test_row rows[6]) {
  if (!ds || !rows) return fail_argument("pf_au_level_tests: null argument");
  return guarded([&] {
    auto result = au_level_tests(
        ds->data, attribute == PF_ATTR_RACE ? Attribute::Race : Attribute::Age,
        filter_of(filter));
    for (size_t i = 0; i < 6; ++i) {
      copy_str(rows[i].au, sizeof rows[i].au, kAuNames[result[i].au_index]);
      rows[i].t_stat = result[i].t_stat;
      rows[i].df = result[i].df;
      rows[i].p_value = result[i].p_value;
      rows[i].testable = result[i].testable ? 1 : 0;
    }
  });
}

pf_status pf_pair_shift(const pf_dataset* ds, double alpha, pf_pair_shift_report* out) {
  if (!ds || !out) return fail_argument("pf_pair_shift: null argument");
  return guarded([&] {
    PairShiftReport report = pair_shift_report(ds->data, alpha);
    out->alpha = report.alpha;
    out->n_groups = report.n_groups;
    for (size_t i = 0; i < 3; ++i) out->mean_distance[i] = report.per_condition[i].mean_distance;
    for (size_t i = 0; i < report.pairwise.size() && i < 3; ++i) {
      const PairwiseShiftTest& t = report.pairwise[i];
      copy_str(out->tests[i].condition_a, sizeof out->tests[i].condition_a,
               to_string(t.condition_a));
      copy_str(out->tests[i].condition_b, sizeof out->tests[i].condition_b,
               to_string(t.condition_b));
      out->tests[i].t_stat = t.t_stat;
      out->tests[i].df = t.df;
      out->tests[i].p_value = t.p_value;
      out->tests[i].testable = t.testable ? 1 : 0;
    }
    out->any_significant = report.any_significant ? 1 : 0;
    out->degenerate_warning = report.degenerate_warning ? 1 : 0;
  });
}

pf_status pf_landmark_distance(const double* a_xy, size_t a_n, const double* b_xy, size_t b_n,
                               double* out) {
  if (!a_xy || !b_xy || !out) return fail_argument("pf_landmark_distance: null argument");
  return guarded([&] {
    LandmarkSet a, b;
    for (size_t i = 0; i < a_n; ++i) a.points.push_back({a_xy[2 * i], a_xy[2 * i + 1]});
    for (size_t i = 0; i < b_n; ++i) b.points.push_back({b_xy[2 * i], b_xy[2 * i + 1]});
    *out = landmark_distance(a, b);
  });
}

pf_status pf_check_age_band(const pf_dataset* ds, const char* original_image_id,
                            const char* manipulated_image_id, int* out) {
  if (!ds || !original_image_id || !manipulated_image_id || !out)
    return fail_argument("pf_check_age_band: null argument");
  return guarded([&] {
    *out = check_age_band(ds->data.image(original_image_id),
                          ds->data.image(manipulated_image_id))
               ? 1
               : 0;
  });
}

void pf_correct_options_default(pf_correct_options* out) {
  if (!out) return;
  out->k_folds = 5;
  out->test_fraction = 0.1;
  out->seed = 0;
  out->epochs = 2000;
  out->learning_rate = 0.01;
  out->l2 = 0.0;
  out->if_normalizer = 16.0;
  out->expert_assessor = nullptr;
}

pf_status pf_correct(const pf_dataset* ds, pf_condition condition,
                     const pf_correct_options* options, pf_metrics_row* rows, size_t* n_rows) {
  if (!ds || !options || !rows || !n_rows)
    return fail_argument("pf_correct: null argument");
  return guarded([&] {
    CorrectOptions opts;
    opts.train.epochs = options->epochs;
    opts.train.learning_rate = options->learning_rate;
    opts.train.l2 = options->l2;
    opts.test_fraction = options->test_fraction;
    opts.if_normalizer = options->if_normalizer;
    if (options->expert_assessor)
      opts.test_label_source.expert_assessor = options->expert_assessor;
    Condition cond = static_cast<Condition>(condition);
    CvResult result =
        cross_validate(ds->data, cond, options->k_folds, options->seed, opts);
    size_t i = 0;
    for (const FoldResult& fold : result.folds) {
      copy_str(rows[i].condition, sizeof rows[i].condition, to_string(cond));
      rows[i].fold = fold.fold;
      rows[i].train_mse = fold.train_mse;
      rows[i].mse = fold.metrics.mse;
      rows[i].rmse = fold.metrics.rmse;
      rows[i].if_raw = fold.metrics.if_raw;
      rows[i].if_pct = fold.metrics.if_pct;
      ++i;
    }
    copy_str(rows[i].condition, sizeof rows[i].condition, to_string(cond));
    rows[i].fold = 0;
    rows[i].train_mse = result.mean_train_mse;
    rows[i].mse = result.mean_metrics.mse;
    rows[i].rmse = result.mean_metrics.rmse;
    rows[i].if_raw = result.mean_metrics.if_raw;
    rows[i].if_pct = result.mean_metrics.if_pct;
    *n_rows = i + 1;
  });
}

pf_status pf_relative_improvement(double before, double after, double* out) {
  if (!out) return fail_argument("pf_relative_improvement: null argument");
  return guarded([&] { *out = relative_improvement(before, after); });
}

void pf_sim_config_default(pf_sim_config* out) {
  if (!out) return;
  SimConfig defaults;
  out->n_subjects = defaults.n_subjects;
  out->assessors_per_image = defaults.assessors_per_image;
  out->beta_race = defaults.beta_race;
  out->beta_age = defaults.beta_age;
  out->has_au_bias_profile = 0;
  for (int k = 0; k < 6; ++k) out->au_bias_profile[k] = 0.0;
  out->noise_sd = defaults.noise_sd;
  out->landmark_noise_sd = defaults.landmark_noise_sd;
  out->n_landmarks = defaults.n_landmarks;
  out->seed = defaults.seed;
}

pf_status pf_simulate(const pf_sim_config* config, const char* dir) {
  if (!config || !dir) return fail_argument("pf_simulate: null argument");
  return guarded([&] {
    SimResult result = simulate(sim_config_of(config));
    result.dataset.export_files(dir);
    write_ground_truth(result.truth, std::string(dir) + "/ground_truth.json");
  });
}

pf_status pf_simulate_open(const pf_sim_config* config, pf_dataset** out) {
  if (!config || !out) return fail_argument("pf_simulate_open: null argument");
  *out = nullptr;
  return guarded([&] {
    SimResult result = simulate(sim_config_of(config));
    *out = new pf_dataset{std::move(result.dataset)};
  });
}

pf_status pf_recovery_report(const pf_dataset* ds, const char* ground_truth_json,
                             pf_recovery_row* rows, size_t* n_rows) {
  if (!ds || !ground_truth_json || !rows || !n_rows)
    return fail_argument("pf_recovery_report: null argument");
  return guarded([&] {
    GroundTruth truth = read_ground_truth(ground_truth_json);
    auto result = recovery_report(ds->data, truth);
    for (size_t i = 0; i < result.size() && i < 2; ++i) {
      copy_str(rows[i].axis, sizeof rows[i].axis,
               result[i].axis == Attribute::Race ? "race" : "age");
      rows[i].injected = result[i].injected;
      rows[i].estimated = result[i].estimated;
      rows[i].se = result[i].se;
      rows[i].ci_lo = result[i].ci_lo;
      rows[i].ci_hi = result[i].ci_hi;
      rows[i].covered = result[i].covered ? 1 : 0;
    }
    *n_rows = result.size() < 2 ? result.size() : 2;
  });
}

}  // extern "C"
