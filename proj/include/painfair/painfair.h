/* painfair: C API for the counterfactual pain-assessment bias toolkit.
 *
 * The library scores Action-Unit annotations into PSPI, validates
 * counterfactual image pairs, measures group- and AU-level bias, runs the
 * label-correction / fairness-evaluation pipeline, and generates synthetic
 * studies with known injected bias.
 *
 * All functions returning pf_status report PF_OK on success; on failure the
 * per-thread message from pf_last_error() describes the problem. Handles are
 * opaque; a pf_dataset is immutable once opened and may be shared across
 * threads for reading.
 */
#ifndef PAINFAIR_H
#define PAINFAIR_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PF_API __declspec(dllexport)
#else
#define PF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pf_status {
  PF_OK = 0,
  PF_ERR_ARGUMENT = 1, /* bad parameter / usage */
  PF_ERR_IO = 2,
  PF_ERR_SCHEMA = 3,    /* malformed input file */
  PF_ERR_INVARIANT = 4, /* dataset or data invariant violated */
  PF_ERR_NUMERIC = 5,   /* degenerate statistic, divergence */
  PF_ERR_STATE = 6,
  PF_ERR_INTERNAL = 7
} pf_status;

PF_API const char* pf_version(void);

/* Message for the most recent failure on this thread ("" if none). */
PF_API const char* pf_last_error(void);

/* ------------------------------------------------------------------ */
/* Dataset                                                             */

typedef struct pf_dataset pf_dataset;

/* landmarks_json may be NULL. include_flagged keeps records of
 * deepfake-flagged images in the analysis. */
PF_API pf_status pf_dataset_open(const char* groups_csv, const char* records_csv,
                                 const char* landmarks_json, int include_flagged,
                                 pf_dataset** out);
PF_API void pf_dataset_close(pf_dataset* ds);

PF_API long long pf_dataset_n_groups(const pf_dataset* ds);
PF_API long long pf_dataset_n_records(const pf_dataset* ds);
PF_API long long pf_dataset_n_rejected(const pf_dataset* ds);
PF_API long long pf_dataset_n_excluded(const pf_dataset* ds);
PF_API long long pf_dataset_n_landmark_sets(const pf_dataset* ds);
PF_API long long pf_dataset_n_flagged_images(const pf_dataset* ds);
PF_API long long pf_dataset_n_unverified_images(const pf_dataset* ds);

/* Itemized ingest rejections. Returns the number written (at most cap);
 * *total receives the full count. Each description is truncated to fit. */
typedef struct pf_rejection {
  char file[128];
  long long row;
  char reason[160];
} pf_rejection;
PF_API size_t pf_dataset_rejections(const pf_dataset* ds, pf_rejection* out, size_t cap,
                                    size_t* total);

/* Re-export the dataset into dir (groups.csv, records.csv, landmarks.json). */
PF_API pf_status pf_dataset_export(const pf_dataset* ds, const char* dir);

/* ------------------------------------------------------------------ */
/* PSPI                                                                */

/* AU4 + max(AU6,AU7) + max(AU9,AU10) + AU43. Returns -1 if an intensity is
 * out of range (AU4..AU10 in 0..5, AU43 in 0..1). */
PF_API int pf_pspi_score(int au4, int au6, int au7, int au9, int au10, int au43);

PF_API pf_status pf_mean_pspi(const pf_dataset* ds, const char* image_id, double* out);

/* ------------------------------------------------------------------ */
/* Statistics                                                          */

PF_API pf_status pf_welch_t(const double* a, size_t na, const double* b, size_t nb, double* t,
                            double* df);
PF_API pf_status pf_t_cdf(double t, double df, double* out);
PF_API pf_status pf_two_sided_p(double t, double df, double* out);

/* ------------------------------------------------------------------ */
/* Bias measurement                                                    */

typedef enum pf_attribute { PF_ATTR_RACE = 0, PF_ATTR_AGE = 1 } pf_attribute;

/* -1 = no filter. Genders: 0 female, 1 male. Platforms: 0 A, 1 B, 2 other. */
typedef struct pf_filter {
  int gender;
  int platform;
} pf_filter;

typedef struct pf_mean_stat {
  double mean;
  double se;
  long long n;
} pf_mean_stat;

/* For race, group_a is Black and group_b White; for age, group_a is Senior
 * and group_b Young. pct_bias is in percent of the smaller group mean and is
 * meaningful only when pct_bias_defined is nonzero. */
typedef struct pf_bias_result {
  pf_mean_stat group_a;
  pf_mean_stat group_b;
  double diff;
  double diff_se;
  double t_stat;
  double df;
  double p_value;
  double pct_bias;
  int pct_bias_defined;
  char stars[4];
} pf_bias_result;

PF_API pf_status pf_bias_estimate(const pf_dataset* ds, pf_attribute attribute,
                                  const pf_filter* filter, int paired, pf_bias_result* out);

typedef struct pf_rank_cell {
  char label[16]; /* e.g. "WhiteSenior" */
  double mean_pspi;
  long long n;
} pf_rank_cell;

typedef struct pf_ranking {
  pf_rank_cell cells[4]; /* descending mean PSPI */
  int tie_flag;
} pf_ranking;

PF_API pf_status pf_rank_groups(const pf_dataset* ds, const pf_filter* filter, pf_ranking* out);

typedef struct pf_au_test_row {
  char au[8];
  double t_stat;
  double df;
  double p_value;
  int testable;
} pf_au_test_row;

/* rows must hold 6 entries. */
PF_API pf_status pf_au_level_tests(const pf_dataset* ds, pf_attribute attribute,
                                   const pf_filter* filter, pf_au_test_row rows[6]);

/* ------------------------------------------------------------------ */
/* Counterfactual pair validation                                      */

typedef struct pf_pair_test {
  char condition_a[4];
  char condition_b[4];
  double t_stat;
  double df;
  double p_value;
  int testable;
} pf_pair_test;

typedef struct pf_pair_shift_report {
  double alpha;
  long long n_groups;
  double mean_distance[3]; /* S, A, SA vs the original */
  pf_pair_test tests[3];
  int any_significant;
  int degenerate_warning;
} pf_pair_shift_report;

PF_API pf_status pf_pair_shift(const pf_dataset* ds, double alpha, pf_pair_shift_report* out);

/* Mean Euclidean distance between matched (x,y) landmark lists. */
PF_API pf_status pf_landmark_distance(const double* a_xy, size_t a_n, const double* b_xy,
                                      size_t b_n, double* out);

/* True (1) iff the age band flipped between an original image and its
 * age-manipulated counterpart (variant A or SA of the same subject). */
PF_API pf_status pf_check_age_band(const pf_dataset* ds, const char* original_image_id,
                                   const char* manipulated_image_id, int* out);

/* ------------------------------------------------------------------ */
/* Label correction / fairness                                         */

typedef enum pf_condition {
  PF_COND_ORIGINAL = 0,
  PF_COND_AVERAGE = 1,
  PF_COND_AUTO = 2,
  PF_COND_AVERAGE_AUTO = 3
} pf_condition;

typedef struct pf_correct_options {
  int k_folds;          /* >= 2 */
  double test_fraction; /* subject-level holdout per fold */
  uint64_t seed;
  int epochs;
  double learning_rate;
  double l2;
  double if_normalizer;      /* default 16 = PSPI range */
  const char* expert_assessor; /* NULL/"" = label-pool test labels */
} pf_correct_options;

PF_API void pf_correct_options_default(pf_correct_options* out);

typedef struct pf_metrics_row {
  char condition[16];
  int fold; /* 1..k; 0 = aggregate mean over folds */
  double train_mse;
  double mse;
  double rmse;
  double if_raw;
  double if_pct;
} pf_metrics_row;

/* Runs k subject-level train/evaluate folds under one label condition.
 * Writes k fold rows plus one aggregate row; rows must hold k_folds + 1
 * entries. *n_rows receives the count written. */
PF_API pf_status pf_correct(const pf_dataset* ds, pf_condition condition,
                            const pf_correct_options* options, pf_metrics_row* rows,
                            size_t* n_rows);

/* (before - after) / after in percent; after must be > 0. */
PF_API pf_status pf_relative_improvement(double before, double after, double* out);

/* ------------------------------------------------------------------ */
/* Synthetic study generator                                           */

typedef struct pf_sim_config {
  int n_subjects;
  int assessors_per_image;
  double beta_race; /* additive PSPI-scale bias toward White */
  double beta_age;  /* additive PSPI-scale bias toward Senior */
  int has_au_bias_profile;
  double au_bias_profile[6]; /* signed per-AU race shifts, + = White higher */
  double noise_sd;
  double landmark_noise_sd;
  int n_landmarks;
  uint64_t seed;
} pf_sim_config;

PF_API void pf_sim_config_default(pf_sim_config* out);

/* Writes groups.csv, records.csv, landmarks.json and ground_truth.json into
 * dir. Deterministic given the seed. */
PF_API pf_status pf_simulate(const pf_sim_config* config, const char* dir);

/* Opens the generated dataset directly, without touching the filesystem. */
PF_API pf_status pf_simulate_open(const pf_sim_config* config, pf_dataset** out);

typedef struct pf_recovery_row {
  char axis[8]; /* "race" or "age" */
  double injected;
  double estimated;
  double se;
  double ci_lo;
  double ci_hi;
  int covered;
} pf_recovery_row;

/* Compares measured bias on ds against the injected parameters recorded in
 * ground_truth_json. rows must hold 2 entries; *n_rows receives the count. */
PF_API pf_status pf_recovery_report(const pf_dataset* ds, const char* ground_truth_json,
                                    pf_recovery_row* rows, size_t* n_rows);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PAINFAIR_H */
