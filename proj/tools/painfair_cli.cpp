// painfair command line front end.
//
// Subcommands: validate-pairs, measure-bias, rank-groups, au-tests, correct,
// simulate, report. Every run writes a manifest.json next to its artifacts;
// exit codes are 0 (ok), 2 (usage), 3 (data/validation), 4 (numeric failure).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli_support.hpp"
#include "painfair/painfair.h"

namespace {

using pfcli::CsvDoc;
using pfcli::fmt_full;

struct CliFailure {
  std::string category;
  std::string message;
  int exit_code = 3;
};

void check(pf_status status, const std::string& context) {
  if (status == PF_OK) return;
  std::string message = context;
  if (const char* detail = pf_last_error(); detail && *detail) {
    message += ": ";
    message += detail;
  }
  throw CliFailure{pfcli::status_category(status), message, pfcli::status_exit_code(status)};
}

struct DatasetArgs {
  std::string groups;
  std::string records;
  std::string landmarks;
  bool include_flagged = false;
};

struct FilterArgs {
  std::string gender;    // "", "female", "male"
  std::string platform;  // "", "A", "B", "other"

  pf_filter to_c() const {
    pf_filter f{-1, -1};
    if (gender == "female") f.gender = 0;
    if (gender == "male") f.gender = 1;
    if (platform == "A") f.platform = 0;
    if (platform == "B") f.platform = 1;
    if (platform == "other") f.platform = 2;
    return f;
  }
};

class DatasetHandle {
public:
  explicit DatasetHandle(const DatasetArgs& args) {
    check(pf_dataset_open(args.groups.c_str(), args.records.c_str(),
                          args.landmarks.empty() ? nullptr : args.landmarks.c_str(),
                          args.include_flagged ? 1 : 0, &ds_),
          "loading dataset");
  }
  ~DatasetHandle() { pf_dataset_close(ds_); }
  DatasetHandle(const DatasetHandle&) = delete;
  DatasetHandle& operator=(const DatasetHandle&) = delete;
  pf_dataset* get() const { return ds_; }

private:
  pf_dataset* ds_ = nullptr;
};

// Collects manifest data while a subcommand runs and guarantees the manifest
// is written whether the run succeeds or fails.
struct RunContext {
  std::string out_dir;
  pfcli::RunManifest manifest;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  RunContext(const std::string& command, std::string out) : out_dir(std::move(out)) {
    manifest.command = command;
    manifest.tool_version = pf_version();
    manifest.started_at = pfcli::now_iso8601_utc();
  }

  std::string out_path(const std::string& name) const {
    return (std::filesystem::path(out_dir) / name).string();
  }

  void add_input(const std::string& path) {
    if (!path.empty()) manifest.input_files.push_back(path);
  }
  void add_output(const std::string& path) { manifest.outputs.push_back(path); }

  void finish(const std::string& status, const std::string& category = "",
              const std::string& message = "") {
    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest.status = status;
    manifest.error_category = category;
    manifest.error_message = message;
    manifest.write(out_dir);
  }
};

void add_dataset_inputs(RunContext& ctx, const DatasetArgs& args) {
  ctx.add_input(args.groups);
  ctx.add_input(args.records);
  ctx.add_input(args.landmarks);
}

// Runs the body under the output-directory lock and always leaves a manifest
// behind (except when the directory is owned by another live run).
int run_command(RunContext& ctx, const std::function<void()>& body) {
  std::optional<pfcli::RunLock> lock;
  try {
    lock.emplace(ctx.out_dir);
  } catch (const std::exception& e) {
    std::cerr << pfcli::error_json("data", e.what()) << "\n";
    return 3;
  }
  try {
    body();
    ctx.finish("ok");
    return 0;
  } catch (const CliFailure& f) {
    ctx.finish("error", f.category, f.message);
    std::cerr << pfcli::error_json(f.category, f.message) << "\n";
    return f.exit_code;
  } catch (const std::exception& e) {
    ctx.finish("error", "internal", e.what());
    std::cerr << pfcli::error_json("internal", e.what()) << "\n";
    return 3;
  }
}

std::string bool_str(bool v) { return v ? "1" : "0"; }

// ---------------------------------------------------------------- commands

struct BiasArgs {
  DatasetArgs data;
  FilterArgs filter;
  std::string attribute;  // "race" | "age"
  bool paired = false;
  std::string out = ".";
};

int cmd_measure_bias(const BiasArgs& args) {
  RunContext ctx("measure-bias", args.out);
  add_dataset_inputs(ctx, args.data);
  ctx.manifest.add_config("attribute", args.attribute);
  ctx.manifest.add_config("paired", bool_str(args.paired));
  ctx.manifest.add_config("gender", args.filter.gender);
  ctx.manifest.add_config("platform", args.filter.platform);
  ctx.manifest.add_config("include_flagged", bool_str(args.data.include_flagged));

  return run_command(ctx, [&] {
    DatasetHandle ds(args.data);
    pf_attribute attr = args.attribute == "race" ? PF_ATTR_RACE : PF_ATTR_AGE;

    CsvDoc doc;
    doc.header = {"attribute", "sample", "paired", "mean_a", "n_a", "se_a",
                  "mean_b",    "n_b",    "se_b",   "diff",   "diff_se", "t_stat",
                  "df",        "p_value", "stars",  "pct_bias"};

    auto add_row = [&](const std::string& sample, const pf_filter& filter, bool required) {
      pf_bias_result r;
      pf_status status = pf_bias_estimate(ds.get(), attr, &filter, args.paired ? 1 : 0, &r);
      if (status != PF_OK) {
        if (required) check(status, "bias estimate (" + sample + ")");
        return;  // subset empty: row skipped
      }
      doc.rows.push_back({args.attribute, sample, bool_str(args.paired), fmt_full(r.group_a.mean),
                          std::to_string(r.group_a.n), fmt_full(r.group_a.se),
                          fmt_full(r.group_b.mean), std::to_string(r.group_b.n),
                          fmt_full(r.group_b.se), fmt_full(r.diff), fmt_full(r.diff_se),
                          fmt_full(r.t_stat), fmt_full(r.df), fmt_full(r.p_value), r.stars,
                          r.pct_bias_defined ? fmt_full(r.pct_bias) : ""});
    };

    pf_filter base = args.filter.to_c();
    if (args.filter.gender.empty()) {
      add_row("All", base, true);
      pf_filter f = base;
      f.gender = 0;
      add_row("Female", f, false);
      f.gender = 1;
      add_row("Male", f, false);
    } else {
      add_row(args.filter.gender == "female" ? "Female" : "Male", base, true);
    }

    std::string csv_path = ctx.out_path("bias.csv");
    pfcli::write_csv(csv_path, doc);
    ctx.add_output(csv_path);
    std::cout << pfcli::render_bias_tables(doc);
  });
}

struct RankArgs {
  DatasetArgs data;
  FilterArgs filter;
  std::string out = ".";
};

int cmd_rank_groups(const RankArgs& args) {
  RunContext ctx("rank-groups", args.out);
  add_dataset_inputs(ctx, args.data);
  ctx.manifest.add_config("gender", args.filter.gender);
  ctx.manifest.add_config("platform", args.filter.platform);
  ctx.manifest.add_config("include_flagged", bool_str(args.data.include_flagged));

  return run_command(ctx, [&] {
    DatasetHandle ds(args.data);
    pf_filter filter = args.filter.to_c();
    pf_ranking ranking;
    check(pf_rank_groups(ds.get(), &filter, &ranking), "ranking groups");

    CsvDoc doc;
    doc.header = {"rank", "group", "mean_pspi", "n", "tied"};
    for (int i = 0; i < 4; ++i) {
      doc.rows.push_back({std::to_string(i + 1), ranking.cells[i].label,
                          fmt_full(ranking.cells[i].mean_pspi),
                          std::to_string(ranking.cells[i].n), bool_str(ranking.tie_flag != 0)});
    }
    std::string csv_path = ctx.out_path("ranking.csv");
    pfcli::write_csv(csv_path, doc);
    ctx.add_output(csv_path);
    std::cout << pfcli::render_ranking_table(doc);
  });
}

struct AuArgs {
  DatasetArgs data;
  FilterArgs filter;
  std::string attribute;
  std::string out = ".";
};

int cmd_au_tests(const AuArgs& args) {
  RunContext ctx("au-tests", args.out);
  add_dataset_inputs(ctx, args.data);
  ctx.manifest.add_config("attribute", args.attribute);
  ctx.manifest.add_config("gender", args.filter.gender);
  ctx.manifest.add_config("platform", args.filter.platform);
  ctx.manifest.add_config("include_flagged", bool_str(args.data.include_flagged));

  return run_command(ctx, [&] {
    DatasetHandle ds(args.data);
    pf_filter filter = args.filter.to_c();
    pf_au_test_row rows[6];
    check(pf_au_level_tests(ds.get(),
                            args.attribute == "race" ? PF_ATTR_RACE : PF_ATTR_AGE, &filter,
                            rows),
          "AU-level tests");

    CsvDoc doc;
    doc.header = {"attribute", "au", "t_stat", "df", "p_value", "testable"};
    for (const auto& row : rows) {
      doc.rows.push_back({args.attribute, row.au, fmt_full(row.t_stat), fmt_full(row.df),
                          fmt_full(row.p_value), bool_str(row.testable != 0)});
    }
    std::string csv_path = ctx.out_path("au_tests.csv");
    pfcli::write_csv(csv_path, doc);
    ctx.add_output(csv_path);
    std::cout << pfcli::render_au_table(doc);
  });
}

struct PairArgs {
  DatasetArgs data;
  double alpha = 0.05;
  std::string out = ".";
};

int cmd_validate_pairs(const PairArgs& args) {
  RunContext ctx("validate-pairs", args.out);
  add_dataset_inputs(ctx, args.data);
  ctx.manifest.add_config("alpha", args.alpha);
  ctx.manifest.add_config("include_flagged", bool_str(args.data.include_flagged));

  return run_command(ctx, [&] {
    DatasetHandle ds(args.data);
    pf_pair_shift_report report;
    check(pf_pair_shift(ds.get(), args.alpha, &report), "pair-shift analysis");

    CsvDoc doc;
    doc.header = {"row_type", "condition_a", "condition_b", "mean_distance", "n",
                  "t_stat",   "df",          "p_value",     "significant",   "testable",
                  "alpha"};
    const char* conditions[3] = {"S", "A", "SA"};
    std::string alpha = pfcli::fmt3(args.alpha);
    for (int i = 0; i < 3; ++i) {
      doc.rows.push_back({"mean", conditions[i], "", fmt_full(report.mean_distance[i]),
                          std::to_string(report.n_groups), "", "", "", "", "", alpha});
    }
    for (const auto& test : report.tests) {
      bool significant = test.testable && test.p_value < args.alpha;
      doc.rows.push_back({"test", test.condition_a, test.condition_b, "", "",
                          fmt_full(test.t_stat), fmt_full(test.df), fmt_full(test.p_value),
                          bool_str(significant), bool_str(test.testable != 0), alpha});
    }
    std::string csv_path = ctx.out_path("pairshift.csv");
    pfcli::write_csv(csv_path, doc);
    ctx.add_output(csv_path);

    // Quality summary beyond the landmark analysis: external verdicts and
    // the age-band flip check (the latter is enforced at ingest).
    std::cout << "Groups: " << pf_dataset_n_groups(ds.get())
              << "  deepfake-flagged images: " << pf_dataset_n_flagged_images(ds.get())
              << "  unverified images: " << pf_dataset_n_unverified_images(ds.get())
              << "\nAge-band flip check: pass (enforced for all ingested groups)\n\n";
    std::cout << pfcli::render_pairshift_table(doc);
  });
}

struct CorrectArgs {
  DatasetArgs data;
  std::string condition = "all";
  int k_folds = 5;
  double test_fraction = 0.1;
  uint64_t seed = 0;
  int epochs = 2000;
  double learning_rate = 0.01;
  double l2 = 0.0;
  double if_normalizer = 16.0;
  std::string expert_assessor;
  std::string out = ".";
};

int cmd_correct(const CorrectArgs& args) {
  RunContext ctx("correct", args.out);
  add_dataset_inputs(ctx, args.data);
  ctx.manifest.seeds.push_back(args.seed);
  ctx.manifest.add_config("condition", args.condition);
  ctx.manifest.add_config("k_folds", static_cast<long long>(args.k_folds));
  ctx.manifest.add_config("test_fraction", args.test_fraction);
  ctx.manifest.add_config("seed", static_cast<long long>(args.seed));
  ctx.manifest.add_config("epochs", static_cast<long long>(args.epochs));
  ctx.manifest.add_config("learning_rate", args.learning_rate);
  ctx.manifest.add_config("l2", args.l2);
  ctx.manifest.add_config("if_normalizer", args.if_normalizer);
  ctx.manifest.add_config("expert_assessor", args.expert_assessor);
  ctx.manifest.add_config("include_flagged", bool_str(args.data.include_flagged));

  return run_command(ctx, [&] {
    std::vector<pf_condition> conditions;
    if (args.condition == "all") {
      conditions = {PF_COND_ORIGINAL, PF_COND_AVERAGE, PF_COND_AUTO, PF_COND_AVERAGE_AUTO};
    } else if (args.condition == "original") {
      conditions = {PF_COND_ORIGINAL};
    } else if (args.condition == "average") {
      conditions = {PF_COND_AVERAGE};
    } else if (args.condition == "auto") {
      conditions = {PF_COND_AUTO};
    } else if (args.condition == "average_auto") {
      conditions = {PF_COND_AVERAGE_AUTO};
    } else {
      throw CliFailure{"usage", "unknown condition '" + args.condition + "'", 2};
    }

    DatasetHandle ds(args.data);
    pf_correct_options options;
    pf_correct_options_default(&options);
    options.k_folds = args.k_folds;
    options.test_fraction = args.test_fraction;
    options.seed = args.seed;
    options.epochs = args.epochs;
    options.learning_rate = args.learning_rate;
    options.l2 = args.l2;
    options.if_normalizer = args.if_normalizer;
    options.expert_assessor = args.expert_assessor.empty() ? nullptr : args.expert_assessor.c_str();

    CsvDoc doc;
    doc.header = {"condition", "fold", "mse", "rmse", "if_raw", "if_pct"};
    std::vector<pf_metrics_row> rows(static_cast<size_t>(args.k_folds) + 1);
    for (pf_condition condition : conditions) {
      size_t n_rows = 0;
      check(pf_correct(ds.get(), condition, &options, rows.data(), &n_rows),
            "correction run");
      for (size_t i = 0; i < n_rows; ++i) {
        const pf_metrics_row& row = rows[i];
        doc.rows.push_back({row.condition,
                            row.fold == 0 ? "aggregate" : std::to_string(row.fold),
                            fmt_full(row.mse), fmt_full(row.rmse), fmt_full(row.if_raw),
                            fmt_full(row.if_pct)});
      }
    }
    std::string csv_path = ctx.out_path("metrics.csv");
    pfcli::write_csv(csv_path, doc);
    ctx.add_output(csv_path);
    std::cout << pfcli::render_metrics_table(doc);
  });
}

struct SimulateArgs {
  int subjects = 100;
  int assessors = 5;
  double beta_race = 0.0;
  double beta_age = 0.0;
  std::string au_bias;  // "au4=0.5,au6=-0.3"
  double noise_sd = 1.0;
  double landmark_noise_sd = 0.02;
  int n_landmarks = 20;
  uint64_t seed = 0;
  std::string out = ".";
};

bool parse_au_bias(const std::string& text, double profile[6]) {
  static const char* names[6] = {"au4", "au6", "au7", "au9", "au10", "au43"};
  std::string token;
  std::istringstream stream(text);
  while (std::getline(stream, token, ',')) {
    size_t eq = token.find('=');
    if (eq == std::string::npos) return false;
    std::string key = token.substr(0, eq);
    int index = -1;
    for (int k = 0; k < 6; ++k)
      if (key == names[k]) index = k;
    if (index < 0) return false;
    try {
      profile[index] = std::stod(token.substr(eq + 1));
    } catch (...) {
      return false;
    }
  }
  return true;
}

int cmd_simulate(const SimulateArgs& args) {
  RunContext ctx("simulate", args.out);
  ctx.manifest.seeds.push_back(args.seed);
  ctx.manifest.add_config("subjects", static_cast<long long>(args.subjects));
  ctx.manifest.add_config("assessors", static_cast<long long>(args.assessors));
  ctx.manifest.add_config("beta_race", args.beta_race);
  ctx.manifest.add_config("beta_age", args.beta_age);
  ctx.manifest.add_config("au_bias", args.au_bias);
  ctx.manifest.add_config("noise_sd", args.noise_sd);
  ctx.manifest.add_config("landmark_noise_sd", args.landmark_noise_sd);
  ctx.manifest.add_config("n_landmarks", static_cast<long long>(args.n_landmarks));
  ctx.manifest.add_config("seed", static_cast<long long>(args.seed));

  return run_command(ctx, [&] {
    pf_sim_config config;
    pf_sim_config_default(&config);
    config.n_subjects = args.subjects;
    config.assessors_per_image = args.assessors;
    config.beta_race = args.beta_race;
    config.beta_age = args.beta_age;
    if (!args.au_bias.empty()) {
      if (!parse_au_bias(args.au_bias, config.au_bias_profile))
        throw CliFailure{"usage", "cannot parse --au_bias '" + args.au_bias + "'", 2};
      config.has_au_bias_profile = 1;
    }
    config.noise_sd = args.noise_sd;
    config.landmark_noise_sd = args.landmark_noise_sd;
    config.n_landmarks = args.n_landmarks;
    config.seed = args.seed;

    check(pf_simulate(&config, args.out.c_str()), "simulation");
    for (const char* name : {"groups.csv", "records.csv", "landmarks.json",
                             "ground_truth.json"})
      ctx.add_output(ctx.out_path(name));

    pf_dataset* ds = nullptr;
    check(pf_simulate_open(&config, &ds), "simulation");
    std::cout << "Simulated " << pf_dataset_n_groups(ds) << " subjects ("
              << pf_dataset_n_groups(ds) * 4 << " images, " << pf_dataset_n_records(ds)
              << " assessments) into " << args.out << "\n";
    pf_dataset_close(ds);
  });
}

struct ReportArgs {
  std::string run_dir = ".";
  std::string out;
};

int cmd_report(const ReportArgs& args) {
  std::string out_dir = args.out.empty() ? args.run_dir : args.out;
  RunContext ctx("report", out_dir);
  ctx.manifest.add_config("run_dir", args.run_dir);

  return run_command(ctx, [&] {
    std::string text = "painfair report\n===============\n\n";
    bool any = false;

    struct Section {
      const char* file;
      std::string (*render)(const CsvDoc&);
    };
    const Section sections[] = {
        {"pairshift.csv", pfcli::render_pairshift_table},
        {"bias.csv", pfcli::render_bias_tables},
        {"ranking.csv", pfcli::render_ranking_table},
        {"au_tests.csv", pfcli::render_au_table},
        {"metrics.csv", pfcli::render_metrics_table},
    };
    for (const auto& section : sections) {
      std::string path = (std::filesystem::path(args.run_dir) / section.file).string();
      if (!pfcli::file_exists(path)) continue;
      ctx.add_input(path);
      text += section.render(pfcli::read_csv(path));
      any = true;
    }
    if (!any)
      throw CliFailure{"data", "no analysis artifacts found in " + args.run_dir +
                                   " (expected pairshift.csv, bias.csv, ranking.csv, "
                                   "au_tests.csv or metrics.csv)",
                       3};
    text += std::string(pfcli::star_legend()) + "\n";

    std::string report_path = ctx.out_path("report.txt");
    pfcli::write_file(report_path, text);
    ctx.add_output(report_path);
    std::cout << text;
  });
}

// ---------------------------------------------------------------- wiring

void add_common(CLI::App* cmd, std::string& out) {
  cmd->set_config("--config")->configurable(false);
  cmd->add_option("--out", out, "Output directory for artifacts and manifest.json")
      ->capture_default_str();
}

void add_dataset_options(CLI::App* cmd, DatasetArgs& args, bool landmarks_required = false) {
  cmd->add_option("--groups", args.groups, "groups.csv path")->required();
  cmd->add_option("--records", args.records, "records.csv path")->required();
  auto* lm = cmd->add_option("--landmarks", args.landmarks, "landmarks.json path");
  if (landmarks_required) lm->required();
  cmd->add_flag("--include_flagged,--include-flagged", args.include_flagged,
                "Keep records of deepfake-flagged images in the analysis");
}

void add_filter_options(CLI::App* cmd, FilterArgs& args) {
  cmd->add_option("--gender", args.gender, "Restrict to one gender")
      ->check(CLI::IsMember({"female", "male"}));
  cmd->add_option("--platform", args.platform, "Restrict to one platform")
      ->check(CLI::IsMember({"A", "B", "other"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counterfactual pain-assessment bias toolkit"};
  app.set_version_flag("--version", pf_version());
  app.require_subcommand(1);

  BiasArgs bias_args;
  auto* bias = app.add_subcommand("measure-bias", "Group-level bias in PSPI scores");
  add_common(bias, bias_args.out);
  add_dataset_options(bias, bias_args.data);
  add_filter_options(bias, bias_args.filter);
  bias->add_option("--attribute", bias_args.attribute, "race or age")
      ->required()
      ->check(CLI::IsMember({"race", "age"}));
  bias->add_flag("--paired", bias_args.paired,
                 "Paired-by-subject test on per-subject counterfactual means");

  RankArgs rank_args;
  auto* rank = app.add_subcommand("rank-groups", "Mean PSPI ranking of race x age cells");
  add_common(rank, rank_args.out);
  add_dataset_options(rank, rank_args.data);
  add_filter_options(rank, rank_args.filter);

  AuArgs au_args;
  auto* au = app.add_subcommand("au-tests", "Per-AU bias tests on raw intensities");
  add_common(au, au_args.out);
  add_dataset_options(au, au_args.data);
  add_filter_options(au, au_args.filter);
  au->add_option("--attribute", au_args.attribute, "race or age")
      ->required()
      ->check(CLI::IsMember({"race", "age"}));

  PairArgs pair_args;
  auto* pairs = app.add_subcommand("validate-pairs",
                                   "Landmark-shift validation of counterfactual pairs");
  add_common(pairs, pair_args.out);
  add_dataset_options(pairs, pair_args.data, /*landmarks_required=*/true);
  pairs->add_option("--alpha", pair_args.alpha, "Significance level")
      ->capture_default_str()
      ->check(CLI::Range(1e-9, 0.999999));

  CorrectArgs correct_args;
  auto* correct = app.add_subcommand("correct",
                                     "Label-correction training and fairness evaluation");
  add_common(correct, correct_args.out);
  add_dataset_options(correct, correct_args.data);
  correct->add_option("--condition", correct_args.condition,
                      "original, average, auto, average_auto or all")
      ->capture_default_str()
      ->check(CLI::IsMember({"original", "average", "auto", "average_auto", "all"}));
  correct->add_option("--k_folds,--k-folds,-k", correct_args.k_folds, "Fold count")
      ->capture_default_str();
  correct->add_option("--test_fraction,--test-fraction", correct_args.test_fraction,
                      "Held-out subject fraction per fold")
      ->capture_default_str();
  correct->add_option("--seed", correct_args.seed, "Root seed")->capture_default_str();
  correct->add_option("--epochs", correct_args.epochs, "Gradient-descent epoch budget")
      ->capture_default_str();
  correct->add_option("--learning_rate,--learning-rate", correct_args.learning_rate,
                      "Gradient-descent step size")
      ->capture_default_str();
  correct->add_option("--l2", correct_args.l2, "L2 penalty on weights")->capture_default_str();
  correct->add_option("--if_normalizer,--if-normalizer", correct_args.if_normalizer,
                      "Denominator for the individual-fairness percentage")
      ->capture_default_str();
  correct->add_option("--expert_assessor,--expert-assessor", correct_args.expert_assessor,
                      "Assessor id whose scores label the test set");

  SimulateArgs sim_args;
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic study with known bias");
  add_common(sim, sim_args.out);
  sim->add_option("--subjects", sim_args.subjects, "Subject count")->capture_default_str();
  sim->add_option("--assessors", sim_args.assessors, "Assessments per image")
      ->capture_default_str();
  sim->add_option("--beta_race,--beta-race", sim_args.beta_race,
                  "PSPI-scale bias toward White-perceived images")
      ->capture_default_str();
  sim->add_option("--beta_age,--beta-age", sim_args.beta_age,
                  "PSPI-scale bias toward Senior-perceived images")
      ->capture_default_str();
  sim->add_option("--au_bias,--au-bias", sim_args.au_bias,
                  "Per-AU race shifts, e.g. au4=0.5,au6=-0.3 (replaces beta_race)");
  sim->add_option("--noise_sd,--noise-sd", sim_args.noise_sd, "Observation noise sd")
      ->capture_default_str();
  sim->add_option("--landmark_noise_sd,--landmark-noise-sd", sim_args.landmark_noise_sd,
                  "Landmark jitter sd")
      ->capture_default_str();
  sim->add_option("--n_landmarks,--n-landmarks", sim_args.n_landmarks, "Landmarks per image")
      ->capture_default_str();
  sim->add_option("--seed", sim_args.seed, "Root seed")->capture_default_str();

  ReportArgs report_args;
  auto* report = app.add_subcommand("report", "Combined report from stored run artifacts");
  report->set_config("--config")->configurable(false);
  report->add_option("--run", report_args.run_dir, "Directory holding analysis artifacts")
      ->capture_default_str();
  report->add_option("--out", report_args.out,
                     "Output directory (defaults to the run directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << pfcli::error_json("usage", e.what()) << "\n";
    return 2;
  }

  if (bias->parsed()) return cmd_measure_bias(bias_args);
  if (rank->parsed()) return cmd_rank_groups(rank_args);
  if (au->parsed()) return cmd_au_tests(au_args);
  if (pairs->parsed()) return cmd_validate_pairs(pair_args);
  if (correct->parsed()) return cmd_correct(correct_args);
  if (sim->parsed()) return cmd_simulate(sim_args);
  if (report->parsed()) return cmd_report(report_args);
  return 2;
}
