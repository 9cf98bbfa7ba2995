#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "biastat/biastat.hpp"
#include "core/dataset.hpp"

namespace painfair {

// Synthetic correspondence-study generator with known, injectable bias.
struct SimConfig {
  int n_subjects = 100;
  int assessors_per_image = 5;
  // Additive PSPI-scale observation bias toward White-perceived images.
  double beta_race = 0.0;
  // Additive PSPI-scale observation bias toward Senior-perceived images.
  double beta_age = 0.0;
  // Optional per-AU signed shifts along the race axis (positive = White
  // scored higher on that AU). When set, replaces the AU4 realization of
  // beta_race; beta_age still applies.
  std::optional<std::array<double, 6>> au_bias_profile;
  double noise_sd = 1.0;
  double landmark_noise_sd = 0.02;
  int n_landmarks = 20;
  uint64_t seed = 0;

  void validate() const;
};

struct SubjectTruth {
  std::string subject_id;
  std::array<double, 6> latent_au{};  // au43 slot is a latent in [0,1]
  std::vector<std::array<double, 2>> landmark_template;
};

struct GroundTruth {
  SimConfig config;
  std::vector<SubjectTruth> subjects;
};

struct SimResult {
  Dataset dataset;
  GroundTruth truth;
};

// Deterministic given config.seed. Bias is applied to the assessor's
// observation, never to the subject's latent state, so the latent PSPI of all
// four variants of a subject is identical by construction.
SimResult simulate(const SimConfig& config);

void write_ground_truth(const GroundTruth& truth, const std::string& path);
GroundTruth read_ground_truth(const std::string& path);

struct RecoveryRow {
  Attribute axis = Attribute::Race;
  double injected = 0.0;
  double estimated = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool covered = true;  // injected value inside the 95% CI
};

// Compares measured bias against the injected parameters. Estimates are
// oriented the same way as the config betas (toward White, toward Senior).
std::vector<RecoveryRow> recovery_report(const Dataset& dataset, const GroundTruth& truth);

}  // namespace painfair
