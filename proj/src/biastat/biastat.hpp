#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/dataset.hpp"
#include "core/types.hpp"
#include "stats/stats.hpp"

namespace painfair {

enum class Attribute : int { Race = 0, Age = 1 };

const char* to_string(Attribute a);

// Optional record filter; empty optionals mean "all".
struct Filter {
  std::optional<Gender> gender;
  std::optional<Platform> platform;
};

struct MeanStat {
  double mean = 0.0;
  long long n = 0;
  double se = 0.0;  // standard error of the mean
};

// Group-level comparison of per-record PSPI. For Race, group_a is Black and
// group_b is White; for Age, group_a is Senior and group_b is Young, so a
// negative race diff and a positive age diff both mean higher scores for the
// historically favored level.
struct BiasEstimate {
  Attribute attribute = Attribute::Race;
  MeanStat group_a;
  MeanStat group_b;
  double diff = 0.0;     // group_a.mean - group_b.mean (paired: mean of subject diffs)
  double diff_se = 0.0;
  double t_stat = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  std::optional<double> pct_bias;  // percent, |diff| / min(mean), only when min > 0
  bool paired = false;
};

// Two-sample Welch comparison by default. With paired = true, compares
// per-subject counterfactual means (each subject contributes one difference
// of its two same-level image means) with a one-sample t test.
BiasEstimate bias_estimate(const Dataset& dataset, Attribute attribute,
                           const Filter& filter = {}, bool paired = false);

struct RankedCell {
  Race race = Race::White;
  AgeBand age_band = AgeBand::Senior;
  double mean_pspi = 0.0;
  long long n = 0;
};

std::string cell_label(Race race, AgeBand age_band);

// All four race x age cells ordered by descending mean PSPI. Exact ties keep
// the fixed cell order (White before Black, Senior before Young) and set
// tie_flag.
struct GroupRanking {
  std::vector<RankedCell> cells;
  bool tie_flag = false;
};

GroupRanking rank_groups(const Dataset& dataset, const Filter& filter = {});

struct AuTestRow {
  int au_index = 0;  // into kAuNames
  double t_stat = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  bool testable = true;  // false when the AU is degenerate in both groups
};

// One Welch test per AU field on raw intensities, same group convention as
// bias_estimate.
std::vector<AuTestRow> au_level_tests(const Dataset& dataset, Attribute attribute,
                                      const Filter& filter = {});

// Per-record PSPI values pooled by attribute level (level_a = Black or
// Senior side). Exposed for reuse by the pair validator and the simulator's
// recovery report.
void pooled_pspi(const Dataset& dataset, Attribute attribute, const Filter& filter,
                 std::vector<double>& level_a, std::vector<double>& level_b);

}  // namespace painfair
