#pragma once

#include <array>
#include <vector>

#include "core/dataset.hpp"
#include "core/types.hpp"

namespace painfair {

// Mean Euclidean distance between matched landmark points. Mean (not sum) so
// values stay comparable across landmark-set cardinalities.
double landmark_distance(const LandmarkSet& a, const LandmarkSet& b);

struct ConditionShift {
  VariantTag condition = VariantTag::S;  // S, A or SA
  double mean_distance = 0.0;
  long long n = 0;
};

struct PairwiseShiftTest {
  VariantTag condition_a = VariantTag::S;
  VariantTag condition_b = VariantTag::A;
  double t_stat = 0.0;
  double df = 0.0;
  double p_value = 1.0;
  bool testable = true;
};

// Landmark-shift analysis: per-group distance from the original to each
// manipulated condition, and pairwise Welch tests between the three
// condition-distance samples.
struct PairShiftReport {
  double alpha = 0.05;
  long long n_groups = 0;
  std::array<ConditionShift, 3> per_condition;  // S, A, SA
  std::vector<PairwiseShiftTest> pairwise;
  bool any_significant = false;
  // Set when a pairwise test was degenerate (identical distances within both
  // conditions); such pairs are reported as no evidence of shift.
  bool degenerate_warning = false;
};

PairShiftReport pair_shift_report(const Dataset& dataset, double alpha = 0.05);

}  // namespace painfair
