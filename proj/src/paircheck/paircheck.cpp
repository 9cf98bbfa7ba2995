#include "paircheck/paircheck.hpp"

#include <cmath>
#include <string>

#include "core/error.hpp"
#include "stats/stats.hpp"

namespace painfair {

double landmark_distance(const LandmarkSet& a, const LandmarkSet& b) {
  if (a.points.empty() || b.points.empty())
    throw ArgumentError("landmark_distance: empty landmark set");
  if (a.points.size() != b.points.size())
    throw ArgumentError("landmark_distance: cardinality mismatch (" +
                        std::to_string(a.points.size()) + " vs " +
                        std::to_string(b.points.size()) + ")");
  double sum = 0.0;
  for (size_t i = 0; i < a.points.size(); ++i) {
    double dx = a.points[i][0] - b.points[i][0];
    double dy = a.points[i][1] - b.points[i][1];
    sum += std::sqrt(dx * dx + dy * dy);
  }
  return sum / static_cast<double>(a.points.size());
}

PairShiftReport pair_shift_report(const Dataset& dataset, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must be in (0,1)");

  const std::array<VariantTag, 3> conditions = {VariantTag::S, VariantTag::A, VariantTag::SA};
  std::array<std::vector<double>, 3> distances;

  long long n_groups = 0;
  for (const auto& g : dataset.groups()) {
    if (!dataset.group_included(g)) continue;
    ++n_groups;
    auto landmarks_of = [&](VariantTag tag) -> const LandmarkSet& {
      const std::string& id = g.variant(tag).image_id;
      auto it = dataset.landmarks().find(id);
      if (it == dataset.landmarks().end())
        throw InvariantError("missing landmarks for image " + id + " (group " + g.subject_id +
                             ")");
      return it->second;
    };
    const LandmarkSet& original = landmarks_of(VariantTag::I);
    for (size_t c = 0; c < conditions.size(); ++c)
      distances[c].push_back(landmark_distance(original, landmarks_of(conditions[c])));
  }
  if (n_groups == 0) throw InvariantError("pair_shift_report: no included groups");

  PairShiftReport report;
  report.alpha = alpha;
  report.n_groups = n_groups;
  for (size_t c = 0; c < conditions.size(); ++c) {
    report.per_condition[c].condition = conditions[c];
    report.per_condition[c].n = static_cast<long long>(distances[c].size());
    report.per_condition[c].mean_distance = mean(distances[c]);
  }

  for (size_t i = 0; i < conditions.size(); ++i) {
    for (size_t j = i + 1; j < conditions.size(); ++j) {
      PairwiseShiftTest test;
      test.condition_a = conditions[i];
      test.condition_b = conditions[j];
      try {
        WelchResult w = welch_t(distances[i], distances[j]);
        test.t_stat = w.t;
        test.df = w.df;
        test.p_value = two_sided_p(w.t, w.df);
      } catch (const Error&) {
        // t is undefined when distances are constant within both conditions;
        // treated as no evidence of shift.
        test.testable = false;
        test.p_value = 1.0;
        report.degenerate_warning = true;
      }
      if (test.testable && test.p_value < alpha) report.any_significant = true;
      report.pairwise.push_back(test);
    }
  }
  return report;
}

}  // namespace painfair
