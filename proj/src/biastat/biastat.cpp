#include "biastat/biastat.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "pspi/pspi.hpp"

namespace painfair {

namespace {

bool filter_matches(const Dataset& ds, const AssessmentRecord& rec, const ImageMeta& img,
                    const Filter& filter) {
  (void)ds;
  if (filter.gender && img.gender != *filter.gender) return false;
  if (filter.platform && rec.platform != *filter.platform) return false;
  return true;
}

// Whether an image sits on the "a" side of the attribute (Black for race,
// Senior for age).
bool is_level_a(const ImageMeta& img, Attribute attribute) {
  if (attribute == Attribute::Race) return img.race == Race::Black;
  return img.age_band == AgeBand::Senior;
}

MeanStat make_mean_stat(std::span<const double> xs) {
  MeanStat s;
  s.n = static_cast<long long>(xs.size());
  s.mean = mean(xs);
  s.se = xs.size() >= 2 ? std::sqrt(sample_variance(xs) / static_cast<double>(xs.size())) : 0.0;
  return s;
}

}  // namespace

const char* to_string(Attribute a) { return a == Attribute::Race ? "Race" : "Age"; }

void pooled_pspi(const Dataset& dataset, Attribute attribute, const Filter& filter,
                 std::vector<double>& level_a, std::vector<double>& level_b) {
  level_a.clear();
  level_b.clear();
  for (size_t i = 0; i < dataset.records().size(); ++i) {
    if (!dataset.record_included(i)) continue;
    const AssessmentRecord& rec = dataset.records()[i];
    const ImageMeta& img = dataset.image(rec.image_id);
    if (!filter_matches(dataset, rec, img, filter)) continue;
    double score = pspi_score(rec.au);
    (is_level_a(img, attribute) ? level_a : level_b).push_back(score);
  }
}

BiasEstimate bias_estimate(const Dataset& dataset, Attribute attribute, const Filter& filter,
                           bool paired) {
  std::vector<double> a, b;
  pooled_pspi(dataset, attribute, filter, a, b);
  if (a.empty() || b.empty())
    throw InvariantError(std::string("bias_estimate: empty ") +
                         (a.empty() ? "first" : "second") + " group for attribute " +
                         to_string(attribute) + " after filtering");

  BiasEstimate est;
  est.attribute = attribute;
  est.group_a = make_mean_stat(a);
  est.group_b = make_mean_stat(b);
  est.paired = paired;

  if (!paired) {
    WelchResult w = welch_t(a, b);
    est.diff = est.group_a.mean - est.group_b.mean;
    est.diff_se = std::sqrt(est.group_a.se * est.group_a.se + est.group_b.se * est.group_b.se);
    est.t_stat = w.t;
    est.df = w.df;
  } else {
    // One difference per subject: mean of its two level-a image means minus
    // mean of its two level-b image means.
    std::vector<double> diffs;
    for (const auto& g : dataset.groups()) {
      if (!dataset.group_included(g)) continue;
      double sum_a = 0.0, sum_b = 0.0;
      int na = 0, nb = 0;
      bool usable = true;
      for (VariantTag tag : kAllVariants) {
        const ImageMeta& img = g.variant(tag);
        double sum = 0.0;
        int n = 0;
        for (size_t idx : dataset.records_for(img.image_id)) {
          if (!dataset.record_included(idx)) continue;
          const AssessmentRecord& rec = dataset.records()[idx];
          if (!filter_matches(dataset, rec, img, filter)) continue;
          sum += pspi_score(rec.au);
          ++n;
        }
        if (n == 0) {
          usable = false;
          break;
        }
        if (is_level_a(img, attribute)) {
          sum_a += sum / n;
          ++na;
        } else {
          sum_b += sum / n;
          ++nb;
        }
      }
      if (!usable || na == 0 || nb == 0) continue;
      diffs.push_back(sum_a / na - sum_b / nb);
    }
    if (diffs.size() < 2)
      throw InvariantError("bias_estimate: fewer than two subjects usable for the paired test");
    WelchResult w = paired_t(diffs);
    est.diff = mean(diffs);
    est.diff_se = std::sqrt(sample_variance(diffs) / static_cast<double>(diffs.size()));
    est.t_stat = w.t;
    est.df = w.df;
  }
  est.p_value = two_sided_p(est.t_stat, est.df);
  double lesser = std::min(est.group_a.mean, est.group_b.mean);
  if (lesser > 0.0) est.pct_bias = 100.0 * std::fabs(est.diff) / lesser;
  return est;
}

std::string cell_label(Race race, AgeBand age_band) {
  return std::string(to_string(race)) + to_string(age_band);
}

GroupRanking rank_groups(const Dataset& dataset, const Filter& filter) {
  // Fixed cell order doubles as the tie-break order.
  const std::array<std::pair<Race, AgeBand>, 4> cell_order = {{
      {Race::White, AgeBand::Senior},
      {Race::White, AgeBand::Young},
      {Race::Black, AgeBand::Senior},
      {Race::Black, AgeBand::Young},
  }};

  std::array<double, 4> sum{};
  std::array<long long, 4> count{};
  for (size_t i = 0; i < dataset.records().size(); ++i) {
    if (!dataset.record_included(i)) continue;
    const AssessmentRecord& rec = dataset.records()[i];
    const ImageMeta& img = dataset.image(rec.image_id);
    if (!filter_matches(dataset, rec, img, filter)) continue;
    for (size_t c = 0; c < 4; ++c) {
      if (img.race == cell_order[c].first && img.age_band == cell_order[c].second) {
        sum[c] += pspi_score(rec.au);
        ++count[c];
        break;
      }
    }
  }

  GroupRanking ranking;
  for (size_t c = 0; c < 4; ++c) {
    if (count[c] == 0)
      throw InvariantError("rank_groups: empty cell " +
                           cell_label(cell_order[c].first, cell_order[c].second));
    ranking.cells.push_back(RankedCell{cell_order[c].first, cell_order[c].second,
                                       sum[c] / static_cast<double>(count[c]), count[c]});
  }
  std::stable_sort(ranking.cells.begin(), ranking.cells.end(),
                   [](const RankedCell& x, const RankedCell& y) { return x.mean_pspi > y.mean_pspi; });
  for (size_t c = 1; c < ranking.cells.size(); ++c)
    if (ranking.cells[c].mean_pspi == ranking.cells[c - 1].mean_pspi) ranking.tie_flag = true;
  return ranking;
}

std::vector<AuTestRow> au_level_tests(const Dataset& dataset, Attribute attribute,
                                      const Filter& filter) {
  std::array<std::vector<double>, 6> a, b;
  bool any = false;
  for (size_t i = 0; i < dataset.records().size(); ++i) {
    if (!dataset.record_included(i)) continue;
    const AssessmentRecord& rec = dataset.records()[i];
    const ImageMeta& img = dataset.image(rec.image_id);
    if (!filter_matches(dataset, rec, img, filter)) continue;
    any = true;
    auto au = rec.au.as_array();
    auto& side = is_level_a(img, attribute) ? a : b;
    for (int k = 0; k < 6; ++k) side[k].push_back(au[k]);
  }
  if (!any || a[0].empty() || b[0].empty())
    throw InvariantError("au_level_tests: empty group for attribute " +
                         std::string(to_string(attribute)) + " after filtering");

  std::vector<AuTestRow> rows;
  for (int k = 0; k < 6; ++k) {
    AuTestRow row;
    row.au_index = k;
    try {
      WelchResult w = welch_t(a[k], b[k]);
      row.t_stat = w.t;
      row.df = w.df;
      row.p_value = two_sided_p(w.t, w.df);
    } catch (const Error&) {
      // Degenerate AU (constant in both groups): reported as untestable.
      row.testable = false;
      row.t_stat = 0.0;
      row.df = 0.0;
      row.p_value = 1.0;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace painfair
