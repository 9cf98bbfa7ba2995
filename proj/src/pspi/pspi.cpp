#include "pspi/pspi.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace painfair {

int pspi_score(const AuVector& au) {
  if (!au.valid()) throw ArgumentError("pspi_score: AU vector out of range");
  return au.au4 + std::max(au.au6, au.au7) + std::max(au.au9, au.au10) + au.au43;
}

double mean_pspi(const Dataset& dataset, const std::string& image_id) {
  if (!dataset.has_image(image_id)) throw InvariantError("unknown image_id " + image_id);
  const auto& indices = dataset.records_for(image_id);
  double sum = 0.0;
  long long n = 0;
  for (size_t idx : indices) {
    if (!dataset.record_included(idx)) continue;
    sum += pspi_score(dataset.records()[idx].au);
    ++n;
  }
  if (n == 0) throw InvariantError("no included records for image " + image_id);
  return sum / static_cast<double>(n);
}

}  // namespace painfair
