#pragma once

#include <string>

#include "core/dataset.hpp"
#include "core/types.hpp"

namespace painfair {

// Prkachin-Solomon Pain Intensity:
//   AU4 + max(AU6, AU7) + max(AU9, AU10) + AU43, integer in [0, 16].
int pspi_score(const AuVector& au);

// Unweighted mean per-record PSPI over the image's included assessments.
double mean_pspi(const Dataset& dataset, const std::string& image_id);

}  // namespace painfair
