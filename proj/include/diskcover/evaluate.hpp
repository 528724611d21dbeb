#pragma once

#include <span>
#include <vector>

#include "diskcover/fitter.hpp"
#include "diskcover/metrics.hpp"

namespace diskcover {

/// One fitted instance, scored against gts[k] for fits[k]. Each pair is its
/// own image, the prediction is the thresholded raw field at `alpha`, and its
/// score is 1 - final loss (clamped to [0, 1]).
struct FittedInstance {
  FitResult fit;
  int category = 0;
};

EvalReport evaluate_fits(std::span<const FittedInstance> fits, std::span<const BinaryMask> gts, double alpha);

/// The scored prediction evaluate_fits derives from one fit.
ScoredInstance prediction_from_fit(const FitResult& fit, int category, int image, int width, int height, double alpha);

}  // namespace diskcover
