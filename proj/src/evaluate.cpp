#include "diskcover/evaluate.hpp"

#include <algorithm>

#include "diskcover/projection.hpp"

namespace diskcover {

ScoredInstance prediction_from_fit(const FitResult& fit, int category, int image, int width, int height,
                                   double alpha) {
  return {render_mask(fit.disks, {width, height, alpha}), std::clamp(1.0 - fit.final_loss, 0.0, 1.0), category,
          image};
}

EvalReport evaluate_fits(std::span<const FittedInstance> fits, std::span<const BinaryMask> gts, double alpha) {
  if (fits.size() != gts.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(fits.size()) + " fits for " +
                                                  std::to_string(gts.size()) + " ground truths");
  }
  std::vector<ScoredInstance> preds;
  std::vector<GroundTruthInstance> truths;
  for (std::size_t k = 0; k < fits.size(); ++k) {
    const int image = static_cast<int>(k);
    preds.push_back(prediction_from_fit(fits[k].fit, fits[k].category, image, gts[k].width(), gts[k].height(), alpha));
    truths.push_back({gts[k], fits[k].category, image});
  }
  return average_precision(preds, truths);
}

}  // namespace diskcover
