#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "diskcover/types.hpp"

namespace diskcover {

/// |a ∧ b| / |a ∨ b|; two empty masks give 1.
double iou(const BinaryMask& a, const BinaryMask& b);

/// 2|a ∧ b| / (|a| + |b|); two empty masks give 1.
double dice_coefficient(const BinaryMask& a, const BinaryMask& b);

struct ScoredInstance {
  BinaryMask mask;
  double score = 1.0;
  int category = 0;
  int image = 0;  // predictions only match ground truths of the same image
};

struct GroundTruthInstance {
  BinaryMask mask;
  int category = 0;
  int image = 0;
};

/// The COCO IoU ladder 0.50, 0.55, ..., 0.95.
std::vector<double> default_iou_thresholds();

struct ThresholdStats {
  double threshold = 0.0;
  double ap = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
};

struct CategoryReport {
  int category = 0;
  double ap = 0.0;    // mean over thresholds
  double ap50 = 0.0;  // the 0.50 entry (or the first threshold if 0.50 is absent)
  std::vector<ThresholdStats> per_threshold;
};

struct EvalReport {
  std::vector<CategoryReport> categories;  // ascending category id
  double mean_ap = 0.0;
  double mean_ap50 = 0.0;
  std::size_t dropped_empty_predictions = 0;

  /// Columns: category,AP,AP50,TP,FP,FN (counts at IoU 0.50), values x100 to 4 decimals.
  std::string to_csv() const;
  std::string to_json() const;
};

/// Greedy score-ordered matching per category and threshold (ties in score
/// keep insertion order; ties in IoU go to the lowest gt index), precision
/// made monotone and sampled at 101 recall points. Categories with neither
/// predictions nor ground truths are skipped; empty predicted masks are
/// dropped and counted in the report.
EvalReport average_precision(std::span<const ScoredInstance> preds, std::span<const GroundTruthInstance> gts,
                             std::span<const double> thresholds);

EvalReport average_precision(std::span<const ScoredInstance> preds, std::span<const GroundTruthInstance> gts);

}  // namespace diskcover
