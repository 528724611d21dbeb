#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diskcover/types.hpp"

namespace diskcover {

struct FitResult {
  DiskSet disks;                    // best-loss iterate
  std::vector<double> loss_trace;   // loss of the iterate evaluated at each step
  double final_loss = 0.0;          // min(loss_trace)
  double final_iou = 0.0;           // IoU of the thresholded raw field vs gt at config.alpha
  int iterations_used = 0;
  std::uint64_t seed = 0;           // seed of the winning restart
  double wall_time = 0.0;           // seconds, all restarts
};

/// Farthest-point initialization over the foreground pixels. The first center
/// is the foreground pixel nearest the foreground centroid; each next center
/// maximizes its distance to those already chosen (ties: lowest row-major
/// index). Centers then receive a seeded jitter of at most 0.2 px per axis.
/// Every sigma starts at sqrt(area / (N pi)), clamped to >= 0.5 px.
/// Throws EmptyMask on an all-zero mask.
DiskSet init_disks(const BinaryMask& gt, const FitConfig& config);

/// Adaptive-moment descent on loss(tanh(field)) from init_disks, keeping the
/// best-loss iterate. With restarts > 1, restart r uses seed + r and the
/// result with the highest final_iou wins (earliest on ties).
FitResult fit(const BinaryMask& gt, const FitConfig& config);

struct FitOutcome {
  std::optional<FitResult> result;
  std::optional<ErrorCode> error;
  std::string message;

  bool ok() const noexcept { return result.has_value(); }
};

/// Independent fits, one per mask, in input order. Runs masks concurrently
/// when `parallel` is set; the results equal the sequential run.
std::vector<FitOutcome> fit_corpus(std::span<const BinaryMask> masks, const FitConfig& config,
                                   bool parallel = true);

struct AblationRow {
  int n_disks = 0;
  int n_radii = 0;
  LossKind loss = LossKind::dice;
  double mean_iou = 0.0;
  double mean_dice = 0.0;
  double mean_time = 0.0;
  std::size_t fitted = 0;
  std::size_t failed = 0;
  std::string note;  // per-cell error annotations
};

struct AblationReport {
  std::vector<AblationRow> rows;  // config-grid order

  /// n_disks,n_radii,loss,mean_iou,mean_dice,mean_time,fitted,failed,note.
  /// Without `timing` the mean_time column holds NA, which keeps the file a
  /// pure function of the inputs.
  std::string to_csv(bool timing = false) const;
  /// Tab-separated, one row per config, for plotting.
  std::string to_tsv(bool timing = false) const;
};

AblationReport ablate(std::span<const BinaryMask> masks, std::span<const FitConfig> grid, bool parallel = true);

}  // namespace diskcover
