#pragma once

// Pixel-loop kernels behind rendering and gradient accumulation. Each kernel
// has a serial and an OpenMP variant; both accumulate in the same fixed order
// (per-row partials, rows merged top to bottom), so their outputs are
// bit-identical regardless of the thread count.

#include <cstddef>
#include <span>
#include <vector>

#include "diskcover/types.hpp"

namespace diskcover::kernels {

enum class Exec { serial, parallel };

/// Per-disk separable Gaussian factors sampled at pixel centers:
///   gx[i*W + c] = exp(-(c + 0.5 - x_i)^2 / (2 sigma_i^2)), likewise gy over rows,
/// so disk i contributes gx[i, c] * gy[i, r] to pixel (c, r).
struct SeparableFactors {
  int width = 0;
  int height = 0;
  std::size_t n_disks = 0;
  std::vector<double> gx;
  std::vector<double> gy;
  std::vector<double> dx;  // c + 0.5 - x_i
  std::vector<double> dy;  // r + 0.5 - y_i
  std::vector<double> inv_var;  // 1 / sigma_i^2 per disk
};

SeparableFactors make_factors(const DiskSet& disks, int width, int height);

/// out[r*W + c] = sum_i gx[i, c] * gy[i, r], summed in disk order.
void accumulate_field(const SeparableFactors& f, std::span<double> out, Exec exec);

/// For per-pixel weights w = dL/df, returns 3N moments per disk i:
///   [3i+0] = sum_k w_k g_ik dx_k
///   [3i+1] = sum_k w_k g_ik dy_k
///   [3i+2] = sum_k w_k g_ik (dx_k^2 + dy_k^2)
/// from which dL/dx_i = m0/sigma^2, dL/dy_i = m1/sigma^2, dL/dlog(sigma) = m2/sigma^2.
std::vector<double> reduce_disk_moments(const SeparableFactors& f, std::span<const double> weights,
                                        Exec exec);

/// Sums `values` row by row, then merges the row sums top to bottom.
double ordered_sum(std::span<const double> values, int width, Exec exec);

}  // namespace diskcover::kernels
