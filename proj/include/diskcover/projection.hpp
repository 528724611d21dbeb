#pragma once

#include "diskcover/kernels.hpp"
#include "diskcover/types.hpp"

namespace diskcover {

struct RenderParams {
  int width = 0;
  int height = 0;
  double alpha = 0.5;
};

/// Sum of the disks' Gaussian bumps sampled at pixel centers. Values lie in
/// (0, N] up to underflow far from every disk.
ScalarField gaussian_field(const DiskSet& disks, int width, int height,
                           kernels::Exec exec = kernels::Exec::parallel);

/// Element-wise tanh; maps [0, inf) into [0, 1).
ScalarField normalize_tanh(const ScalarField& field);

/// 1 where field >= alpha. Intended for the raw (un-normalized) field.
BinaryMask threshold_mask(const ScalarField& field, double alpha);

/// Thresholded raw field of `disks` on the given grid.
BinaryMask render_mask(const DiskSet& disks, const RenderParams& params);

/// Radius at which an isolated disk's field crosses alpha: sigma * sqrt(2 ln(1/alpha)).
double effective_radius(double sigma, double alpha);

}  // namespace diskcover
