#pragma once

#include <functional>
#include <span>
#include <vector>

#include "diskcover/kernels.hpp"
#include "diskcover/types.hpp"

namespace diskcover {

/// Lower/upper clamp applied to probabilities before taking logs in BCE.
inline constexpr double kProbClamp = 1e-7;

struct GradientVector {
  std::vector<Point> d_centers;       // dL/dx_i, dL/dy_i
  std::vector<double> d_log_sigmas;   // dL/dlog(sigma_j)

  /// Same layout as pack_params: x0, y0, x1, y1, ..., log sigma_0, ...
  std::vector<double> flatten() const;
};

/// Mean pixel binary cross-entropy of pred (in [0,1)) against gt.
double bce_loss(const ScalarField& pred, const BinaryMask& gt);

/// 1 - 2*sum(z p) / (sum z + sum p + epsilon).
double dice_loss(const ScalarField& pred, const BinaryMask& gt, double epsilon);

/// kind(tanh(gaussian_field(disks))) against gt on gt's grid.
double loss_value(const DiskSet& disks, const BinaryMask& gt, LossKind kind, double epsilon,
                  kernels::Exec exec = kernels::Exec::parallel);

struct LossAndGradient {
  double loss = 0.0;
  GradientVector gradient;
};

/// Loss and its exact analytic gradient with respect to centers and log
/// sigmas. Gradients of centers sharing a sigma are summed into that sigma.
/// Throws NonFinite naming the first offending parameter.
LossAndGradient loss_and_gradient(const DiskSet& disks, const BinaryMask& gt, LossKind kind,
                                  double epsilon, kernels::Exec exec = kernels::Exec::parallel);

/// width/height must equal gt's dimensions.
GradientVector loss_gradient(const DiskSet& disks, const BinaryMask& gt, LossKind kind, double epsilon,
                             int width, int height);

/// Central differences (L(t+h) - L(t-h)) / 2h per parameter; sigmas are
/// perturbed in log space.
GradientVector finite_difference_gradient(const DiskSet& disks, const BinaryMask& gt, LossKind kind,
                                          double epsilon, double h);

/// Central differences of an arbitrary scalar function.
std::vector<double> finite_difference_gradient(
    const std::function<double(std::span<const double>)>& fn, std::span<const double> params, double h);

std::vector<double> pack_params(const DiskSet& disks);
DiskSet unpack_params(std::span<const double> params, std::span<const int> assoc);

/// |a - b| / max(|a|, |b|, floor).
double relative_error(double a, double b, double floor);

}  // namespace diskcover
