#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "diskcover/types.hpp"

namespace diskcover {

struct GradCheckCase {
  int n_disks = 0;
  int n_radii = 0;
  LossKind loss = LossKind::dice;
  int width = 0;
  int height = 0;
  double max_rel_error = 0.0;
  std::string worst_param;
};

struct GradCheckReport {
  std::vector<GradCheckCase> cases;
  double max_rel_error = 0.0;
};

/// Denominator floor for relative errors: components whose analytic and
/// numeric values are both below it are compared absolutely against it.
inline constexpr double kGradRelFloor = 1e-6;

/// Compares loss_and_gradient against central differences on `trials`
/// seeded random configurations cycling through N in {1,2,4,16}, M in {1,N}
/// and both losses, on grids of 16..max_size pixels per side.
GradCheckReport run_grad_check(std::uint64_t seed, int trials, double h, int max_size = 96);

}  // namespace diskcover
