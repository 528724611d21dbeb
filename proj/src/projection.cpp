#include "diskcover/projection.hpp"

#include <cmath>

namespace diskcover {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 1]");
}

}  // namespace

ScalarField gaussian_field(const DiskSet& disks, int width, int height, kernels::Exec exec) {
  const kernels::SeparableFactors f = kernels::make_factors(disks, width, height);
  std::vector<double> out(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
  kernels::accumulate_field(f, out, exec);
  return ScalarField(width, height, std::move(out));
}

ScalarField normalize_tanh(const ScalarField& field) {
  std::vector<double> out(field.data().begin(), field.data().end());
  for (double& v : out) v = std::tanh(v);
  return ScalarField(field.width(), field.height(), std::move(out));
}

BinaryMask threshold_mask(const ScalarField& field, double alpha) {
  // Any positive level is meaningful here; the field can exceed 1.
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::InvalidArgument, "threshold must be positive");
  std::vector<std::uint8_t> out(field.size());
  const auto values = field.data();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = values[k] >= alpha ? 1 : 0;
  return BinaryMask(field.width(), field.height(), std::move(out));
}

BinaryMask render_mask(const DiskSet& disks, const RenderParams& params) {
  return threshold_mask(gaussian_field(disks, params.width, params.height), params.alpha);
}

double effective_radius(double sigma, double alpha) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma must be positive");
  if (alpha == 0.0) throw Error(ErrorCode::InvalidArgument, "alpha = 0 gives an infinite radius");
  check_alpha(alpha);
  return sigma * std::sqrt(2.0 * std::log(1.0 / alpha));
}

}  // namespace diskcover
