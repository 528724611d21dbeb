#include "diskcover/kernels.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace diskcover::kernels {
namespace {

// Below this many pixel-disk products the fork/join overhead dominates.
constexpr std::size_t kParallelWork = 1U << 14;

bool go_parallel(Exec exec, std::size_t work) {
#ifdef _OPENMP
  return exec == Exec::parallel && work >= kParallelWork && !omp_in_parallel();
#else
  (void)exec;
  (void)work;
  return false;
#endif
}

void field_row(const SeparableFactors& f, int r, double* row) {
  const auto w = static_cast<std::size_t>(f.width);
  const auto h = static_cast<std::size_t>(f.height);
  for (std::size_t c = 0; c < w; ++c) row[c] = 0.0;
  for (std::size_t i = 0; i < f.n_disks; ++i) {
    const double ry = f.gy[i * h + static_cast<std::size_t>(r)];
    const double* gx = &f.gx[i * w];
    for (std::size_t c = 0; c < w; ++c) row[c] += gx[c] * ry;
  }
}

void moment_row(const SeparableFactors& f, std::span<const double> weights, int r, double* out) {
  const auto w = static_cast<std::size_t>(f.width);
  const auto h = static_cast<std::size_t>(f.height);
  const double* wr = &weights[static_cast<std::size_t>(r) * w];
  for (std::size_t i = 0; i < f.n_disks; ++i) {
    const double ry = f.gy[i * h + static_cast<std::size_t>(r)];
    const double dy = f.dy[i * h + static_cast<std::size_t>(r)];
    const double* gx = &f.gx[i * w];
    const double* dx = &f.dx[i * w];
    double a = 0.0;
    double b = 0.0;
    double c2 = 0.0;
    for (std::size_t c = 0; c < w; ++c) {
      const double t = wr[c] * gx[c];
      a += t;
      b += t * dx[c];
      c2 += t * dx[c] * dx[c];
    }
    out[3 * i + 0] = ry * b;
    out[3 * i + 1] = ry * dy * a;
    out[3 * i + 2] = ry * (c2 + dy * dy * a);
  }
}

}  // namespace

SeparableFactors make_factors(const DiskSet& disks, int width, int height) {
  if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidArgument, "grid must be nonempty");
  SeparableFactors f;
  f.width = width;
  f.height = height;
  f.n_disks = disks.n_disks();
  const auto w = static_cast<std::size_t>(width);
  const auto h = static_cast<std::size_t>(height);
  f.gx.resize(f.n_disks * w);
  f.gy.resize(f.n_disks * h);
  f.dx.resize(f.n_disks * w);
  f.dy.resize(f.n_disks * h);
  f.inv_var.resize(f.n_disks);
  for (std::size_t i = 0; i < f.n_disks; ++i) {
    const Point p = disks.centers()[i];
    const double sigma = disks.sigma_of(i);
    const double inv_var = 1.0 / (sigma * sigma);
    f.inv_var[i] = inv_var;
    for (std::size_t c = 0; c < w; ++c) {
      const double d = (static_cast<double>(c) + 0.5) - p.x;
      f.dx[i * w + c] = d;
      f.gx[i * w + c] = std::exp(-0.5 * d * d * inv_var);
    }
    for (std::size_t r = 0; r < h; ++r) {
      const double d = (static_cast<double>(r) + 0.5) - p.y;
      f.dy[i * h + r] = d;
      f.gy[i * h + r] = std::exp(-0.5 * d * d * inv_var);
    }
  }
  return f;
}

void accumulate_field(const SeparableFactors& f, std::span<double> out, Exec exec) {
  const auto w = static_cast<std::size_t>(f.width);
  if (out.size() != w * static_cast<std::size_t>(f.height)) {
    throw Error(ErrorCode::DimensionMismatch, "field buffer size does not match grid");
  }
  const bool par = go_parallel(exec, out.size() * f.n_disks);
#pragma omp parallel for schedule(static) if (par)
  for (int r = 0; r < f.height; ++r) {
    field_row(f, r, &out[static_cast<std::size_t>(r) * w]);
  }
}

std::vector<double> reduce_disk_moments(const SeparableFactors& f, std::span<const double> weights,
                                        Exec exec) {
  const auto w = static_cast<std::size_t>(f.width);
  const auto h = static_cast<std::size_t>(f.height);
  if (weights.size() != w * h) throw Error(ErrorCode::DimensionMismatch, "weight buffer size does not match grid");
  const std::size_t stride = 3 * f.n_disks;
  std::vector<double> partial(h * stride);
  const bool par = go_parallel(exec, weights.size() * f.n_disks);
#pragma omp parallel for schedule(static) if (par)
  for (int r = 0; r < f.height; ++r) {
    moment_row(f, weights, r, &partial[static_cast<std::size_t>(r) * stride]);
  }
  std::vector<double> total(stride, 0.0);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t k = 0; k < stride; ++k) total[k] += partial[r * stride + k];
  }
  return total;
}

double ordered_sum(std::span<const double> values, int width, Exec exec) {
  if (width <= 0 || values.size() % static_cast<std::size_t>(width) != 0) {
    throw Error(ErrorCode::DimensionMismatch, "ordered_sum needs whole rows");
  }
  const auto w = static_cast<std::size_t>(width);
  const std::size_t rows = values.size() / w;
  std::vector<double> row_sum(rows, 0.0);
  const bool par = go_parallel(exec, values.size());
#pragma omp parallel for schedule(static) if (par)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(rows); ++r) {
    double s = 0.0;
    const double* v = &values[static_cast<std::size_t>(r) * w];
    for (std::size_t c = 0; c < w; ++c) s += v[c];
    row_sum[static_cast<std::size_t>(r)] = s;
  }
  double total = 0.0;
  for (double s : row_sum) total += s;
  return total;
}

}  // namespace diskcover::kernels
