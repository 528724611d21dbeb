#include "diskcover/losses.hpp"

#include <algorithm>
#include <cmath>

#include "diskcover/projection.hpp"

namespace diskcover {
namespace {

using kernels::Exec;

void check_dims(int w, int h, const BinaryMask& gt) {
  if (w != gt.width() || h != gt.height()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(w) + "x" + std::to_string(h) + " prediction vs " +
                    std::to_string(gt.width()) + "x" + std::to_string(gt.height()) + " ground truth");
  }
}

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

double bce_term(double p, std::uint8_t z) {
  const double q = clamp_prob(p);
  return z ? -std::log(q) : -std::log(1.0 - q);
}

struct DiceSums {
  double overlap = 0.0;
  double gt = 0.0;
  double pred = 0.0;
};

DiceSums dice_sums(std::span<const double> p, const BinaryMask& gt, Exec exec) {
  std::vector<double> zp(p.size());
  std::vector<double> z(p.size());
  const auto g = gt.data();
  for (std::size_t k = 0; k < p.size(); ++k) {
    z[k] = g[k];
    zp[k] = g[k] ? p[k] : 0.0;
  }
  return {kernels::ordered_sum(zp, gt.width(), exec), kernels::ordered_sum(z, gt.width(), exec),
          kernels::ordered_sum(p, gt.width(), exec)};
}

double dice_from_sums(const DiceSums& s, double epsilon) {
  return 1.0 - 2.0 * s.overlap / (s.gt + s.pred + epsilon);
}

double bce_mean(std::span<const double> p, const BinaryMask& gt, Exec exec) {
  std::vector<double> terms(p.size());
  const auto g = gt.data();
  for (std::size_t k = 0; k < p.size(); ++k) terms[k] = bce_term(p[k], g[k]);
  return kernels::ordered_sum(terms, gt.width(), exec) / static_cast<double>(p.size());
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
}

std::vector<double> tanh_probs(std::span<const double> field) {
  std::vector<double> p(field.size());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::tanh(field[k]);
  return p;
}

double loss_of_probs(std::span<const double> p, const BinaryMask& gt, LossKind kind, double epsilon, Exec exec) {
  return kind == LossKind::dice ? dice_from_sums(dice_sums(p, gt, exec), epsilon) : bce_mean(p, gt, exec);
}

}  // namespace

std::vector<double> GradientVector::flatten() const {
  std::vector<double> out;
  out.reserve(2 * d_centers.size() + d_log_sigmas.size());
  for (const Point& d : d_centers) {
    out.push_back(d.x);
    out.push_back(d.y);
  }
  out.insert(out.end(), d_log_sigmas.begin(), d_log_sigmas.end());
  return out;
}

double bce_loss(const ScalarField& pred, const BinaryMask& gt) {
  check_dims(pred.width(), pred.height(), gt);
  return bce_mean(pred.data(), gt, Exec::parallel);
}

double dice_loss(const ScalarField& pred, const BinaryMask& gt, double epsilon) {
  check_dims(pred.width(), pred.height(), gt);
  check_epsilon(epsilon);
  return dice_from_sums(dice_sums(pred.data(), gt, Exec::parallel), epsilon);
}

double loss_value(const DiskSet& disks, const BinaryMask& gt, LossKind kind, double epsilon, Exec exec) {
  check_epsilon(epsilon);
  const auto f = kernels::make_factors(disks, gt.width(), gt.height());
  std::vector<double> field(gt.size());
  kernels::accumulate_field(f, field, exec);
  return loss_of_probs(tanh_probs(field), gt, kind, epsilon, exec);
}

LossAndGradient loss_and_gradient(const DiskSet& disks, const BinaryMask& gt, LossKind kind, double epsilon,
                                  Exec exec) {
  check_epsilon(epsilon);
  const auto f = kernels::make_factors(disks, gt.width(), gt.height());
  std::vector<double> field(gt.size());
  kernels::accumulate_field(f, field, exec);
  const std::vector<double> p = tanh_probs(field);
  const auto g = gt.data();

  LossAndGradient out;
  // weights[k] = dL/df_k = dL/dp_k * (1 - p_k^2)
  std::vector<double> weights(p.size());
  if (kind == LossKind::dice) {
    const DiceSums s = dice_sums(p, gt, exec);
    const double denom = s.gt + s.pred + epsilon;
    out.loss = dice_from_sums(s, epsilon);
    const double common = 2.0 * s.overlap / (denom * denom);
    const double fg = -2.0 / denom;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double dp = (g[k] ? fg : 0.0) + common;
      weights[k] = dp * (1.0 - p[k] * p[k]);
    }
  } else {
    out.loss = bce_mean(p, gt, exec);
    const double inv_count = 1.0 / static_cast<double>(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
      double dp = 0.0;
      if (p[k] > kProbClamp && p[k] < 1.0 - kProbClamp) {
        dp = g[k] ? -1.0 / p[k] : 1.0 / (1.0 - p[k]);
      }
      weights[k] = dp * inv_count * (1.0 - p[k] * p[k]);
    }
  }

  const std::vector<double> moments = kernels::reduce_disk_moments(f, weights, exec);
  const std::size_t n = disks.n_disks();
  out.gradient.d_centers.resize(n);
  out.gradient.d_log_sigmas.assign(disks.n_radii(), 0.0);
  // dg/dx_i = g (x - x_i) / sigma^2 and dg/dlog(sigma) = g r^2 / sigma^2.
  for (std::size_t i = 0; i < n; ++i) {
    const double iv = f.inv_var[i];
    out.gradient.d_centers[i] = {moments[3 * i] * iv, moments[3 * i + 1] * iv};
    out.gradient.d_log_sigmas[static_cast<std::size_t>(disks.assoc()[i])] += moments[3 * i + 2] * iv;
  }

  if (!std::isfinite(out.loss)) throw Error(ErrorCode::NonFinite, "loss is not finite");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(out.gradient.d_centers[i].x)) {
      throw Error(ErrorCode::NonFinite, "gradient of center " + std::to_string(i) + " x");
    }
    if (!std::isfinite(out.gradient.d_centers[i].y)) {
      throw Error(ErrorCode::NonFinite, "gradient of center " + std::to_string(i) + " y");
    }
  }
  for (std::size_t j = 0; j < out.gradient.d_log_sigmas.size(); ++j) {
    if (!std::isfinite(out.gradient.d_log_sigmas[j])) {
      throw Error(ErrorCode::NonFinite, "gradient of log sigma " + std::to_string(j));
    }
  }
  return out;
}

GradientVector loss_gradient(const DiskSet& disks, const BinaryMask& gt, LossKind kind, double epsilon, int width,
                             int height) {
  check_dims(width, height, gt);
  return loss_and_gradient(disks, gt, kind, epsilon).gradient;
}

std::vector<double> finite_difference_gradient(const std::function<double(std::span<const double>)>& fn,
                                               std::span<const double> params, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "finite-difference step must be positive");
  std::vector<double> theta(params.begin(), params.end());
  std::vector<double> grad(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const double saved = theta[k];
    theta[k] = saved + h;
    const double up = fn(theta);
    theta[k] = saved - h;
    const double down = fn(theta);
    theta[k] = saved;
    grad[k] = (up - down) / (2.0 * h);
  }
  return grad;
}

GradientVector finite_difference_gradient(const DiskSet& disks, const BinaryMask& gt, LossKind kind,
                                          double epsilon, double h) {
  const std::vector<int> assoc(disks.assoc().begin(), disks.assoc().end());
  const auto fn = [&](std::span<const double> theta) {
    return loss_value(unpack_params(theta, assoc), gt, kind, epsilon, Exec::serial);
  };
  const std::vector<double> flat = finite_difference_gradient(fn, pack_params(disks), h);
  GradientVector out;
  const std::size_t n = disks.n_disks();
  out.d_centers.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.d_centers[i] = {flat[2 * i], flat[2 * i + 1]};
  out.d_log_sigmas.assign(flat.begin() + static_cast<std::ptrdiff_t>(2 * n), flat.end());
  return out;
}

std::vector<double> pack_params(const DiskSet& disks) {
  std::vector<double> out;
  out.reserve(2 * disks.n_disks() + disks.n_radii());
  for (const Point& c : disks.centers()) {
    out.push_back(c.x);
    out.push_back(c.y);
  }
  for (double s : disks.sigmas()) out.push_back(std::log(s));
  return out;
}

DiskSet unpack_params(std::span<const double> params, std::span<const int> assoc) {
  const std::size_t n = assoc.size();
  if (params.size() < 2 * n + 1) throw Error(ErrorCode::InvalidArgument, "parameter vector too short");
  const std::size_t m = params.size() - 2 * n;
  std::vector<Point> centers(n);
  for (std::size_t i = 0; i < n; ++i) centers[i] = {params[2 * i], params[2 * i + 1]};
  std::vector<double> sigmas(m);
  for (std::size_t j = 0; j < m; ++j) sigmas[j] = std::exp(params[2 * n + j]);
  return DiskSet(std::move(centers), std::move(sigmas), std::vector<int>(assoc.begin(), assoc.end()));
}

double relative_error(double a, double b, double floor) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / scale;
}

}  // namespace diskcover
