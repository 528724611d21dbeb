#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace diskcover {

// First-order adaptive-moment update with bias correction.
class Adam {
 public:
  Adam(std::size_t dim, double step_size, double beta1 = 0.9, double beta2 = 0.999, double guard = 1e-8)
      : step_size_(step_size), beta1_(beta1), beta2_(beta2), guard_(guard), m_(dim, 0.0), v_(dim, 0.0) {}

  void step(std::span<double> params, std::span<const double> grad) {
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
      m_[k] = beta1_ * m_[k] + (1.0 - beta1_) * grad[k];
      v_[k] = beta2_ * v_[k] + (1.0 - beta2_) * grad[k] * grad[k];
      const double m_hat = m_[k] / c1;
      const double v_hat = v_[k] / c2;
      params[k] -= step_size_ * m_hat / (std::sqrt(v_hat) + guard_);
    }
  }

  long steps() const noexcept { return t_; }

 private:
  double step_size_;
  double beta1_;
  double beta2_;
  double guard_;
  long t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

}  // namespace diskcover
