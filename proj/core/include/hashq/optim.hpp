#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "hashq/errors.hpp"

namespace hashq {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double epsilon = 1e-10;
};

// Adam with bias correction. Moments are kept in double regardless of the
// parameter storage type.
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t size, AdamOptions options)
      : options_(options), m_(size, 0.0), v_(size, 0.0) {}

  template <typename T>
  void step(std::span<T> params, std::span<const double> grad) {
    if (params.size() != m_.size() || grad.size() != m_.size()) {
      throw Error("Adam parameter/gradient size mismatch");
    }
    ++t_;
    const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
    const double lr = options_.learning_rate;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double g = grad[i];
      m_[i] = options_.beta1 * m_[i] + (1.0 - options_.beta1) * g;
      v_[i] = options_.beta2 * v_[i] + (1.0 - options_.beta2) * g * g;
      const double mhat = m_[i] / c1;
      const double vhat = v_[i] / c2;
      params[i] = static_cast<T>(params[i] - lr * mhat / (std::sqrt(vhat) + options_.epsilon));
    }
  }

  long step_count() const { return t_; }
  const AdamOptions& options() const { return options_; }

 private:
  AdamOptions options_{};
  std::vector<double> m_;
  std::vector<double> v_;
  long t_ = 0;
};

}  // namespace hashq
