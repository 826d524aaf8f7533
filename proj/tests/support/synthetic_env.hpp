#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hashq/search.hpp"

namespace hashq::testing {

// Four units (two hash levels, one MLP layer's weight and activation).
// psnr = 40 - sum_u A_u * r^-(b_u - 1) is concave in every b_u and the cost
// c0 + sum_u k_u * b_u is linear.
class SyntheticEnvironment : public Environment {
 public:
  struct Params {
    std::array<double, 4> loss{2.0, 1.0, 4.0, 3.0};
    std::array<double, 4> cost{6.0, 3.0, 24.0, 16.0};
    double fixed_cost = 20.0;
    double ratio = 4.0;
  };

  SyntheticEnvironment() = default;
  explicit SyntheticEnvironment(Params p) : p_(p) {}

  std::vector<ObservationVector> raw_observations() const override;
  QuantPolicy uniform_policy(int bits) const override { return QuantPolicy::uniform(2, 1, bits); }
  std::uint64_t latency(const QuantPolicy& policy) override;
  double quality(const QuantPolicy& policy, int finetune_steps) override;
  double float_quality() override { return 40.0; }
  std::string description() const override { return "synthetic-4"; }

  std::size_t quality_calls() const { return quality_calls_; }

 private:
  Params p_;
  std::size_t quality_calls_ = 0;
};

struct ExhaustiveOptimum {
  QuantPolicy policy;
  double reward = 0.0;
  std::size_t policies = 0;
};

// Enumerates all 8^4 policies of `env` with the reward of `ctx`.
ExhaustiveOptimum exhaustive_optimum(SyntheticEnvironment& env, const SearchContext& ctx);

}  // namespace hashq::testing
