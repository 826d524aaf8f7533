#include "synthetic_env.hpp"

#include <cmath>

namespace hashq::testing {

std::vector<ObservationVector> SyntheticEnvironment::raw_observations() const {
  NgpConfig c;
  c.num_levels = 2;
  c.mlp_hidden_layers = 0;
  c.mlp_width = 8;
  return build_observations(c);
}

std::uint64_t SyntheticEnvironment::latency(const QuantPolicy& policy) {
  double c = p_.fixed_cost;
  for (int u = 0; u < 4; ++u) c += p_.cost[u] * policy.bits_at(u);
  // Scaled so distinct policies keep distinct integer latencies.
  return static_cast<std::uint64_t>(std::llround(c * 1000.0));
}

double SyntheticEnvironment::quality(const QuantPolicy& policy, int) {
  ++quality_calls_;
  double q = 40.0;
  for (int u = 0; u < 4; ++u) q -= p_.loss[u] * std::pow(p_.ratio, -(policy.bits_at(u) - 1));
  return q;
}

ExhaustiveOptimum exhaustive_optimum(SyntheticEnvironment& env, const SearchContext& ctx) {
  ExhaustiveOptimum best;
  best.reward = -1e300;
  QuantPolicy p = env.uniform_policy(8);
  for (int code = 0; code < 4096; ++code) {
    for (int u = 0; u < 4; ++u) p.set_bits_at(u, 1 + (code >> (3 * u)) % 8);
    const double r = compute_reward(env.quality(p, 0), ctx.psnr_org, static_cast<double>(env.latency(p)),
                                    static_cast<double>(ctx.original_cost), ctx.config.lambda);
    ++best.policies;
    if (r > best.reward) {
      best.reward = r;
      best.policy = p;
    }
  }
  return best;
}

}  // namespace hashq::testing
