#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hashq/accel_sim.hpp"
#include "hashq/ddpg.hpp"
#include "hashq/ngp.hpp"
#include "hashq/policy.hpp"

namespace hashq {

struct EvalResult {
  double psnr = 0.0;
  std::uint64_t latency_cycles = 0;
  double cost_ratio = 1.0;
  double reward = 0.0;
  double fqr = 8.0;
  double cost_efficiency = 0.0;  // dB per 1e7 cycles

  bool operator==(const EvalResult&) const = default;
};

enum class SearchMode { mdl, mgl };
std::string_view to_string(SearchMode mode);
SearchMode parse_search_mode(std::string_view text);

// Which PSNR the reward treats as PSNR_org.
enum class PsnrReference { quantized8, float_model };
std::string_view to_string(PsnrReference ref);
PsnrReference parse_psnr_reference(std::string_view text);

struct SearchConfig {
  int episodes = 200;
  SearchMode mode = SearchMode::mdl;
  double latency_budget_ratio = 0.83;  // MGL only
  double lambda = 0.1;
  int finetune_steps = 500;
  PsnrReference psnr_reference = PsnrReference::quantized8;
  int max_retries = 3;

  void validate() const;
};

// One observation per quantizable unit: hash levels coarse-to-fine, then per
// MLP layer a weight unit followed by an activation unit. a_prev is left at 0.
std::vector<ObservationVector> build_observations(const NgpConfig& config);

// Per-component maxima over `observations`; a_prev and the weight flag use 1.
ObservationVector observation_maxima(const std::vector<ObservationVector>& observations);

// lambda * (psnr_cur - psnr_org + original_cost / current_cost)
double compute_reward(double psnr_cur, double psnr_org, double current_cost, double original_cost,
                      double lambda);
// Mean bit width over every quantizable unit.
double fqr(const QuantPolicy& policy);
// PSNR per 1e7 cycles.
double cost_efficiency(double psnr, double latency_cycles);

struct BudgetOutcome {
  QuantPolicy policy;
  std::uint64_t latency = 0;
  bool unreachable = false;
};

using LatencyFn = std::function<std::uint64_t(const QuantPolicy&)>;

// Greedy: while over budget, take away one bit from the unit whose decrement
// saves the most cycles (ties go to the lowest unit index).
BudgetOutcome enforce_latency_budget(QuantPolicy policy, std::uint64_t budget_cycles,
                                     const LatencyFn& latency);
BudgetOutcome enforce_latency_budget(QuantPolicy policy, std::uint64_t budget_cycles,
                                     const AccessTrace& trace, const HwConfig& config);

// What the search needs from the world: unit descriptions, simulated latency,
// and reconstruction quality after optional fine-tuning.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::vector<ObservationVector> raw_observations() const = 0;
  virtual QuantPolicy uniform_policy(int bits) const = 0;
  virtual std::uint64_t latency(const QuantPolicy& policy) = 0;
  virtual double quality(const QuantPolicy& policy, int finetune_steps) = 0;
  virtual double float_quality() = 0;
  virtual std::string description() const = 0;
};

// Reference values every evaluation in a run is measured against.
struct SearchContext {
  SearchConfig config;
  EvalResult baseline;  // uniform 8-bit, fine-tuned
  double psnr_org = 0.0;
  std::uint64_t original_cost = 0;
  std::optional<std::uint64_t> budget_cycles;
};

SearchContext make_context(Environment& env, const SearchConfig& config);
EvalResult evaluate_policy(Environment& env, const QuantPolicy& policy, const SearchContext& ctx,
                           int finetune_steps);

struct EpisodeResult {
  QuantPolicy policy;
  std::vector<Transition> transitions;
  EvalResult eval;
  bool budget_unreachable = false;
};

// Walks every unit once; `random_actions` replaces the actor during warm-up.
EpisodeResult run_episode(DdpgAgent& agent, Environment& env, const SearchContext& ctx, bool explore,
                          bool random_actions = false);

EvalResult run_ptq_baseline(Environment& env, const SearchContext& ctx, int bits);
EvalResult run_qat_baseline(Environment& env, const SearchContext& ctx, int bits, int steps);

struct BaselineEntry {
  std::string name;
  QuantPolicy policy;
  EvalResult eval;
};

struct EpisodeRecord {
  int episode = 0;
  QuantPolicy policy;
  EvalResult eval;
  bool warmup = false;
  bool budget_unreachable = false;
  double critic_loss = 0.0;
  double actor_loss = 0.0;
};

struct BestPolicy {
  int episode = -1;  // -1 when the uniform 8-bit baseline was never beaten
  QuantPolicy policy;
  EvalResult eval;        // as measured during the search
  EvalResult final_eval;  // re-evaluated with twice the fine-tune budget
  bool budget_unreachable = false;
  bool budget_satisfied = true;
};

struct SearchReport {
  std::string environment;
  SearchConfig search;
  DdpgConfig agent;
  double psnr_org = 0.0;
  double psnr_float = 0.0;
  std::uint64_t original_cost = 0;
  std::optional<std::uint64_t> budget_cycles;
  std::vector<BaselineEntry> baselines;
  std::vector<EpisodeRecord> history;
  std::optional<BestPolicy> best;
};

using EpisodeCallback = std::function<void(const EpisodeRecord&)>;

SearchReport run_search(Environment& env, const SearchConfig& config, const DdpgConfig& agent_config,
                        const EpisodeCallback& on_episode = {});

}  // namespace hashq
