#include "hashq/search.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

#include "hashq/errors.hpp"

namespace hashq {

std::string_view to_string(SearchMode mode) { return mode == SearchMode::mdl ? "MDL" : "MGL"; }

SearchMode parse_search_mode(std::string_view text) {
  if (text == "MDL" || text == "mdl") return SearchMode::mdl;
  if (text == "MGL" || text == "mgl") return SearchMode::mgl;
  throw ConfigError("unknown search mode '" + std::string(text) + "' (expected MDL or MGL)");
}

std::string_view to_string(PsnrReference ref) {
  return ref == PsnrReference::quantized8 ? "quantized8" : "float";
}

PsnrReference parse_psnr_reference(std::string_view text) {
  if (text == "quantized8") return PsnrReference::quantized8;
  if (text == "float") return PsnrReference::float_model;
  throw ConfigError("unknown PSNR reference '" + std::string(text) + "' (expected quantized8 or float)");
}

void SearchConfig::validate() const {
  if (episodes < 0) throw ConfigError("episodes must be non-negative");
  if (finetune_steps < 0) throw ConfigError("finetune_steps must be non-negative");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be positive");
  if (max_retries < 0) throw ConfigError("max_retries must be non-negative");
  if (mode == SearchMode::mgl && !(latency_budget_ratio > 0.0 && latency_budget_ratio < 1.0)) {
    throw ConfigError("MGL mode needs latency_budget_ratio in (0, 1)");
  }
}

std::vector<ObservationVector> build_observations(const NgpConfig& config) {
  config.validate();
  std::vector<ObservationVector> out;
  int index = 0;
  for (int l = 0; l < config.num_levels; ++l) {
    out.push_back({kUnitHashLevel, static_cast<double>(config.features_per_level),
                   static_cast<double>(config.table_capacity()), static_cast<double>(l),
                   static_cast<double>(index++), 0.0, 1.0});
  }
  for (int i = 0; i < config.layer_count(); ++i) {
    const double type = i == config.layer_count() - 1 ? kUnitOutputMlp : kUnitHiddenMlp;
    const double din = config.layer_in(i);
    const double dout = config.layer_out(i);
    const double params = din * dout + dout;
    for (const double flag : {1.0, 0.0}) {
      out.push_back({type, din, dout, params, static_cast<double>(index++), 0.0, flag});
    }
  }
  return out;
}

ObservationVector observation_maxima(const std::vector<ObservationVector>& observations) {
  ObservationVector m{};
  for (const auto& o : observations) {
    for (int i = 0; i < kObservationDim; ++i) m[i] = std::max(m[i], o[i]);
  }
  m[kPrevAction] = 1.0;
  m[kWeightFlag] = 1.0;
  for (auto& v : m) {
    if (!(v > 0.0)) v = 1.0;
  }
  return m;
}

double compute_reward(double psnr_cur, double psnr_org, double current_cost, double original_cost,
                      double lambda) {
  if (!(current_cost > 0.0) || !(original_cost > 0.0)) throw ConfigError("reward needs positive costs");
  const double cost_ratio = current_cost / original_cost;
  return lambda * (psnr_cur - psnr_org + 1.0 / cost_ratio);
}

double fqr(const QuantPolicy& policy) {
  const auto bits = policy.flatten();
  if (bits.empty()) throw ConfigError("FQR of an empty policy");
  return static_cast<double>(std::accumulate(bits.begin(), bits.end(), 0LL)) /
         static_cast<double>(bits.size());
}

double cost_efficiency(double psnr, double latency_cycles) {
  if (!(latency_cycles > 0.0)) throw ConfigError("cost efficiency needs a positive latency");
  return psnr / (latency_cycles / 1e7);
}

BudgetOutcome enforce_latency_budget(QuantPolicy policy, std::uint64_t budget_cycles,
                                     const LatencyFn& latency) {
  if (budget_cycles == 0) throw ConfigError("latency budget must be positive");
  BudgetOutcome out;
  std::uint64_t current = latency(policy);
  while (current > budget_cycles) {
    int best_unit = -1;
    std::int64_t best_gain = std::numeric_limits<std::int64_t>::min();
    std::uint64_t best_latency = current;
    for (int u = 0; u < policy.unit_count(); ++u) {
      const int b = policy.bits_at(u);
      if (b <= kMinBits) continue;
      policy.set_bits_at(u, b - 1);
      const std::uint64_t l = latency(policy);
      policy.set_bits_at(u, b);
      const auto gain = static_cast<std::int64_t>(current) - static_cast<std::int64_t>(l);
      if (gain > best_gain) {
        best_gain = gain;
        best_unit = u;
        best_latency = l;
      }
    }
    if (best_unit < 0) {
      out.unreachable = true;
      break;
    }
    policy.set_bits_at(best_unit, policy.bits_at(best_unit) - 1);
    current = best_latency;
  }
  out.policy = std::move(policy);
  out.latency = current;
  return out;
}

BudgetOutcome enforce_latency_budget(QuantPolicy policy, std::uint64_t budget_cycles,
                                     const AccessTrace& trace, const HwConfig& config) {
  CostModel model(trace, config);
  return enforce_latency_budget(std::move(policy), budget_cycles,
                                [&](const QuantPolicy& p) { return model.latency(p); });
}

EvalResult evaluate_policy(Environment& env, const QuantPolicy& policy, const SearchContext& ctx,
                           int finetune_steps) {
  EvalResult r;
  r.psnr = env.quality(policy, finetune_steps);
  r.latency_cycles = env.latency(policy);
  r.cost_ratio = static_cast<double>(r.latency_cycles) / static_cast<double>(ctx.original_cost);
  r.reward = compute_reward(r.psnr, ctx.psnr_org, static_cast<double>(r.latency_cycles),
                            static_cast<double>(ctx.original_cost), ctx.config.lambda);
  r.fqr = fqr(policy);
  r.cost_efficiency = cost_efficiency(r.psnr, static_cast<double>(r.latency_cycles));
  return r;
}

SearchContext make_context(Environment& env, const SearchConfig& config) {
  config.validate();
  SearchContext ctx;
  ctx.config = config;
  const QuantPolicy base = env.uniform_policy(kMaxBits);
  ctx.original_cost = env.latency(base);
  if (ctx.original_cost == 0) throw SimulationError("baseline latency is zero");
  const double psnr8 = env.quality(base, config.finetune_steps);
  ctx.psnr_org = config.psnr_reference == PsnrReference::quantized8 ? psnr8 : env.float_quality();
  if (config.mode == SearchMode::mgl) {
    ctx.budget_cycles = std::max<std::uint64_t>(
        1, static_cast<std::uint64_t>(std::floor(config.latency_budget_ratio * ctx.original_cost)));
  }
  ctx.baseline = evaluate_policy(env, base, ctx, config.finetune_steps);
  return ctx;
}

EpisodeResult run_episode(DdpgAgent& agent, Environment& env, const SearchContext& ctx, bool explore,
                          bool random_actions) {
  const auto raw = env.raw_observations();
  if (raw.empty()) throw ConfigError("environment exposes no quantizable units");
  const auto maxima = observation_maxima(raw);

  EpisodeResult ep;
  ep.policy = env.uniform_policy(kMaxBits);
  if (ep.policy.unit_count() != static_cast<int>(raw.size())) {
    throw ConfigError("environment observation count does not match its policy layout");
  }
  std::vector<double> actions;
  double prev = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    ObservationVector o = raw[i];
    o[kPrevAction] = prev;
    const auto obs = normalize_observation(o, maxima);
    const double a = random_actions ? agent.random_action() : agent.select_action(obs, explore);
    actions.push_back(a);
    ep.policy.set_bits_at(static_cast<int>(i), action_to_bits(a));
    prev = a;
  }

  if (ctx.budget_cycles) {
    const auto enforced = enforce_latency_budget(ep.policy, *ctx.budget_cycles,
                                                 [&](const QuantPolicy& p) { return env.latency(p); });
    for (int u = 0; u < enforced.policy.unit_count(); ++u) {
      if (enforced.policy.bits_at(u) != ep.policy.bits_at(u)) {
        actions[static_cast<std::size_t>(u)] = bits_to_action(enforced.policy.bits_at(u));
      }
    }
    ep.policy = enforced.policy;
    ep.budget_unreachable = enforced.unreachable;
  }

  ep.eval = evaluate_policy(env, ep.policy, ctx, ctx.config.finetune_steps);

  // Observations carry the realised previous action.
  std::vector<LayerObservation> obs;
  prev = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    ObservationVector o = raw[i];
    o[kPrevAction] = prev;
    obs.push_back(normalize_observation(o, maxima));
    prev = actions[i];
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Transition t;
    t.obs = obs[i];
    t.action = actions[i];
    t.reward = ep.eval.reward;
    t.done = i + 1 == raw.size();
    t.next_obs = t.done ? obs[i] : obs[i + 1];
    ep.transitions.push_back(t);
  }
  return ep;
}

EvalResult run_ptq_baseline(Environment& env, const SearchContext& ctx, int bits) {
  if (bits < kMinBits || bits > kMaxBits) throw ConfigError("baseline bits must lie in [1, 8]");
  return evaluate_policy(env, env.uniform_policy(bits), ctx, 0);
}

EvalResult run_qat_baseline(Environment& env, const SearchContext& ctx, int bits, int steps) {
  if (bits < kMinBits || bits > kMaxBits) throw ConfigError("baseline bits must lie in [1, 8]");
  return evaluate_policy(env, env.uniform_policy(bits), ctx, steps);
}

SearchReport run_search(Environment& env, const SearchConfig& config, const DdpgConfig& agent_config,
                        const EpisodeCallback& on_episode) {
  const SearchContext ctx = make_context(env, config);
  SearchReport report;
  report.environment = env.description();
  report.search = config;
  report.agent = agent_config;
  report.psnr_org = ctx.psnr_org;
  report.psnr_float = env.float_quality();
  report.original_cost = ctx.original_cost;
  report.budget_cycles = ctx.budget_cycles;
  const QuantPolicy base = env.uniform_policy(kMaxBits);
  report.baselines.push_back({"uniform8", base, ctx.baseline});
  if (config.episodes == 0) return report;

  DdpgAgent agent(agent_config);
  BestPolicy best;
  best.episode = -1;
  best.policy = base;
  best.eval = ctx.baseline;
  bool have_best = config.mode == SearchMode::mdl;
  if (ctx.budget_cycles) best.budget_satisfied = ctx.baseline.latency_cycles <= *ctx.budget_cycles;

  for (int e = 0; e < config.episodes; ++e) {
    const bool warmup = e < agent_config.warmup_episodes;
    EpisodeResult ep;
    for (int attempt = 0;; ++attempt) {
      try {
        ep = run_episode(agent, env, ctx, true, warmup);
        break;
      } catch (const Error& err) {
        std::clog << "episode " << e << " attempt " << attempt + 1 << " failed: " << err.what() << '\n';
        if (attempt >= config.max_retries) throw;
      }
    }
    agent.observe_reward(ep.eval.reward);
    for (const auto& t : ep.transitions) agent.replay().push(t);

    EpisodeRecord rec;
    rec.episode = e;
    rec.policy = ep.policy;
    rec.eval = ep.eval;
    rec.warmup = warmup;
    rec.budget_unreachable = ep.budget_unreachable;
    if (!warmup) {
      for (int u = 0; u < agent_config.updates_per_episode; ++u) {
        const auto batch = agent.replay().sample(ep.transitions.size(), agent.rng());
        const auto stats = agent.update(batch);
        rec.critic_loss = stats.critic_loss;
        rec.actor_loss = stats.actor_loss;
      }
    }
    agent.end_episode();
    if (on_episode) on_episode(rec);
    report.history.push_back(rec);

    if (!have_best || ep.eval.reward > best.eval.reward) {
      have_best = true;
      best.episode = e;
      best.policy = ep.policy;
      best.eval = ep.eval;
      best.budget_unreachable = ep.budget_unreachable;
    }
  }

  best.final_eval = evaluate_policy(env, best.policy, ctx, 2 * config.finetune_steps);
  if (ctx.budget_cycles) best.budget_satisfied = best.final_eval.latency_cycles <= *ctx.budget_cycles;
  report.best = best;
  return report;
}

}  // namespace hashq
