#include "hashq/report.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hashq/errors.hpp"

namespace hashq {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

ordered_json eval_json(const EvalResult& e) {
  return {{"psnr", e.psnr},
          {"latency_cycles", e.latency_cycles},
          {"cost_ratio", e.cost_ratio},
          {"reward", e.reward},
          {"fqr", e.fqr},
          {"cost_efficiency", e.cost_efficiency}};
}

EvalResult eval_from(const json& j) {
  EvalResult e;
  e.psnr = j.at("psnr").get<double>();
  e.latency_cycles = j.at("latency_cycles").get<std::uint64_t>();
  e.cost_ratio = j.at("cost_ratio").get<double>();
  e.reward = j.at("reward").get<double>();
  e.fqr = j.at("fqr").get<double>();
  e.cost_efficiency = j.at("cost_efficiency").get<double>();
  return e;
}

ordered_json search_json(const SearchConfig& c) {
  return {{"episodes", c.episodes},
          {"mode", std::string(to_string(c.mode))},
          {"latency_budget_ratio", c.latency_budget_ratio},
          {"lambda", c.lambda},
          {"finetune_steps", c.finetune_steps},
          {"psnr_reference", std::string(to_string(c.psnr_reference))},
          {"max_retries", c.max_retries}};
}

SearchConfig search_from(const json& j) {
  SearchConfig c;
  c.episodes = j.at("episodes").get<int>();
  c.mode = parse_search_mode(j.at("mode").get<std::string>());
  c.latency_budget_ratio = j.at("latency_budget_ratio").get<double>();
  c.lambda = j.at("lambda").get<double>();
  c.finetune_steps = j.at("finetune_steps").get<int>();
  c.psnr_reference = parse_psnr_reference(j.at("psnr_reference").get<std::string>());
  c.max_retries = j.at("max_retries").get<int>();
  return c;
}

ordered_json agent_json(const DdpgConfig& c) {
  return {{"hidden", c.hidden},
          {"actor_learning_rate", c.actor_learning_rate},
          {"critic_learning_rate", c.critic_learning_rate},
          {"tau", c.tau},
          {"gamma", c.gamma},
          {"replay_capacity", c.replay_capacity},
          {"ema_decay", c.ema_decay},
          {"noise_sigma", c.noise_sigma},
          {"noise_decay", c.noise_decay},
          {"noise_floor", c.noise_floor},
          {"warmup_episodes", c.warmup_episodes},
          {"updates_per_episode", c.updates_per_episode},
          {"seed", c.seed}};
}

DdpgConfig agent_from(const json& j) {
  DdpgConfig c;
  c.hidden = j.at("hidden").get<int>();
  c.actor_learning_rate = j.at("actor_learning_rate").get<double>();
  c.critic_learning_rate = j.at("critic_learning_rate").get<double>();
  c.tau = j.at("tau").get<double>();
  c.gamma = j.at("gamma").get<double>();
  c.replay_capacity = j.at("replay_capacity").get<std::size_t>();
  c.ema_decay = j.at("ema_decay").get<double>();
  c.noise_sigma = j.at("noise_sigma").get<double>();
  c.noise_decay = j.at("noise_decay").get<double>();
  c.noise_floor = j.at("noise_floor").get<double>();
  c.warmup_episodes = j.at("warmup_episodes").get<int>();
  c.updates_per_episode = j.at("updates_per_episode").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

QuantPolicy policy_from(const json& j) { return QuantPolicy::parse(j.get<std::string>()); }

}  // namespace

std::string to_json(const SearchReport& r) {
  ordered_json j;
  j["environment"] = r.environment;
  j["search"] = search_json(r.search);
  j["agent"] = agent_json(r.agent);
  j["psnr_org"] = r.psnr_org;
  j["psnr_float"] = r.psnr_float;
  j["original_cost"] = r.original_cost;
  j["budget_cycles"] = r.budget_cycles ? ordered_json(*r.budget_cycles) : ordered_json(nullptr);
  j["baselines"] = ordered_json::array();
  for (const auto& b : r.baselines) {
    j["baselines"].push_back(
        {{"name", b.name}, {"policy", b.policy.to_string()}, {"eval", eval_json(b.eval)}});
  }
  if (r.best) {
    const auto& b = *r.best;
    j["best"] = {{"episode", b.episode},
                 {"policy", b.policy.to_string()},
                 {"eval", eval_json(b.eval)},
                 {"final_eval", eval_json(b.final_eval)},
                 {"budget_unreachable", b.budget_unreachable},
                 {"budget_satisfied", b.budget_satisfied}};
  } else {
    j["best"] = nullptr;
  }
  j["history"] = ordered_json::array();
  for (const auto& h : r.history) {
    j["history"].push_back({{"episode", h.episode},
                            {"policy", h.policy.to_string()},
                            {"eval", eval_json(h.eval)},
                            {"warmup", h.warmup},
                            {"budget_unreachable", h.budget_unreachable},
                            {"critic_loss", h.critic_loss},
                            {"actor_loss", h.actor_loss}});
  }
  return j.dump(2) + "\n";
}

std::string to_json(const EvalResult& eval, const QuantPolicy& policy, std::string_view label) {
  ordered_json j;
  j["label"] = std::string(label);
  j["policy"] = policy.to_string();
  j["eval"] = eval_json(eval);
  return j.dump(2) + "\n";
}

std::string to_json(const SimReport& s) {
  ordered_json j{{"total_cycles", s.total_cycles},
                 {"encoding_cycles", s.encoding_cycles},
                 {"mlp_cycles", s.mlp_cycles},
                 {"subgrid_prefetch_cycles", s.subgrid_prefetch_cycles},
                 {"dram_bytes", s.dram_bytes},
                 {"prefetched_bytes", s.prefetched_bytes},
                 {"cache_hits", s.cache_hits},
                 {"cache_misses", s.cache_misses},
                 {"subgrid_tiles", s.subgrid_tiles},
                 {"pixel_count", s.pixel_count},
                 {"cycles_per_ray", s.cycles_per_ray}};
  return j.dump(2) + "\n";
}

SearchReport parse_search_report(std::string_view text) {
  try {
    const json j = json::parse(text);
    SearchReport r;
    r.environment = j.at("environment").get<std::string>();
    r.search = search_from(j.at("search"));
    r.agent = agent_from(j.at("agent"));
    r.psnr_org = j.at("psnr_org").get<double>();
    r.psnr_float = j.at("psnr_float").get<double>();
    r.original_cost = j.at("original_cost").get<std::uint64_t>();
    if (!j.at("budget_cycles").is_null()) r.budget_cycles = j.at("budget_cycles").get<std::uint64_t>();
    for (const auto& b : j.at("baselines")) {
      r.baselines.push_back(
          {b.at("name").get<std::string>(), policy_from(b.at("policy")), eval_from(b.at("eval"))});
    }
    if (!j.at("best").is_null()) {
      const auto& b = j.at("best");
      BestPolicy best;
      best.episode = b.at("episode").get<int>();
      best.policy = policy_from(b.at("policy"));
      best.eval = eval_from(b.at("eval"));
      best.final_eval = eval_from(b.at("final_eval"));
      best.budget_unreachable = b.at("budget_unreachable").get<bool>();
      best.budget_satisfied = b.at("budget_satisfied").get<bool>();
      r.best = best;
    }
    for (const auto& h : j.at("history")) {
      EpisodeRecord rec;
      rec.episode = h.at("episode").get<int>();
      rec.policy = policy_from(h.at("policy"));
      rec.eval = eval_from(h.at("eval"));
      rec.warmup = h.at("warmup").get<bool>();
      rec.budget_unreachable = h.at("budget_unreachable").get<bool>();
      rec.critic_loss = h.at("critic_loss").get<double>();
      rec.actor_loss = h.at("actor_loss").get<double>();
      r.history.push_back(std::move(rec));
    }
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed search report: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("malformed search report: ") + e.what());
  }
}

SearchReport load_search_report(const std::filesystem::path& path) {
  return parse_search_report(read_text_file(path));
}

void write_episode_csv(std::ostream& out, const SearchReport& report) {
  out << kEpisodeCsvHeader << '\n';
  for (const auto& h : report.history) {
    const auto& e = h.eval;
    out << h.episode << ',' << num(e.reward) << ',' << num(e.psnr) << ',' << e.latency_cycles << ','
        << num(e.cost_ratio) << ',' << num(e.fqr) << ',' << num(e.cost_efficiency) << ','
        << h.policy.to_string() << '\n';
  }
}

void write_pareto_csv(std::ostream& out, const SearchReport& report) {
  out << "label,policy,psnr,latency_cycles,cost_efficiency\n";
  auto row = [&](const std::string& label, const QuantPolicy& p, const EvalResult& e) {
    out << label << ',' << p.to_string() << ',' << num(e.psnr) << ',' << e.latency_cycles << ','
        << num(e.cost_efficiency) << '\n';
  };
  for (const auto& b : report.baselines) row(b.name, b.policy, b.eval);
  for (const auto& h : report.history) row("episode" + std::to_string(h.episode), h.policy, h.eval);
  if (report.best) row("best", report.best->policy, report.best->final_eval);
}

void write_reward_curve_csv(std::ostream& out, const SearchReport& report) {
  out << "episode,reward,reward_ema\n";
  double ema = 0.0;
  bool seeded = false;
  for (const auto& h : report.history) {
    ema = seeded ? report.agent.ema_decay * ema + (1.0 - report.agent.ema_decay) * h.eval.reward
                 : h.eval.reward;
    seeded = true;
    out << h.episode << ',' << num(h.eval.reward) << ',' << num(ema) << '\n';
  }
}

void print_breakdown(std::ostream& out, const SimReport& s) {
  out << "stage                 cycles\n";
  out << "encoding              " << s.encoding_cycles << '\n';
  out << "subgrid_prefetch      " << s.subgrid_prefetch_cycles << '\n';
  out << "mlp                   " << s.mlp_cycles << '\n';
  out << "total                 " << s.total_cycles << '\n';
  out << "cache hits/misses     " << s.cache_hits << '/' << s.cache_misses << '\n';
  out << "dram bytes            " << s.dram_bytes << '\n';
  out << "cycles per ray        " << num(s.cycles_per_ray) << '\n';
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hashq
