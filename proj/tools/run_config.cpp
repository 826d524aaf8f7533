#include "run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <set>
#include <string>

#include "hashq/errors.hpp"

namespace hashq::cli {
namespace {

namespace pt = boost::property_tree;

class SectionReader {
 public:
  SectionReader(const pt::ptree& tree, std::string name) : name_(std::move(name)) {
    if (auto child = tree.get_child_optional(name_)) node_ = &*child;
  }

  ~SectionReader() noexcept(false) {
    if (!node_ || std::uncaught_exceptions() > 0) return;
    for (const auto& [key, value] : *node_) {
      if (!seen_.count(key)) throw ConfigError("unknown key '" + key + "' in [" + name_ + "]");
    }
  }

  template <typename T>
  void read(const std::string& key, T& target) {
    seen_.insert(key);
    if (!node_) return;
    auto raw = node_->get_optional<std::string>(key);
    if (!raw) return;
    auto parsed = node_->get_optional<T>(key);
    if (!parsed) throw ConfigError("bad value '" + *raw + "' for " + name_ + "." + key);
    target = *parsed;
  }

  void read_path(const std::string& key, std::filesystem::path& target,
                 const std::filesystem::path& base) {
    std::string s;
    read(key, s);
    if (!s.empty()) target = std::filesystem::path(s).is_absolute() ? std::filesystem::path(s) : base / s;
  }

 private:
  std::string name_;
  const pt::ptree* node_ = nullptr;
  std::set<std::string> seen_;
};

}  // namespace

std::filesystem::path RunConfig::checkpoint_path() const {
  return oracle.checkpoint.empty() ? out_dir / "oracle.hngp" : oracle.checkpoint;
}

void RunConfig::validate() const {
  oracle.ngp.validate();
  if (oracle.train_steps < 1) throw ConfigError("oracle.train_steps must be at least 1");
  hardware.validate();
  agent.validate();
  search.validate();
}

RunConfig default_run_config() { return RunConfig{}; }

RunConfig load_run_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("cannot parse config: ") + e.what());
  }
  static const std::set<std::string> sections{"run", "oracle", "hardware", "agent", "search"};
  for (const auto& [name, node] : tree) {
    if (!sections.count(name)) throw ConfigError("unknown config section [" + name + "]");
  }
  const auto base = path.parent_path();
  RunConfig c;
  {
    SectionReader r(tree, "run");
    std::string out = "out";
    r.read("seed", c.seed);
    r.read("out", out);
    c.out_dir = std::filesystem::path(out).is_absolute() ? std::filesystem::path(out) : base / out;
  }
  {
    SectionReader r(tree, "oracle");
    auto& n = c.oracle.ngp;
    r.read_path("image", c.oracle.image, base);
    r.read_path("checkpoint", c.oracle.checkpoint, base);
    r.read("train_steps", c.oracle.train_steps);
    r.read("levels", n.num_levels);
    r.read("features_per_level", n.features_per_level);
    r.read("table_size_log2", n.table_size_log2);
    r.read("base_resolution", n.base_resolution);
    r.read("growth_factor", n.growth_factor);
    r.read("hidden_layers", n.mlp_hidden_layers);
    r.read("width", n.mlp_width);
    r.read("output_channels", n.output_channels);
  }
  {
    SectionReader r(tree, "hardware");
    auto& h = c.hardware;
    r.read("clock_ghz", h.clock_ghz);
    r.read("systolic_dim", h.systolic_dim);
    r.read("grid_cache_bytes", h.grid_cache_bytes);
    r.read("cache_line_bytes", h.cache_line_bytes);
    r.read("coarse_level_split", h.coarse_level_split);
    r.read("dram_fixed_latency_cycles", h.dram_fixed_latency_cycles);
    r.read("dram_bytes_per_cycle", h.dram_bytes_per_cycle);
    r.read("subgrid_pixels", h.subgrid_pixels);
    r.read("overlap_stages", h.overlap_stages);
  }
  {
    SectionReader r(tree, "agent");
    auto& a = c.agent;
    r.read("hidden", a.hidden);
    r.read("actor_learning_rate", a.actor_learning_rate);
    r.read("critic_learning_rate", a.critic_learning_rate);
    r.read("tau", a.tau);
    r.read("gamma", a.gamma);
    r.read("replay_capacity", a.replay_capacity);
    r.read("ema_decay", a.ema_decay);
    r.read("noise_sigma", a.noise_sigma);
    r.read("noise_decay", a.noise_decay);
    r.read("noise_floor", a.noise_floor);
    r.read("warmup_episodes", a.warmup_episodes);
    r.read("updates_per_episode", a.updates_per_episode);
  }
  {
    SectionReader r(tree, "search");
    auto& s = c.search;
    std::string mode = std::string(to_string(s.mode));
    std::string ref = std::string(to_string(s.psnr_reference));
    r.read("episodes", s.episodes);
    r.read("mode", mode);
    r.read("latency_budget_ratio", s.latency_budget_ratio);
    r.read("lambda", s.lambda);
    r.read("finetune_steps", s.finetune_steps);
    r.read("psnr_reference", ref);
    r.read("max_retries", s.max_retries);
    s.mode = parse_search_mode(mode);
    s.psnr_reference = parse_psnr_reference(ref);
  }
  return c;
}

}  // namespace hashq::cli
