#include "commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "hashq/errors.hpp"
#include "hashq/image.hpp"
#include "hashq/ngp.hpp"
#include "hashq/ngp_environment.hpp"
#include "hashq/report.hpp"
#include "hashq/search.hpp"
#include "hashq/trace.hpp"
#include "run_config.hpp"

namespace hashq::cli {
namespace {

namespace fs = std::filesystem;

struct GlobalFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

RunConfig resolve_config(const GlobalFlags& g) {
  RunConfig c = g.config.empty() ? default_run_config() : load_run_config(g.config);
  if (!g.out.empty()) c.out_dir = g.out;
  if (g.seed) c.seed = *g.seed;
  c.agent.seed = c.seed;
  c.validate();
  return c;
}

RenderTarget load_image(const RunConfig& c) {
  if (c.oracle.image.empty()) throw ConfigError("oracle.image is not set");
  if (!fs::exists(c.oracle.image)) throw ConfigError("image not found: " + c.oracle.image.string());
  return read_ppm(c.oracle.image);
}

ToyNgpModel load_model(const RunConfig& c) {
  const auto path = c.checkpoint_path();
  if (!fs::exists(path)) throw ConfigError("checkpoint not found: " + path.string() + " (run train-oracle first)");
  return load_checkpoint(path);
}

NgpEnvironment make_environment(const RunConfig& c) {
  ToyNgpModel model = load_model(c);
  RenderTarget image = load_image(c);
  if (fs::exists(c.trace_path())) {
    return NgpEnvironment(std::move(model), std::move(image), read_trace(c.trace_path()), c.hardware,
                          c.finetune_seed());
  }
  return NgpEnvironment(std::move(model), std::move(image), c.hardware, c.finetune_seed());
}

template <typename Fn>
void write_with(const fs::path& path, Fn&& fn) {
  std::ostringstream os;
  fn(os);
  write_text_file(path, os.str());
}

int cmd_train_oracle(const GlobalFlags& g, std::ostream& out) {
  const RunConfig c = resolve_config(g);
  const RenderTarget image = load_image(c);
  TrainOptions opts;
  opts.log_every = std::max(1, c.oracle.train_steps / 50);
  const TrainResult r = train(image, c.oracle.ngp, c.oracle.train_steps, c.oracle_seed(), opts);
  fs::create_directories(c.out_dir);
  save_checkpoint(c.checkpoint_path(), r.model);
  write_with(c.out_dir / "train_log.csv", [&](std::ostream& os) {
    os << "step,loss,psnr\n";
    for (const auto& row : r.log) os << row.step << ',' << row.loss << ',' << row.psnr << '\n';
  });
  write_trace(c.trace_path(), export_trace(r.model, image.width, image.height));
  const double final_psnr = r.log.empty() ? 0.0 : r.log.back().psnr;
  out << "trained " << c.oracle.train_steps << " steps, PSNR " << final_psnr << " dB\n"
      << "checkpoint " << c.checkpoint_path().string() << '\n';
  return kExitOk;
}

int cmd_search(const GlobalFlags& g, std::ostream& out, std::ostream& err) {
  const RunConfig c = resolve_config(g);
  NgpEnvironment env = make_environment(c);
  const SearchReport report = run_search(env, c.search, c.agent, [&](const EpisodeRecord& rec) {
    if ((rec.episode + 1) % 10 == 0) {
      err << "episode " << rec.episode + 1 << "/" << c.search.episodes << " reward " << rec.eval.reward
          << " psnr " << rec.eval.psnr << " policy " << rec.policy.to_string() << '\n';
    }
  });
  write_text_file(c.out_dir / "search_report.json", to_json(report));
  write_with(c.out_dir / "episodes.csv", [&](std::ostream& os) { write_episode_csv(os, report); });
  const QuantPolicy& best = report.best ? report.best->policy : report.baselines.front().policy;
  write_text_file(c.out_dir / "best_policy.txt", best.to_string() + "\n");
  out << "best policy " << best.to_string();
  if (report.best) {
    out << " (episode " << report.best->episode << ", PSNR " << report.best->final_eval.psnr
        << " dB, latency " << report.best->final_eval.latency_cycles << " cycles)";
    if (report.best->budget_unreachable) out << " budget_unreachable";
  }
  out << '\n';
  return kExitOk;
}

int cmd_baseline(const GlobalFlags& g, const std::string& kind, int bits, std::ostream& out) {
  if (kind != "ptq" && kind != "qat") throw ConfigError("--kind must be ptq or qat");
  if (bits < kMinBits || bits > kMaxBits) {
    throw ConfigError("--bits must lie in [1, 8], got " + std::to_string(bits));
  }
  const RunConfig c = resolve_config(g);
  NgpEnvironment env = make_environment(c);
  const SearchContext ctx = make_context(env, c.search);
  const EvalResult r = kind == "ptq" ? run_ptq_baseline(env, ctx, bits)
                                     : run_qat_baseline(env, ctx, bits, c.search.finetune_steps);
  const std::string doc = to_json(r, env.uniform_policy(bits), kind + std::to_string(bits));
  write_text_file(c.out_dir / ("baseline_" + kind + std::to_string(bits) + ".json"), doc);
  out << doc;
  return kExitOk;
}

QuantPolicy read_policy_file(const fs::path& path) {
  std::string text = read_text_file(path);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ')) text.pop_back();
  return QuantPolicy::parse(text);
}

int cmd_simulate(const GlobalFlags& g, const std::string& trace_path, const std::string& policy_path,
                 bool breakdown, std::ostream& out) {
  const RunConfig c = resolve_config(g);
  const AccessTrace trace = read_trace(fs::path(trace_path));
  const QuantPolicy policy = read_policy_file(policy_path);
  const SimReport r = simulate(trace, policy, c.hardware);
  const std::string doc = to_json(r);
  write_text_file(c.out_dir / "sim_report.json", doc);
  out << doc;
  if (breakdown) print_breakdown(out, r);
  return kExitOk;
}

int cmd_plotdata(const GlobalFlags& g, std::string report_path, std::ostream& out) {
  const RunConfig c = resolve_config(g);
  if (report_path.empty()) report_path = (c.out_dir / "search_report.json").string();
  const SearchReport report = load_search_report(report_path);
  write_with(c.out_dir / "pareto.csv", [&](std::ostream& os) { write_pareto_csv(os, report); });
  write_with(c.out_dir / "reward_curve.csv", [&](std::ostream& os) { write_reward_curve_csv(os, report); });
  out << "wrote " << (c.out_dir / "pareto.csv").string() << " and "
      << (c.out_dir / "reward_curve.csv").string() << '\n';
  return kExitOk;
}

int cmd_export_trace(const GlobalFlags& g, int width, int height, std::ostream& out) {
  const RunConfig c = resolve_config(g);
  const ToyNgpModel model = load_model(c);
  if (width <= 0 || height <= 0) {
    const RenderTarget image = load_image(c);
    width = image.width;
    height = image.height;
  }
  write_trace(c.trace_path(), export_trace(model, width, height));
  out << "trace " << c.trace_path().string() << '\n';
  return kExitOk;
}

int cmd_make_checkerboard(int width, int height, int cell, float dark, float light,
                          const std::string& output, std::ostream& out) {
  if (width < 1 || height < 1 || cell < 1) throw ConfigError("checkerboard dimensions must be positive");
  write_ppm(fs::path(output), make_checkerboard(width, height, cell, dark, light));
  out << "image " << output << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mixed-precision quantization search for hash-grid neural fields"};
  app.require_subcommand(1);
  GlobalFlags g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config, "Run configuration file (INI sections)");
  app.add_option("--out", g.out, "Output directory (overrides [run] out)");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides [run] seed)");

  auto* train_cmd = app.add_subcommand("train-oracle", "Train the quality oracle and export its trace");
  auto* search_cmd = app.add_subcommand("search", "Run the bit-width search");

  auto* base_cmd = app.add_subcommand("baseline", "Evaluate a uniform PTQ or QAT baseline");
  std::string kind = "ptq";
  int bits = 8;
  base_cmd->add_option("--kind", kind, "ptq or qat");
  base_cmd->add_option("--bits", bits, "Uniform bit width");

  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a policy on a trace");
  std::string trace_path;
  std::string policy_path;
  bool breakdown = false;
  sim_cmd->add_option("--trace", trace_path, "HTRC trace file")->required();
  sim_cmd->add_option("--policy", policy_path, "File holding a policy string")->required();
  sim_cmd->add_flag("--breakdown", breakdown, "Print per-stage cycles");

  auto* plot_cmd = app.add_subcommand("plotdata", "Write CSV series from a search report");
  std::string report_path;
  plot_cmd->add_option("--report", report_path, "Search report (default <out>/search_report.json)");

  auto* trace_cmd = app.add_subcommand("export-trace", "Export an access trace from the checkpoint");
  int trace_w = 0;
  int trace_h = 0;
  trace_cmd->add_option("--width", trace_w, "Render width (default: image width)");
  trace_cmd->add_option("--height", trace_h, "Render height (default: image height)");

  auto* board_cmd = app.add_subcommand("make-checkerboard", "Write a checkerboard PPM");
  int bw = 128;
  int bh = 128;
  int cell = 8;
  float dark = 0.1f;
  float light = 0.9f;
  std::string board_out;
  board_cmd->add_option("--width", bw);
  board_cmd->add_option("--height", bh);
  board_cmd->add_option("--cell", cell);
  board_cmd->add_option("--dark", dark);
  board_cmd->add_option("--light", light);
  board_cmd->add_option("--output", board_out)->required();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*train_cmd) return cmd_train_oracle(g, out);
    if (*search_cmd) return cmd_search(g, out, err);
    if (*base_cmd) return cmd_baseline(g, kind, bits, out);
    if (*sim_cmd) return cmd_simulate(g, trace_path, policy_path, breakdown, out);
    if (*plot_cmd) return cmd_plotdata(g, report_path, out);
    if (*trace_cmd) return cmd_export_trace(g, trace_w, trace_h, out);
    if (*board_cmd) return cmd_make_checkerboard(bw, bh, cell, dark, light, board_out, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace hashq::cli
