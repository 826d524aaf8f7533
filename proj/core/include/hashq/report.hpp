#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>

#include "hashq/accel_sim.hpp"
#include "hashq/quantizer.hpp"
#include "hashq/search.hpp"

namespace hashq {

// JSON documents, pretty-printed with two-space indentation and a trailing
// newline. Doubles are written with round-trip precision.
std::string to_json(const SearchReport& report);
std::string to_json(const EvalResult& eval, const QuantPolicy& policy, std::string_view label);
std::string to_json(const SimReport& report);

// Throws FormatError on malformed documents.
SearchReport parse_search_report(std::string_view text);
SearchReport load_search_report(const std::filesystem::path& path);

inline constexpr std::string_view kEpisodeCsvHeader =
    "episode,reward,psnr,latency_cycles,cost_ratio,fqr,cost_efficiency,policy";

void write_episode_csv(std::ostream& out, const SearchReport& report);
// label,policy,psnr,latency_cycles,cost_efficiency: baselines, then episodes, then the best policy.
void write_pareto_csv(std::ostream& out, const SearchReport& report);
// episode,reward,reward_ema
void write_reward_curve_csv(std::ostream& out, const SearchReport& report);

// Human-readable per-stage cycle table.
void print_breakdown(std::ostream& out, const SimReport& report);

// Writes `text` to `path`, creating parent directories; throws Error on I/O failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace hashq
