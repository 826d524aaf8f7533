#include "hashq/accel_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hashq/errors.hpp"

namespace hashq {
namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

struct StageCounts {
  std::uint64_t encoding = 0;
  std::uint64_t prefetch_cycles = 0;
  std::uint64_t prefetch_bytes = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t tiles = 0;
};

void check_policy(const AccessTrace& trace, const QuantPolicy& policy) {
  if (policy.hash_bits.size() < trace.level_count) {
    throw SimulationError("policy resolves " + std::to_string(policy.hash_bits.size()) +
                          " hash levels but the trace has " + std::to_string(trace.level_count));
  }
  for (const auto& g : trace.gemms) {
    if (g.layer_id >= policy.mlp_bits.size()) {
      throw SimulationError("policy has no bit widths for MLP layer " + std::to_string(g.layer_id));
    }
  }
  try {
    policy.validate();
  } catch (const ConfigError& e) {
    throw SimulationError(e.what());
  }
}

std::vector<std::uint32_t> entry_sizes(const AccessTrace& trace, const QuantPolicy& policy) {
  std::vector<std::uint32_t> eb(trace.level_count);
  for (std::uint32_t l = 0; l < trace.level_count; ++l) eb[l] = trace.entry_bytes(policy.hash_bits[l]);
  return eb;
}

StageCounts run_encoding(const AccessTrace& trace, const std::vector<std::uint32_t>& entry_bytes,
                         const HwConfig& config, DirectMappedCache& cache) {
  StageCounts s;
  if (trace.accesses.empty()) return s;
  const auto split = static_cast<std::uint32_t>(config.coarse_split(trace.level_count));
  const auto bases = level_base_addresses(trace, config);
  const std::uint64_t penalty = config.miss_penalty();
  const std::uint64_t line = config.cache_line_bytes;

  // Distinct fine-level entries touched in the current tile, via tile stamps.
  std::vector<std::vector<std::uint32_t>> stamp(trace.level_count);
  for (std::uint32_t l = split; l < trace.level_count; ++l) stamp[l].assign(trace.level_entries[l], 0);
  std::uint32_t tile = 1;
  std::uint64_t tile_bytes = 0;
  std::uint64_t pixels_seen = 0;
  std::uint32_t last_pixel = 0;

  auto close_tile = [&] {
    s.prefetch_bytes += tile_bytes;
    s.prefetch_cycles += config.transfer_cycles(tile_bytes);
    ++s.tiles;
    tile_bytes = 0;
    ++tile;
  };

  const std::uint64_t hits_before = cache.hits();
  const std::uint64_t misses_before = cache.misses();
  for (const auto& a : trace.accesses) {
    if (pixels_seen == 0 || a.pixel_id != last_pixel) {
      if (pixels_seen > 0 && pixels_seen % config.subgrid_pixels == 0) close_tile();
      ++pixels_seen;
      last_pixel = a.pixel_id;
    }
    const std::uint32_t eb = entry_bytes[a.level];
    if (a.level < split) {
      const std::uint64_t addr = bases[a.level] + static_cast<std::uint64_t>(a.entry_index) * eb;
      std::uint64_t missed = 0;
      for (std::uint64_t ln = addr / line; ln <= (addr + eb - 1) / line; ++ln) {
        if (cache.access(ln * line) == CacheOutcome::miss) ++missed;
      }
      s.encoding += missed == 0 ? 1 : missed * penalty;
    } else {
      auto& st = stamp[a.level][a.entry_index];
      if (st != tile) {
        st = tile;
        tile_bytes += eb;
      }
      s.encoding += 1;
    }
  }
  close_tile();
  s.hits = cache.hits() - hits_before;
  s.misses = cache.misses() - misses_before;
  return s;
}

std::uint64_t run_mlp(const AccessTrace& trace, const QuantPolicy& policy, const HwConfig& config) {
  std::uint64_t cycles = 0;
  for (const auto& g : trace.gemms) {
    const auto& bits = policy.mlp_bits[g.layer_id];
    cycles += gemm_cycles(g.m, g.k, g.n, bits.activation_bits, bits.weight_bits, config.systolic_dim);
  }
  return cycles;
}

SimReport assemble(const AccessTrace& trace, const StageCounts& s, std::uint64_t mlp,
                   const HwConfig& config) {
  SimReport r;
  r.encoding_cycles = s.encoding;
  r.subgrid_prefetch_cycles = s.prefetch_cycles;
  r.prefetched_bytes = s.prefetch_bytes;
  r.cache_hits = s.hits;
  r.cache_misses = s.misses;
  r.subgrid_tiles = s.tiles;
  r.mlp_cycles = mlp;
  r.dram_bytes = s.misses * config.cache_line_bytes + s.prefetch_bytes;
  r.total_cycles = config.overlap_stages ? std::max(s.encoding + s.prefetch_cycles, mlp)
                                         : s.encoding + mlp + s.prefetch_cycles;
  r.pixel_count = trace.pixel_count;
  r.cycles_per_ray = trace.pixel_count == 0 ? 0.0
                                            : static_cast<double>(r.total_cycles) / trace.pixel_count;
  return r;
}

}  // namespace

void HwConfig::validate() const {
  if (systolic_dim < 1) throw ConfigError("systolic_dim must be >= 1");
  if (cache_line_bytes == 0 || grid_cache_bytes == 0 || grid_cache_bytes % cache_line_bytes != 0) {
    throw ConfigError("grid_cache_bytes must be a positive multiple of cache_line_bytes");
  }
  if (!(dram_bytes_per_cycle > 0.0) || !std::isfinite(dram_bytes_per_cycle)) {
    throw ConfigError("dram_bytes_per_cycle must be positive");
  }
  if (subgrid_pixels == 0) throw ConfigError("subgrid_pixels must be positive");
  if (!(clock_ghz > 0.0)) throw ConfigError("clock_ghz must be positive");
}

int HwConfig::coarse_split(std::uint32_t level_count) const {
  const int split = coarse_level_split < 0 ? static_cast<int>(level_count / 2) : coarse_level_split;
  return std::min(split, static_cast<int>(level_count));
}

std::uint64_t HwConfig::miss_penalty() const {
  return dram_fixed_latency_cycles + transfer_cycles(cache_line_bytes);
}

std::uint64_t HwConfig::transfer_cycles(std::uint64_t bytes) const {
  if (bytes == 0) return 0;
  const double c = static_cast<double>(bytes) / dram_bytes_per_cycle;
  const double r = std::round(c);
  if (std::abs(c - r) <= 1e-9 * std::max(1.0, c)) return static_cast<std::uint64_t>(r);
  return static_cast<std::uint64_t>(std::ceil(c));
}

std::uint64_t gemm_cycles(std::uint64_t m, std::uint64_t k, std::uint64_t n, int b_act, int b_w,
                          int systolic_dim) {
  if (systolic_dim < 1 || b_act < 1 || b_w < 1) throw SimulationError("invalid GEMM timing arguments");
  const auto p = static_cast<std::uint64_t>(systolic_dim);
  if (m == 0 || k == 0 || n == 0) return 0;
  return ceil_div(m, p) * ceil_div(n, p) * (k + 2 * p - 2) * static_cast<std::uint64_t>(std::max(b_act, b_w));
}

DirectMappedCache::DirectMappedCache(const HwConfig& config)
    : line_bytes_(config.cache_line_bytes),
      tags_(config.line_count(), 0),
      valid_(config.line_count(), false) {
  config.validate();
}

CacheOutcome DirectMappedCache::access(std::uint64_t address) {
  const std::uint64_t line = address / line_bytes_;
  const std::size_t set = static_cast<std::size_t>(line % tags_.size());
  const std::uint64_t tag = line / tags_.size();
  if (valid_[set] && tags_[set] == tag) {
    ++hits_;
    return CacheOutcome::hit;
  }
  valid_[set] = true;
  tags_[set] = tag;
  ++misses_;
  return CacheOutcome::miss;
}

void DirectMappedCache::reset() {
  std::fill(valid_.begin(), valid_.end(), false);
  hits_ = misses_ = 0;
}

CacheOutcome cache_access(std::uint64_t entry_address, DirectMappedCache& cache) {
  return cache.access(entry_address);
}

std::vector<std::uint64_t> level_base_addresses(const AccessTrace& trace, const HwConfig& config) {
  std::vector<std::uint64_t> bases(trace.level_count);
  const std::uint64_t line = config.cache_line_bytes;
  const std::uint64_t max_entry = trace.entry_bytes(8);
  std::uint64_t next = 0;
  for (std::uint32_t l = 0; l < trace.level_count; ++l) {
    bases[l] = next;
    next += ceil_div(static_cast<std::uint64_t>(trace.level_entries[l]) * max_entry, line) * line;
  }
  return bases;
}

SimReport simulate(const AccessTrace& trace, const QuantPolicy& policy, const HwConfig& config) {
  DirectMappedCache cache(config);
  return simulate(trace, policy, config, cache);
}

SimReport simulate(const AccessTrace& trace, const QuantPolicy& policy, const HwConfig& config,
                   DirectMappedCache& cache) {
  config.validate();
  check_policy(trace, policy);
  const StageCounts s = run_encoding(trace, entry_sizes(trace, policy), config, cache);
  return assemble(trace, s, run_mlp(trace, policy, config), config);
}

std::uint64_t baseline_cost(const AccessTrace& trace, const HwConfig& config) {
  const auto layers = std::max_element(trace.gemms.begin(), trace.gemms.end(),
                                       [](const auto& a, const auto& b) { return a.layer_id < b.layer_id; });
  const int num_layers = layers == trace.gemms.end() ? 0 : layers->layer_id + 1;
  return simulate(trace, QuantPolicy::uniform(static_cast<int>(trace.level_count), num_layers, 8), config)
      .total_cycles;
}

CostModel::CostModel(AccessTrace trace, HwConfig config)
    : trace_(std::move(trace)), config_(config) {
  config_.validate();
  trace_.validate();
}

SimReport CostModel::evaluate(const QuantPolicy& policy) {
  check_policy(trace_, policy);
  const auto eb = entry_sizes(trace_, policy);
  auto it = encoding_memo_.find(eb);
  if (it == encoding_memo_.end()) {
    DirectMappedCache cache(config_);
    const StageCounts s = run_encoding(trace_, eb, config_, cache);
    it = encoding_memo_.emplace(eb, assemble(trace_, s, 0, config_)).first;
  }
  StageCounts s;
  s.encoding = it->second.encoding_cycles;
  s.prefetch_cycles = it->second.subgrid_prefetch_cycles;
  s.prefetch_bytes = it->second.prefetched_bytes;
  s.hits = it->second.cache_hits;
  s.misses = it->second.cache_misses;
  s.tiles = it->second.subgrid_tiles;
  return assemble(trace_, s, run_mlp(trace_, policy, config_), config_);
}

std::uint64_t CostModel::baseline_cost() {
  if (!have_baseline_) {
    baseline_ = hashq::baseline_cost(trace_, config_);
    have_baseline_ = true;
  }
  return baseline_;
}

}  // namespace hashq
