#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "hashq/policy.hpp"
#include "hashq/trace.hpp"

namespace hashq {

// Timing and memory parameters of the modelled accelerator. The defaults are
// declared configuration, not measurements of any particular chip.
struct HwConfig {
  double clock_ghz = 1.0;
  int systolic_dim = 16;
  std::uint32_t grid_cache_bytes = 32768;
  std::uint32_t cache_line_bytes = 64;
  int coarse_level_split = -1;  // levels below this use the grid cache; <0 means level_count / 2
  std::uint32_t dram_fixed_latency_cycles = 100;
  double dram_bytes_per_cycle = 25.6;
  std::uint32_t subgrid_pixels = 32 * 32;
  bool overlap_stages = false;  // total = max(encoding + prefetch, mlp) instead of the sum

  void validate() const;
  int coarse_split(std::uint32_t level_count) const;
  std::uint32_t line_count() const { return grid_cache_bytes / cache_line_bytes; }
  // Cycles charged for one line fill from DRAM.
  std::uint64_t miss_penalty() const;
  // ceil(bytes / dram_bytes_per_cycle), robust to the inexact binary bandwidth.
  std::uint64_t transfer_cycles(std::uint64_t bytes) const;

  bool operator==(const HwConfig&) const = default;
};

struct SimReport {
  std::uint64_t total_cycles = 0;
  std::uint64_t encoding_cycles = 0;
  std::uint64_t mlp_cycles = 0;
  std::uint64_t subgrid_prefetch_cycles = 0;
  std::uint64_t dram_bytes = 0;
  std::uint64_t prefetched_bytes = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t subgrid_tiles = 0;
  std::uint64_t pixel_count = 0;
  double cycles_per_ray = 0.0;

  bool operator==(const SimReport&) const = default;
};

// Bitserial output-stationary systolic GEMM:
// ceil(M/P) * ceil(N/P) * (K + 2P - 2) * max(b_act, b_w).
std::uint64_t gemm_cycles(std::uint64_t m, std::uint64_t k, std::uint64_t n, int b_act, int b_w,
                          int systolic_dim);

enum class CacheOutcome { hit, miss };

class DirectMappedCache {
 public:
  explicit DirectMappedCache(const HwConfig& config);

  CacheOutcome access(std::uint64_t address);
  void reset();

  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }

 private:
  std::uint32_t line_bytes_;
  std::vector<std::uint64_t> tags_;
  std::vector<bool> valid_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

CacheOutcome cache_access(std::uint64_t entry_address, DirectMappedCache& cache);

// Line-aligned base address of every level's table. Regions are sized for
// 8-bit entries so that bases do not move when bit widths change.
std::vector<std::uint64_t> level_base_addresses(const AccessTrace& trace, const HwConfig& config);

SimReport simulate(const AccessTrace& trace, const QuantPolicy& policy, const HwConfig& config);
// Same, but reuses `cache` across calls (warm-cache studies).
SimReport simulate(const AccessTrace& trace, const QuantPolicy& policy, const HwConfig& config,
                   DirectMappedCache& cache);

// Latency of the uniform 8-bit policy.
std::uint64_t baseline_cost(const AccessTrace& trace, const HwConfig& config);

// Memoizing front end over one (trace, config) pair. The encoding stage only
// depends on per-level entry sizes, so it is cached by that signature.
class CostModel {
 public:
  CostModel(AccessTrace trace, HwConfig config);

  SimReport evaluate(const QuantPolicy& policy);
  std::uint64_t latency(const QuantPolicy& policy) { return evaluate(policy).total_cycles; }
  std::uint64_t baseline_cost();

  const AccessTrace& trace() const { return trace_; }
  const HwConfig& config() const { return config_; }

 private:
  AccessTrace trace_;
  HwConfig config_;
  std::map<std::vector<std::uint32_t>, SimReport> encoding_memo_;
  std::uint64_t baseline_ = 0;
  bool have_baseline_ = false;
};

}  // namespace hashq
