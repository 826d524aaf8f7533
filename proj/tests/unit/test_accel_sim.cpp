#include <gtest/gtest.h>

#include <random>

#include "hashq/accel_sim.hpp"
#include "hashq/errors.hpp"
#include "hashq/ngp.hpp"
#include "reference_sim.hpp"

namespace hashq {
namespace {

TEST(GemmCycles, Examples) {
  EXPECT_EQ(gemm_cycles(4, 4, 4, 8, 8, 4), 80u);
  EXPECT_EQ(testing::systolic_reference_cycles(4, 4, 4, 8, 8, 4), 80u);
  EXPECT_EQ(gemm_cycles(100, 30, 20, 1, 1, 16) * 8, gemm_cycles(100, 30, 20, 8, 8, 16));
  EXPECT_EQ(gemm_cycles(100, 30, 20, 2, 8, 16), gemm_cycles(100, 30, 20, 8, 8, 16));
  EXPECT_EQ(gemm_cycles(0, 3, 3, 8, 8, 4), 0u);
  EXPECT_THROW(gemm_cycles(1, 1, 1, 0, 8, 4), SimulationError);
}

TEST(GemmCycles, MatchesCycleByCycleArray) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint32_t> dim(1, 40);
  std::uniform_int_distribution<int> bits(1, 8), p(1, 8);
  for (int i = 0; i < 60; ++i) {
    const auto m = dim(rng), k = dim(rng), n = dim(rng);
    const int ba = bits(rng), bw = bits(rng), P = p(rng);
    ASSERT_EQ(gemm_cycles(m, k, n, ba, bw, P), testing::systolic_reference_cycles(m, k, n, ba, bw, P))
        << m << "x" << k << "x" << n << " P=" << P;
  }
}

TEST(HwConfig, TimingHelpers) {
  HwConfig c;
  EXPECT_EQ(c.transfer_cycles(64), 3u);   // 2.5 -> 3
  EXPECT_EQ(c.transfer_cycles(256), 10u); // exactly 10 despite binary 25.6
  EXPECT_EQ(c.transfer_cycles(0), 0u);
  EXPECT_EQ(c.miss_penalty(), 103u);
  EXPECT_EQ(c.coarse_split(12), 6);
  c.grid_cache_bytes = 100;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Cache, SameAddressMissThenHit) {
  DirectMappedCache cache(HwConfig{});
  EXPECT_EQ(cache_access(1000, cache), CacheOutcome::miss);
  EXPECT_EQ(cache_access(1000, cache), CacheOutcome::hit);
  EXPECT_EQ(cache_access(1001, cache), CacheOutcome::hit);
}

TEST(Cache, CacheSizeStrideConflicts) {
  HwConfig c;
  DirectMappedCache cache(c);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(cache_access((i % 2) * c.grid_cache_bytes + 128, cache), CacheOutcome::miss);
  }
  // Same pattern through the reference's explicit cache.
  AccessTrace t;
  t.level_count = 1;
  t.features_per_level = 2;
  t.level_entries = {c.grid_cache_bytes};  // 2 B entries: index 16384 is one cache size away
  for (std::uint32_t i = 0; i < 20; ++i) t.accesses.push_back({i, 0, (i % 2) * (c.grid_cache_bytes / 2) + 64});
  t.pixel_count = 20;
  c.coarse_level_split = 1;
  const auto ref = testing::reference_simulate(t, QuantPolicy::uniform(1, 0, 8), c);
  EXPECT_EQ(ref.cache_misses, 20u);
  EXPECT_EQ(simulate(t, QuantPolicy::uniform(1, 0, 8), c), ref);
}

TEST(Cache, HalvingBitsPacksEntriesIntoFewerLines) {
  AccessTrace t;
  t.level_count = 1;
  t.features_per_level = 2;
  t.level_entries = {1024};
  for (std::uint32_t i = 0; i < 64; ++i) t.accesses.push_back({i, 0, i});
  t.pixel_count = 64;
  HwConfig c;
  c.coarse_level_split = 1;
  const auto at8 = simulate(t, QuantPolicy::uniform(1, 0, 8), c);
  const auto at4 = simulate(t, QuantPolicy::uniform(1, 0, 4), c);
  EXPECT_EQ(at8.cache_misses, 2u);  // 128 bytes
  EXPECT_EQ(at4.cache_misses, 1u);  // 64 bytes
}

TEST(Simulate, EmptyTraceIsAllZero) {
  AccessTrace t;
  t.level_count = 4;
  t.features_per_level = 2;
  t.level_entries = {16, 16, 16, 16};
  const auto r = simulate(t, QuantPolicy::uniform(4, 3, 8), HwConfig{});
  EXPECT_EQ(r, SimReport{});
}

TEST(Simulate, UnresolvedPolicyIsSimulationError) {
  std::mt19937_64 rng(1);
  const auto t = testing::random_trace(rng, 100, 4, 2, 3);
  EXPECT_THROW(simulate(t, QuantPolicy::uniform(3, 3, 8), HwConfig{}), SimulationError);
  EXPECT_THROW(simulate(t, QuantPolicy::uniform(4, 2, 8), HwConfig{}), SimulationError);
}

TEST(Simulate, MatchesReferenceAndConservesBytes) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 60; ++i) {
    const std::uint32_t levels = 2 + static_cast<std::uint32_t>(rng() % 6);
    const std::uint32_t features = 1 + static_cast<std::uint32_t>(rng() % 4);
    const auto t = testing::random_trace(rng, 3000, levels, features, 3);
    const auto p = testing::random_policy(rng, static_cast<int>(levels), 3);
    HwConfig c;
    c.grid_cache_bytes = 64u << (rng() % 8);
    c.cache_line_bytes = 16u << (rng() % 3);
    if (c.grid_cache_bytes < c.cache_line_bytes) c.grid_cache_bytes = c.cache_line_bytes;
    c.subgrid_pixels = 1 + static_cast<std::uint32_t>(rng() % 50);
    c.coarse_level_split = static_cast<int>(rng() % (levels + 1)) - (i % 4 == 0 ? 10 : 0);
    c.dram_bytes_per_cycle = 0.1 * static_cast<double>(1 + rng() % 400);
    c.systolic_dim = 1 + static_cast<int>(rng() % 16);
    const auto r = simulate(t, p, c);
    ASSERT_EQ(r, testing::reference_simulate(t, p, c)) << "case " << i;
    EXPECT_EQ(r.dram_bytes, r.cache_misses * c.cache_line_bytes + r.prefetched_bytes);
    EXPECT_EQ(r.total_cycles, r.encoding_cycles + r.mlp_cycles + r.subgrid_prefetch_cycles);
    EXPECT_EQ(r, simulate(t, p, c));
  }
}

TEST(Simulate, OverlapSwitchTakesTheMaxOfStages) {
  std::mt19937_64 rng(4);
  const auto t = testing::random_trace(rng, 2000, 4, 2, 3);
  HwConfig c;
  c.overlap_stages = true;
  const auto p = QuantPolicy::uniform(4, 3, 6);
  const auto r = simulate(t, p, c);
  EXPECT_EQ(r.total_cycles, std::max(r.encoding_cycles + r.subgrid_prefetch_cycles, r.mlp_cycles));
  EXPECT_EQ(r, testing::reference_simulate(t, p, c));
}

TEST(Simulate, WarmCacheNeverMissesMoreThanCold) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 20; ++i) {
    const auto t = testing::random_trace(rng, 4000, 4, 2, 3);
    const auto p = testing::random_policy(rng, 4, 3);
    HwConfig c;
    c.grid_cache_bytes = 2048;
    DirectMappedCache cache(c);
    const auto first = simulate(t, p, c, cache);
    const auto second = simulate(t, p, c, cache);
    EXPECT_LE(second.cache_misses, first.cache_misses);
  }
}

TEST(Simulate, ExportedTraceMatchesHandModelAndReference) {
  const auto m = ToyNgpModel::initialize(NgpConfig{}, 1);
  const auto t = export_trace(m, 128, 128);
  HwConfig c;
  c.grid_cache_bytes = 65536;
  const auto p = QuantPolicy::uniform(12, 3, 8);
  const auto r = simulate(t, p, c);
  const auto hand = testing::hand_model(NgpConfig{}, 128, 128, 32, c);
  EXPECT_EQ(r.total_cycles, hand.total_cycles);
  EXPECT_EQ(r.encoding_cycles, hand.encoding_cycles);
  EXPECT_EQ(r.mlp_cycles, hand.mlp_cycles);
  EXPECT_EQ(r.subgrid_prefetch_cycles, hand.subgrid_prefetch_cycles);
  EXPECT_EQ(r.cache_misses, hand.cache_misses);
  EXPECT_EQ(r.dram_bytes, hand.dram_bytes);
  EXPECT_EQ(r, testing::reference_simulate(t, p, c));
}

TEST(Simulate, FourBitMlpHalvesMlpCycles) {
  const auto m = ToyNgpModel::initialize(NgpConfig{}, 1);
  const auto t = export_trace(m, 64, 64);
  QuantPolicy p = QuantPolicy::uniform(12, 3, 8);
  const auto base = simulate(t, p, HwConfig{});
  for (auto& l : p.mlp_bits) l = {4, 4};
  const auto half = simulate(t, p, HwConfig{});
  EXPECT_EQ(half.mlp_cycles * 2, base.mlp_cycles);
  EXPECT_EQ(half.encoding_cycles, base.encoding_cycles);
  EXPECT_EQ(baseline_cost(t, HwConfig{}), base.total_cycles);
}

// Byte footprint of the cache-resident levels at 8 bits.
std::uint64_t coarse_footprint(const AccessTrace& t, const HwConfig& c) {
  std::uint64_t bytes = 0;
  const auto split = static_cast<std::uint32_t>(c.coarse_split(t.level_count));
  for (std::uint32_t l = 0; l < split; ++l) {
    bytes += (static_cast<std::uint64_t>(t.level_entries[l]) * t.entry_bytes(8) + c.cache_line_bytes - 1) /
             c.cache_line_bytes * c.cache_line_bytes;
  }
  return bytes;
}

// MLP and subgrid-buffered units are monotone for any cache. Cache-resident
// levels are monotone once their tables cannot conflict with each other.
TEST(Simulate, LoweringOneUnitNeverIncreasesLatency) {
  std::mt19937_64 rng(31);
  int checked = 0;
  for (int i = 0; i < 40; ++i) {
    const std::uint32_t levels = 2 + static_cast<std::uint32_t>(rng() % 5);
    const auto t = testing::random_trace(rng, 3000, levels, 1 + static_cast<std::uint32_t>(rng() % 3), 3);
    HwConfig c;
    c.grid_cache_bytes = 256u << (rng() % 6);
    const bool conflict_free = coarse_footprint(t, c) <= c.grid_cache_bytes;
    const int split = c.coarse_split(levels);
    CostModel model(t, c);
    for (int j = 0; j < 10; ++j) {
      auto p = testing::random_policy(rng, static_cast<int>(levels), 3);
      const auto before = model.latency(p);
      for (int u = 0; u < p.unit_count(); ++u) {
        const int b = p.bits_at(u);
        if (b == 1 || (u < split && !conflict_free)) continue;
        p.set_bits_at(u, b - 1);
        ASSERT_LE(model.latency(p), before) << "trace " << i << " unit " << u << " " << p.to_string();
        p.set_bits_at(u, b);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 1000);
}

// Packing a level's entries moves them to other sets of the direct-mapped
// cache, so a narrower level can collide with a neighbour it used to miss.
TEST(Simulate, ConflictAnomalyOnCacheResidentLevels) {
  AccessTrace t;
  t.level_count = 2;
  t.features_per_level = 2;
  t.level_entries = {64, 64};  // 128 B per level at 8 bits
  t.accesses = {{0, 0, 32}, {1, 1, 0}, {2, 0, 32}};
  t.pixel_count = 3;
  HwConfig c;
  c.grid_cache_bytes = 128;
  c.coarse_level_split = 2;
  QuantPolicy p = QuantPolicy::uniform(2, 0, 8);
  const auto wide = simulate(t, p, c);
  p.hash_bits[0] = 4;
  const auto narrow = simulate(t, p, c);
  EXPECT_EQ(wide.cache_misses, 2u);
  EXPECT_EQ(narrow.cache_misses, 3u);
  EXPECT_GT(narrow.total_cycles, wide.total_cycles);
  EXPECT_EQ(narrow, testing::reference_simulate(t, p, c));
}

TEST(CostModel, AgreesWithSimulate) {
  std::mt19937_64 rng(12);
  const auto t = testing::random_trace(rng, 3000, 6, 2, 3);
  CostModel model(t, HwConfig{});
  for (int i = 0; i < 30; ++i) {
    const auto p = testing::random_policy(rng, 6, 3);
    EXPECT_EQ(model.evaluate(p), simulate(t, p, HwConfig{}));
  }
  EXPECT_EQ(model.baseline_cost(), baseline_cost(t, HwConfig{}));
}

}  // namespace
}  // namespace hashq
