#include "reference_sim.hpp"

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hashq::testing {
namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return a / b + (a % b != 0); }

// Bandwidths used in tests are multiples of 0.1 B/cycle.
std::uint64_t transfer(std::uint64_t bytes, double bytes_per_cycle) {
  const auto tenths = static_cast<std::uint64_t>(std::llround(bytes_per_cycle * 10.0));
  if (std::abs(bytes_per_cycle * 10.0 - static_cast<double>(tenths)) > 1e-9 || tenths == 0) {
    throw std::invalid_argument("reference needs a bandwidth in tenths of a byte per cycle");
  }
  return ceil_div(bytes * 10, tenths);
}

std::uint64_t entry_size(std::uint32_t features, int bits) {
  return ceil_div(static_cast<std::uint64_t>(features) * bits, 8);
}

}  // namespace

SimReport reference_simulate(const AccessTrace& trace, const QuantPolicy& policy, const HwConfig& config) {
  SimReport r;
  r.pixel_count = trace.pixel_count;
  const std::uint64_t line = config.cache_line_bytes;
  const std::uint64_t sets = config.grid_cache_bytes / line;
  const std::uint32_t split = config.coarse_level_split < 0
                                  ? trace.level_count / 2
                                  : std::min<std::uint32_t>(config.coarse_level_split, trace.level_count);
  const std::uint64_t penalty = config.dram_fixed_latency_cycles + transfer(line, config.dram_bytes_per_cycle);

  std::vector<std::uint64_t> base;
  std::uint64_t cursor = 0;
  for (std::uint32_t l = 0; l < trace.level_count; ++l) {
    base.push_back(cursor);
    const std::uint64_t bytes = trace.level_entries[l] * entry_size(trace.features_per_level, 8);
    cursor += ceil_div(bytes, line) * line;
  }

  std::map<std::uint64_t, std::uint64_t> resident;  // set -> line number
  std::set<std::pair<std::uint32_t, std::uint32_t>> touched;
  std::uint64_t pixels_in_tile = 0;
  bool any = false;
  std::uint32_t prev_pixel = 0;

  auto flush_tile = [&] {
    std::uint64_t bytes = 0;
    for (const auto& [level, entry] : touched) {
      (void)entry;
      bytes += entry_size(trace.features_per_level, policy.hash_bits[level]);
    }
    r.prefetched_bytes += bytes;
    r.subgrid_prefetch_cycles += transfer(bytes, config.dram_bytes_per_cycle);
    ++r.subgrid_tiles;
    touched.clear();
    pixels_in_tile = 0;
  };

  for (const HashAccess& a : trace.accesses) {
    if (!any || a.pixel_id != prev_pixel) {
      if (pixels_in_tile == config.subgrid_pixels) flush_tile();
      ++pixels_in_tile;
      prev_pixel = a.pixel_id;
      any = true;
    }
    const std::uint64_t size = entry_size(trace.features_per_level, policy.hash_bits[a.level]);
    if (a.level >= split) {
      touched.insert({a.level, a.entry_index});
      r.encoding_cycles += 1;
      continue;
    }
    const std::uint64_t first = base[a.level] + a.entry_index * size;
    const std::uint64_t last = first + size - 1;
    std::uint64_t cost = 0;
    for (std::uint64_t ln = first / line; ln <= last / line; ++ln) {
      auto it = resident.find(ln % sets);
      if (it != resident.end() && it->second == ln) {
        ++r.cache_hits;
      } else {
        resident[ln % sets] = ln;
        ++r.cache_misses;
        cost += penalty;
      }
    }
    r.encoding_cycles += cost == 0 ? 1 : cost;
  }
  if (any) flush_tile();

  for (const GemmDescriptor& g : trace.gemms) {
    const LayerBits& b = policy.mlp_bits.at(g.layer_id);
    r.mlp_cycles += systolic_reference_cycles(g.m, g.k, g.n, b.activation_bits, b.weight_bits,
                                              config.systolic_dim);
  }
  r.dram_bytes = r.cache_misses * line + r.prefetched_bytes;
  r.total_cycles = config.overlap_stages
                       ? std::max(r.encoding_cycles + r.subgrid_prefetch_cycles, r.mlp_cycles)
                       : r.encoding_cycles + r.subgrid_prefetch_cycles + r.mlp_cycles;
  r.cycles_per_ray = trace.pixel_count == 0 ? 0.0 : static_cast<double>(r.total_cycles) / trace.pixel_count;
  return r;
}

std::uint64_t systolic_reference_cycles(std::uint32_t m, std::uint32_t k, std::uint32_t n, int b_act,
                                        int b_w, int p) {
  if (m == 0 || k == 0 || n == 0) return 0;
  const auto P = static_cast<std::uint32_t>(p);
  const std::uint64_t step_cycles = static_cast<std::uint64_t>(std::max(b_act, b_w));
  std::uint64_t cycles = 0;
  for (std::uint32_t r0 = 0; r0 < m; r0 += P) {
    for (std::uint32_t c0 = 0; c0 < n; c0 += P) {
      // A(i, kk) = i + 2 kk + 1, B(kk, j) = j - kk; small integers keep the check exact.
      std::vector<long long> acc(P * P, 0), a_reg(P * P, 0), b_reg(P * P, 0);
      std::vector<int> a_valid(P * P, 0), b_valid(P * P, 0), consumed(P * P, 0);
      std::uint64_t steps = 0;
      auto all_done = [&] {
        for (std::uint32_t i = 0; i < P * P; ++i) {
          if (consumed[i] < static_cast<int>(k)) return false;
        }
        return true;
      };
      while (!all_done()) {
        // Shift: A moves right, B moves down; edges load skewed inputs.
        for (std::uint32_t i = 0; i < P; ++i) {
          for (std::uint32_t j = P; j-- > 1;) {
            a_reg[i * P + j] = a_reg[i * P + j - 1];
            a_valid[i * P + j] = a_valid[i * P + j - 1];
          }
          const long long t = static_cast<long long>(steps) - i;
          a_valid[i * P] = t >= 0 && t < static_cast<long long>(k);
          a_reg[i * P] = a_valid[i * P] ? static_cast<long long>(r0 + i) + 2 * t + 1 : 0;
        }
        for (std::uint32_t j = 0; j < P; ++j) {
          for (std::uint32_t i = P; i-- > 1;) {
            b_reg[i * P + j] = b_reg[(i - 1) * P + j];
            b_valid[i * P + j] = b_valid[(i - 1) * P + j];
          }
          const long long t = static_cast<long long>(steps) - j;
          b_valid[j] = t >= 0 && t < static_cast<long long>(k);
          b_reg[j] = b_valid[j] ? static_cast<long long>(c0 + j) - t : 0;
        }
        for (std::uint32_t i = 0; i < P * P; ++i) {
          if (a_valid[i] && b_valid[i]) {
            acc[i] += a_reg[i] * b_reg[i];
            ++consumed[i];
          }
        }
        ++steps;
        cycles += step_cycles;
      }
      for (std::uint32_t i = 0; i < P && r0 + i < m; ++i) {
        for (std::uint32_t j = 0; j < P && c0 + j < n; ++j) {
          long long expect = 0;
          for (long long t = 0; t < k; ++t) {
            expect += (static_cast<long long>(r0 + i) + 2 * t + 1) * (static_cast<long long>(c0 + j) - t);
          }
          if (acc[i * P + j] != expect) throw std::logic_error("systolic reference computed a wrong product");
        }
      }
    }
  }
  return cycles;
}

SimReport hand_model(const NgpConfig& ngp, int width, int height, int tile_side, const HwConfig& config) {
  SimReport r;
  const std::uint64_t pixels = static_cast<std::uint64_t>(width) * height;
  const int levels = ngp.num_levels;
  const int split = config.coarse_level_split < 0 ? levels / 2 : config.coarse_level_split;
  const std::uint64_t entry = ceil_div(static_cast<std::uint64_t>(ngp.features_per_level) * 8, 8);
  const std::uint64_t line = config.cache_line_bytes;
  const std::uint64_t penalty = config.dram_fixed_latency_cycles + transfer(line, config.dram_bytes_per_cycle);

  // Coarse levels: dense, every vertex touched once cold, no conflicts.
  std::uint64_t layout = 0;
  std::uint64_t misses = 0;
  for (int l = 0; l < split; ++l) {
    const std::uint64_t n = ngp.resolution(l);
    if ((n + 1) * (n + 1) > ngp.table_capacity() || n > static_cast<std::uint64_t>(std::min(width, height))) {
      throw std::invalid_argument("hand model needs dense coarse levels no finer than the image");
    }
    const std::uint64_t lines = ceil_div((n + 1) * (n + 1) * entry, line);
    misses += lines;
    layout += lines * line;
  }
  if (layout > config.grid_cache_bytes) throw std::invalid_argument("hand model needs a conflict-free cache");
  const std::uint64_t coarse_accesses = pixels * split * 4;
  r.cache_misses = misses;
  r.cache_hits = coarse_accesses - misses;
  r.encoding_cycles = r.cache_hits + misses * penalty + pixels * (levels - split) * 4;

  // Fine levels: per tile, the vertex box spanned by the tile's cells, hashed.
  auto cell = [](int px, int extent, int res) {
    return static_cast<std::uint32_t>(std::floor((px + 0.5) / extent * res));
  };
  const int tx = (width + tile_side - 1) / tile_side;
  const int ty = (height + tile_side - 1) / tile_side;
  for (int ty0 = 0; ty0 < ty; ++ty0) {
    for (int tx0 = 0; tx0 < tx; ++tx0) {
      const int x0 = tx0 * tile_side, x1 = std::min(width, x0 + tile_side) - 1;
      const int y0 = ty0 * tile_side, y1 = std::min(height, y0 + tile_side) - 1;
      std::uint64_t bytes = 0;
      for (int l = split; l < levels; ++l) {
        const int res = ngp.resolution(l);
        // Every (column, row) pair of the tile occurs, so the touched
        // vertices are the product of the per-axis vertex sets.
        std::set<std::uint32_t> vx, vy, slots;
        for (int x = x0; x <= x1; ++x) {
          vx.insert(cell(x, width, res));
          vx.insert(cell(x, width, res) + 1);
        }
        for (int y = y0; y <= y1; ++y) {
          vy.insert(cell(y, height, res));
          vy.insert(cell(y, height, res) + 1);
        }
        for (const auto gy : vy) {
          for (const auto gx : vx) slots.insert(hash_index(gx, gy, l, ngp));
        }
        bytes += slots.size() * entry;
      }
      r.prefetched_bytes += bytes;
      r.subgrid_prefetch_cycles += transfer(bytes, config.dram_bytes_per_cycle);
      ++r.subgrid_tiles;

      const std::uint64_t m = static_cast<std::uint64_t>(x1 - x0 + 1) * (y1 - y0 + 1);
      const std::uint64_t P = config.systolic_dim;
      for (int layer = 0; layer < ngp.layer_count(); ++layer) {
        const std::uint64_t k = ngp.layer_in(layer), n = ngp.layer_out(layer);
        r.mlp_cycles += ceil_div(m, P) * ceil_div(n, P) * (k + 2 * P - 2) * 8;
      }
    }
  }
  r.dram_bytes = misses * line + r.prefetched_bytes;
  r.total_cycles = r.encoding_cycles + r.subgrid_prefetch_cycles + r.mlp_cycles;
  r.pixel_count = pixels;
  r.cycles_per_ray = static_cast<double>(r.total_cycles) / static_cast<double>(pixels);
  return r;
}

AccessTrace random_trace(std::mt19937_64& rng, std::uint32_t max_accesses, std::uint32_t levels,
                         std::uint32_t features, std::uint32_t layers) {
  AccessTrace t;
  t.level_count = levels;
  t.features_per_level = features;
  std::uniform_int_distribution<std::uint32_t> entries(4, 3000);
  for (std::uint32_t l = 0; l < levels; ++l) t.level_entries.push_back(entries(rng));
  const std::uint32_t count = std::uniform_int_distribution<std::uint32_t>(0, max_accesses)(rng);
  std::uniform_int_distribution<std::uint32_t> level(0, levels - 1);
  std::uint32_t pixel = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    if (i > 0 && rng() % 4 == 0) pixel += 1 + static_cast<std::uint32_t>(rng() % 3);
    const std::uint32_t l = level(rng);
    // Mostly local indices so the cache sees reuse, sometimes a far jump.
    std::uint32_t e = static_cast<std::uint32_t>(rng() % t.level_entries[l]);
    if (rng() % 3 != 0) e = std::min(t.level_entries[l] - 1, (pixel * 7 + static_cast<std::uint32_t>(rng() % 5)) % t.level_entries[l]);
    t.accesses.push_back({pixel, static_cast<std::uint16_t>(l), e});
  }
  t.pixel_count = count == 0 ? 0 : pixel + 1;
  std::uniform_int_distribution<std::uint32_t> dim(1, 80);
  for (std::uint32_t layer = 0; layer < layers; ++layer) {
    t.gemms.push_back({static_cast<std::uint16_t>(layer), dim(rng), dim(rng), dim(rng)});
  }
  return t;
}

QuantPolicy random_policy(std::mt19937_64& rng, int levels, int layers) {
  std::uniform_int_distribution<int> bits(1, 8);
  QuantPolicy p = QuantPolicy::uniform(levels, layers, 8);
  for (int u = 0; u < p.unit_count(); ++u) p.set_bits_at(u, bits(rng));
  return p;
}

}  // namespace hashq::testing
