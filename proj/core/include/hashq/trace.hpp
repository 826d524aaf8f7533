#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <vector>

namespace hashq {

struct HashAccess {
  std::uint32_t pixel_id = 0;
  std::uint16_t level = 0;
  std::uint32_t entry_index = 0;

  bool operator==(const HashAccess&) const = default;
};

struct GemmDescriptor {
  std::uint16_t layer_id = 0;
  std::uint32_t m = 0;
  std::uint32_t k = 0;
  std::uint32_t n = 0;

  bool operator==(const GemmDescriptor&) const = default;
};

// Ordered hash-table accesses plus the MLP work they feed. Accesses are
// grouped by pixel; consecutive runs of `subgrid_pixels` distinct pixels form
// one subgrid tile for the simulator.
struct AccessTrace {
  std::uint32_t pixel_count = 0;
  std::uint32_t level_count = 0;
  std::uint32_t features_per_level = 2;
  std::vector<std::uint32_t> level_entries;  // table entries per level
  std::vector<HashAccess> accesses;
  std::vector<GemmDescriptor> gemms;

  // Bytes occupied by one table entry of `level` stored at `bits` per feature.
  std::uint32_t entry_bytes(int bits) const;

  // Throws FormatError on out-of-range levels or entry indices.
  void validate() const;

  bool operator==(const AccessTrace&) const = default;
};

inline constexpr std::uint32_t kTraceVersion = 1;

// Layout: "HTRC", version u32, pixel_count u32, level_count u32,
// features_per_level u32, level_entries u32[level_count],
// access_count u32, {pixel_id u32, level u16, entry_index u32}[access_count],
// gemm_count u32, {layer_id u16, M u32, K u32, N u32}[gemm_count].
void write_trace(std::ostream& out, const AccessTrace& trace);
void write_trace(const std::filesystem::path& path, const AccessTrace& trace);
AccessTrace read_trace(std::istream& in);
AccessTrace read_trace(const std::filesystem::path& path);

}  // namespace hashq
