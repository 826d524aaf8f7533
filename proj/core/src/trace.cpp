#include "hashq/trace.hpp"

#include <fstream>
#include <string>

#include "hashq/binary_io.hpp"
#include "hashq/errors.hpp"

namespace hashq {

using binary::read_le;
using binary::write_le;

std::uint32_t AccessTrace::entry_bytes(int bits) const {
  return (features_per_level * static_cast<std::uint32_t>(bits) + 7u) / 8u;
}

void AccessTrace::validate() const {
  if (level_entries.size() != level_count) throw FormatError("trace level table count mismatch");
  if (features_per_level == 0) throw FormatError("trace has zero features per level");
  for (const auto& a : accesses) {
    if (a.level >= level_count) throw FormatError("trace access level out of range");
    if (a.entry_index >= level_entries[a.level]) throw FormatError("trace entry index out of range");
  }
}

void write_trace(std::ostream& out, const AccessTrace& trace) {
  binary::write_magic(out, "HTRC");
  write_le<std::uint32_t>(out, kTraceVersion);
  write_le<std::uint32_t>(out, trace.pixel_count);
  write_le<std::uint32_t>(out, trace.level_count);
  write_le<std::uint32_t>(out, trace.features_per_level);
  for (const auto e : trace.level_entries) write_le<std::uint32_t>(out, e);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(trace.accesses.size()));
  for (const auto& a : trace.accesses) {
    write_le<std::uint32_t>(out, a.pixel_id);
    write_le<std::uint16_t>(out, a.level);
    write_le<std::uint32_t>(out, a.entry_index);
  }
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(trace.gemms.size()));
  for (const auto& g : trace.gemms) {
    write_le<std::uint16_t>(out, g.layer_id);
    write_le<std::uint32_t>(out, g.m);
    write_le<std::uint32_t>(out, g.k);
    write_le<std::uint32_t>(out, g.n);
  }
}

void write_trace(const std::filesystem::path& path, const AccessTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write trace '" + path.string() + "'");
  write_trace(out, trace);
}

AccessTrace read_trace(std::istream& in) {
  binary::expect_magic(in, "HTRC");
  const auto version = read_le<std::uint32_t>(in);
  if (version != kTraceVersion) {
    throw FormatError("unsupported trace version " + std::to_string(version));
  }
  AccessTrace t;
  t.pixel_count = read_le<std::uint32_t>(in);
  t.level_count = read_le<std::uint32_t>(in);
  t.features_per_level = read_le<std::uint32_t>(in);
  if (t.level_count > (1u << 16)) throw FormatError("implausible trace level count");
  t.level_entries.resize(t.level_count);
  for (auto& e : t.level_entries) e = read_le<std::uint32_t>(in);

  const auto access_count = read_le<std::uint32_t>(in);
  t.accesses.reserve(std::min<std::uint32_t>(access_count, 1u << 24));
  for (std::uint32_t i = 0; i < access_count; ++i) {
    HashAccess a;
    a.pixel_id = read_le<std::uint32_t>(in);
    a.level = read_le<std::uint16_t>(in);
    a.entry_index = read_le<std::uint32_t>(in);
    t.accesses.push_back(a);
  }
  const auto gemm_count = read_le<std::uint32_t>(in);
  t.gemms.reserve(std::min<std::uint32_t>(gemm_count, 1u << 20));
  for (std::uint32_t i = 0; i < gemm_count; ++i) {
    GemmDescriptor g;
    g.layer_id = read_le<std::uint16_t>(in);
    g.m = read_le<std::uint32_t>(in);
    g.k = read_le<std::uint32_t>(in);
    g.n = read_le<std::uint32_t>(in);
    t.gemms.push_back(g);
  }
  t.validate();
  return t;
}

AccessTrace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open trace '" + path.string() + "'");
  return read_trace(in);
}

}  // namespace hashq
