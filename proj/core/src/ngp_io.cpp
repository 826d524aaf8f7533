#include <fstream>
#include <string>

#include "hashq/binary_io.hpp"
#include "hashq/errors.hpp"
#include "hashq/ngp.hpp"

namespace hashq {

using binary::read_le;
using binary::write_le;

namespace {

void write_floats(std::ostream& out, const std::vector<float>& v) {
  for (const float x : v) write_le<float>(out, x);
}

void read_floats(std::istream& in, std::vector<float>& v) {
  for (auto& x : v) x = read_le<float>(in);
}

}  // namespace

void save_checkpoint(std::ostream& out, const ToyNgpModel& model) {
  model.validate();
  const auto& c = model.config;
  binary::write_magic(out, "HNGP");
  write_le<std::uint32_t>(out, kCheckpointVersion);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.num_levels));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.features_per_level));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.table_size_log2));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.base_resolution));
  write_le<double>(out, c.growth_factor);
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.mlp_hidden_layers));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.mlp_width));
  write_le<std::uint32_t>(out, static_cast<std::uint32_t>(c.output_channels));
  write_floats(out, model.tables);
  for (const auto& l : model.layers) {
    write_floats(out, l.weight);
    write_floats(out, l.bias);
  }
}

void save_checkpoint(const std::filesystem::path& path, const ToyNgpModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write checkpoint '" + path.string() + "'");
  save_checkpoint(out, model);
}

ToyNgpModel load_checkpoint(std::istream& in) {
  binary::expect_magic(in, "HNGP");
  const auto version = read_le<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  NgpConfig c;
  c.num_levels = static_cast<int>(read_le<std::uint32_t>(in));
  c.features_per_level = static_cast<int>(read_le<std::uint32_t>(in));
  c.table_size_log2 = static_cast<int>(read_le<std::uint32_t>(in));
  c.base_resolution = static_cast<int>(read_le<std::uint32_t>(in));
  c.growth_factor = read_le<double>(in);
  c.mlp_hidden_layers = static_cast<int>(read_le<std::uint32_t>(in));
  c.mlp_width = static_cast<int>(read_le<std::uint32_t>(in));
  c.output_channels = static_cast<int>(read_le<std::uint32_t>(in));
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint config block: ") + e.what());
  }
  if (c.features_per_level > 64 || c.mlp_width > 4096 || c.mlp_hidden_layers > 64 || c.output_channels > 64) {
    throw FormatError("checkpoint config block has implausible dimensions");
  }

  ToyNgpModel m;
  m.config = c;
  m.tables.resize(static_cast<std::size_t>(c.num_levels) * c.table_capacity() * c.features_per_level);
  read_floats(in, m.tables);
  for (int i = 0; i < c.layer_count(); ++i) {
    DenseLayer l;
    l.in_dim = c.layer_in(i);
    l.out_dim = c.layer_out(i);
    l.weight.resize(static_cast<std::size_t>(l.in_dim) * l.out_dim);
    l.bias.resize(static_cast<std::size_t>(l.out_dim));
    read_floats(in, l.weight);
    read_floats(in, l.bias);
    m.layers.push_back(std::move(l));
  }
  try {
    m.validate();
  } catch (const Error& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  return m;
}

ToyNgpModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint '" + path.string() + "'");
  return load_checkpoint(in);
}

}  // namespace hashq
