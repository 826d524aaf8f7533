#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hashq {

struct LayerBits {
  int weight_bits = 8;
  int activation_bits = 8;

  bool operator==(const LayerBits&) const = default;
  auto operator<=>(const LayerBits&) const = default;
};

// Bit-width assignment for every quantizable unit. Units are ordered globally
// as: hash levels coarse-to-fine, then for each MLP layer its weight unit
// followed by its activation unit.
struct QuantPolicy {
  std::vector<int> hash_bits;
  std::vector<LayerBits> mlp_bits;

  static QuantPolicy uniform(int num_levels, int num_layers, int bits);

  int unit_count() const { return static_cast<int>(hash_bits.size() + 2 * mlp_bits.size()); }
  int bits_at(int unit) const;
  void set_bits_at(int unit, int bits);

  std::vector<int> flatten() const;

  // Throws ConfigError when any entry lies outside [1, 8].
  void validate() const;

  // Slash-separated form used in episode logs and policy files:
  // hash levels then per-layer pairs, e.g. "8/8/4/w6a8/w4a4".
  std::string to_string() const;
  static QuantPolicy parse(std::string_view text);

  bool operator==(const QuantPolicy&) const = default;
  auto operator<=>(const QuantPolicy&) const = default;
};

}  // namespace hashq
