#include "hashq/policy.hpp"

#include <charconv>
#include <sstream>

#include "hashq/errors.hpp"
#include "hashq/quantizer.hpp"

namespace hashq {
namespace {

int parse_int(std::string_view text, std::string_view whole) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw FormatError("malformed policy '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

QuantPolicy QuantPolicy::uniform(int num_levels, int num_layers, int bits) {
  QuantPolicy p;
  p.hash_bits.assign(static_cast<std::size_t>(num_levels), bits);
  p.mlp_bits.assign(static_cast<std::size_t>(num_layers), LayerBits{bits, bits});
  p.validate();
  return p;
}

int QuantPolicy::bits_at(int unit) const {
  const int levels = static_cast<int>(hash_bits.size());
  if (unit < 0 || unit >= unit_count()) throw ConfigError("policy unit index out of range");
  if (unit < levels) return hash_bits[static_cast<std::size_t>(unit)];
  const int rel = unit - levels;
  const auto& layer = mlp_bits[static_cast<std::size_t>(rel / 2)];
  return rel % 2 == 0 ? layer.weight_bits : layer.activation_bits;
}

void QuantPolicy::set_bits_at(int unit, int bits) {
  const int levels = static_cast<int>(hash_bits.size());
  if (unit < 0 || unit >= unit_count()) throw ConfigError("policy unit index out of range");
  if (unit < levels) {
    hash_bits[static_cast<std::size_t>(unit)] = bits;
    return;
  }
  const int rel = unit - levels;
  auto& layer = mlp_bits[static_cast<std::size_t>(rel / 2)];
  (rel % 2 == 0 ? layer.weight_bits : layer.activation_bits) = bits;
}

std::vector<int> QuantPolicy::flatten() const {
  std::vector<int> out(hash_bits);
  for (const auto& l : mlp_bits) {
    out.push_back(l.weight_bits);
    out.push_back(l.activation_bits);
  }
  return out;
}

void QuantPolicy::validate() const {
  for (const int b : flatten()) {
    if (b < kMinBits || b > kMaxBits) {
      throw ConfigError("policy bit width " + std::to_string(b) + " outside [1, 8]");
    }
  }
}

std::string QuantPolicy::to_string() const {
  std::ostringstream os;
  bool first = true;
  auto sep = [&] {
    if (!first) os << '/';
    first = false;
  };
  for (const int b : hash_bits) {
    sep();
    os << b;
  }
  for (const auto& l : mlp_bits) {
    sep();
    os << 'w' << l.weight_bits << 'a' << l.activation_bits;
  }
  return os.str();
}

QuantPolicy QuantPolicy::parse(std::string_view text) {
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ')) {
    text.remove_suffix(1);
  }
  if (text.empty()) throw FormatError("empty policy");
  QuantPolicy p;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('/', start), text.size());
    const auto tok = text.substr(start, end - start);
    if (tok.empty()) throw FormatError("malformed policy '" + std::string(text) + "'");
    if (tok.front() == 'w') {
      const auto a = tok.find('a');
      if (a == std::string_view::npos) throw FormatError("malformed policy '" + std::string(text) + "'");
      p.mlp_bits.push_back({parse_int(tok.substr(1, a - 1), text), parse_int(tok.substr(a + 1), text)});
    } else {
      if (!p.mlp_bits.empty()) {
        throw FormatError("hash levels must precede MLP layers in '" + std::string(text) + "'");
      }
      p.hash_bits.push_back(parse_int(tok, text));
    }
    start = end + 1;
  }
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw FormatError(e.what());
  }
  return p;
}

}  // namespace hashq
