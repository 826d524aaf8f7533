#include "hashq/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hashq/errors.hpp"

namespace hashq {
namespace {

void check_bits(int bits) {
  if (bits < kMinBits || bits > kMaxBits) {
    throw QuantizationError("bit width " + std::to_string(bits) + " outside [1, 8]");
  }
}

void check_range(const ValueRange& range) {
  if (!std::isfinite(range.v_min) || !std::isfinite(range.v_max) || range.v_min > range.v_max) {
    throw CalibrationError("invalid value range");
  }
}

// Sorted-sample quantile with linear interpolation between order statistics.
double sorted_quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ValueRange finish_range(double lo, double hi) {
  ValueRange r{lo, hi, false};
  if (lo == hi) {
    r.v_min = lo - kDegenerateRangeEpsilon;
    r.v_max = hi + kDegenerateRangeEpsilon;
    r.degenerate = true;
  }
  return r;
}

template <typename T>
ValueRange calibrate_impl(std::span<const T> samples, double percentile) {
  if (samples.empty()) throw CalibrationError("cannot calibrate an empty sample set");
  if (!(percentile > 0.0 && percentile <= 1.0)) {
    throw CalibrationError("calibration percentile must lie in (0, 1]");
  }
  for (const T v : samples) {
    if (!std::isfinite(v)) throw CalibrationError("non-finite calibration sample");
  }
  if (percentile == 1.0) {
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    return finish_range(static_cast<double>(*mn), static_cast<double>(*mx));
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double tail = (1.0 - percentile) / 2.0;
  return finish_range(sorted_quantile(sorted, tail), sorted_quantile(sorted, 1.0 - tail));
}

}  // namespace

double round_half_away(double x) { return std::round(x); }

double QuantParams::representable_min() const {
  return mode == QuantMode::symmetric_weight ? q_min * scale : (q_min - zero_point) * scale;
}

double QuantParams::representable_max() const {
  return mode == QuantMode::symmetric_weight ? q_max * scale : (q_max - zero_point) * scale;
}

ValueRange calibrate_range(std::span<const double> samples, double percentile) {
  return calibrate_impl(samples, percentile);
}

ValueRange calibrate_range(std::span<const float> samples, double percentile) {
  return calibrate_impl(samples, percentile);
}

ValueRange symmetric_hull(const ValueRange& range) {
  check_range(range);
  const double m = std::max(std::abs(range.v_min), std::abs(range.v_max));
  return finish_range(-m, m);
}

QuantParams make_weight_params(const ValueRange& range, int bits, SymmetricBounds bounds) {
  check_bits(bits);
  check_range(range);
  if (!(range.span() > 0.0)) throw CalibrationError("weight range has zero width");

  QuantParams p;
  p.bits = bits;
  p.mode = QuantMode::symmetric_weight;
  p.scale = range.span() / static_cast<double>((1 << bits) - 1);
  p.zero_point = 0;
  const int half = 1 << (bits - 1);
  p.q_max = half - 1;
  if (bounds == SymmetricBounds::literal) {
    p.q_min = -half - 1;
  } else {
    p.q_min = -p.q_max;
  }
  if (bits == 1 && bounds == SymmetricBounds::balanced) {
    // 2^0 - 1 leaves no codes; fall back to {-1, 0, 1} bounds.
    p.q_min = -1;
    p.q_max = 1;
  }
  return p;
}

QuantParams make_activation_params(const ValueRange& range, int bits) {
  check_bits(bits);
  check_range(range);
  // Zero must stay representable so that 0 <= Z <= q_max.
  const double lo = std::min(range.v_min, 0.0);
  const double hi = std::max(range.v_max, 0.0);
  const double span = hi - lo;
  if (!(span > 0.0)) throw CalibrationError("activation range has zero width");

  const int levels = (1 << bits) - 1;
  QuantParams p;
  p.bits = bits;
  p.mode = QuantMode::asymmetric_activation;
  p.scale = span / static_cast<double>(levels);
  p.zero_point = static_cast<int>(round_half_away((1.0 - hi / span) * levels));
  p.zero_point = std::clamp(p.zero_point, 0, levels);
  p.q_min = 0;
  p.q_max = levels;
  return p;
}

std::int32_t quantize(const QuantParams& params, double x) {
  if (!std::isfinite(x)) throw QuantizationError("cannot quantize a non-finite value");
  double q = round_half_away(x / params.scale);
  if (params.mode == QuantMode::asymmetric_activation) q += params.zero_point;
  q = std::clamp(q, static_cast<double>(params.q_min), static_cast<double>(params.q_max));
  return static_cast<std::int32_t>(q);
}

double dequantize(const QuantParams& params, std::int32_t q) {
  if (q < params.q_min || q > params.q_max) {
    throw QuantizationError("code " + std::to_string(q) + " outside clip bounds");
  }
  if (params.mode == QuantMode::asymmetric_activation) {
    return static_cast<double>(q - params.zero_point) * params.scale;
  }
  return static_cast<double>(q) * params.scale;
}

double fake_quantize(const QuantParams& params, double x) {
  return dequantize(params, quantize(params, x));
}

std::vector<double> fake_quantize(const QuantParams& params, std::span<const double> x) {
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(),
                 [&](double v) { return fake_quantize(params, v); });
  return out;
}

double fake_quantize_grad(const QuantParams& params, double x) {
  return (x >= params.representable_min() && x <= params.representable_max()) ? 1.0 : 0.0;
}

std::string_view to_string(QuantMode mode) {
  return mode == QuantMode::symmetric_weight ? "symmetric_weight" : "asymmetric_activation";
}

QuantMode parse_quant_mode(std::string_view text) {
  if (text == "symmetric_weight") return QuantMode::symmetric_weight;
  if (text == "asymmetric_activation") return QuantMode::asymmetric_activation;
  throw FormatError("unknown quantization mode '" + std::string(text) + "'");
}

}  // namespace hashq
