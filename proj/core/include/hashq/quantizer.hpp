#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace hashq {

// Closed value interval found by calibration. `degenerate` marks a range that
// was widened because every sample had the same value.
struct ValueRange {
  double v_min = 0.0;
  double v_max = 0.0;
  bool degenerate = false;

  double span() const { return v_max - v_min; }
};

enum class QuantMode { symmetric_weight, asymmetric_activation };

// Clip bounds for symmetric weight quantization.
//   balanced: [-(2^(b-1) - 1), 2^(b-1) - 1]; 1 bit uses [-1, 1].
//   literal:  [-2^(b-1) - 1, 2^(b-1) - 1], kept for fidelity experiments.
enum class SymmetricBounds { balanced, literal };

struct QuantParams {
  int bits = 8;
  double scale = 1.0;
  int zero_point = 0;
  int q_min = 0;
  int q_max = 0;
  QuantMode mode = QuantMode::symmetric_weight;

  // Smallest and largest values representable after dequantization.
  double representable_min() const;
  double representable_max() const;

  bool operator==(const QuantParams&) const = default;
};

inline constexpr int kMinBits = 1;
inline constexpr int kMaxBits = 8;
inline constexpr double kDegenerateRangeEpsilon = 1e-6;

// Round half away from zero. Used for every rounding step in the library.
double round_half_away(double x);

// Exact min/max when percentile == 1; otherwise the central `percentile` mass
// of the empirical distribution (linear-interpolated sorted quantiles).
ValueRange calibrate_range(std::span<const double> samples, double percentile = 1.0);
ValueRange calibrate_range(std::span<const float> samples, double percentile = 1.0);

// Widest zero-centred interval containing `range`: (-m, m), m = max(|v_min|, |v_max|).
ValueRange symmetric_hull(const ValueRange& range);

QuantParams make_weight_params(const ValueRange& range, int bits,
                               SymmetricBounds bounds = SymmetricBounds::balanced);
QuantParams make_activation_params(const ValueRange& range, int bits);

std::int32_t quantize(const QuantParams& params, double x);
double dequantize(const QuantParams& params, std::int32_t q);

// dequantize(quantize(x)) without the finiteness checks of the scalar API
// on the hot path; non-finite inputs still raise.
double fake_quantize(const QuantParams& params, double x);
std::vector<double> fake_quantize(const QuantParams& params, std::span<const double> x);

// Straight-through estimator: d fake_quantize / dx is 1 inside
// [representable_min, representable_max] and 0 outside.
double fake_quantize_grad(const QuantParams& params, double x);

std::string_view to_string(QuantMode mode);
QuantMode parse_quant_mode(std::string_view text);

}  // namespace hashq
