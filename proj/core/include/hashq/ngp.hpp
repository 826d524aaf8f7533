#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "hashq/image.hpp"
#include "hashq/policy.hpp"
#include "hashq/quantizer.hpp"
#include "hashq/trace.hpp"

namespace hashq {

struct NgpConfig {
  int num_levels = 12;
  int features_per_level = 2;
  int table_size_log2 = 14;
  int base_resolution = 16;
  double growth_factor = 1.5;
  int mlp_hidden_layers = 2;
  int mlp_width = 64;
  int output_channels = 3;

  void validate() const;

  // floor(base_resolution * growth_factor^level)
  int resolution(int level) const;
  std::uint32_t table_capacity() const { return 1u << table_size_log2; }
  // A level is indexed densely when its (N+1)^2 vertices fit in the table.
  bool is_dense(int level) const;
  std::uint32_t level_entries(int level) const;

  int encoding_dim() const { return num_levels * features_per_level; }
  int layer_count() const { return mlp_hidden_layers + 1; }
  int layer_in(int layer) const;
  int layer_out(int layer) const;

  bool operator==(const NgpConfig&) const = default;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline constexpr std::uint32_t kHashPrimeX = 1u;
inline constexpr std::uint32_t kHashPrimeY = 2654435761u;

// Table slot for integer grid vertex (gx, gy) at `level`.
std::uint32_t hash_index(std::uint32_t gx, std::uint32_t gy, int level, const NgpConfig& config);

struct DenseLayer {
  int in_dim = 0;
  int out_dim = 0;
  std::vector<float> weight;  // out_dim x in_dim, row-major
  std::vector<float> bias;

  bool operator==(const DenseLayer&) const = default;
};

// Multi-resolution hash tables plus a ReLU MLP with sigmoid output.
// Tables are stored level-major: level * capacity * features + entry * features + f.
struct ToyNgpModel {
  NgpConfig config;
  std::vector<float> tables;
  std::vector<DenseLayer> layers;

  static ToyNgpModel initialize(const NgpConfig& config, std::uint64_t seed);

  std::span<float> level_table(int level);
  std::span<const float> level_table(int level) const;
  std::size_t parameter_count() const;

  // Throws ConfigError on shape mismatch and TrainingError on non-finite values.
  void validate() const;

  bool operator==(const ToyNgpModel&) const = default;
};

// Quantization parameters for every unit of a policy, calibrated on a model.
struct QuantState {
  QuantPolicy policy;
  std::vector<QuantParams> hash;
  std::vector<QuantParams> weight;
  std::vector<QuantParams> activation;  // quantizes the input of each layer
};

inline constexpr std::uint64_t kCalibrationSeed = 0x5eed'ca1bULL;
inline constexpr std::size_t kCalibrationSamples = 1024;

// Pixel-centre coordinates drawn uniformly (with replacement) from a
// width x height training grid.
std::vector<Vec2> calibration_points(int width, int height,
                                     std::size_t count = kCalibrationSamples,
                                     std::uint64_t seed = kCalibrationSeed);

QuantState calibrate_quantization(const ToyNgpModel& model, const QuantPolicy& policy,
                                  std::span<const Vec2> calibration,
                                  SymmetricBounds bounds = SymmetricBounds::balanced);

std::vector<double> encode(const Vec2& x, const ToyNgpModel& model);
std::vector<double> forward(const Vec2& x, const ToyNgpModel& model,
                            const QuantState* quant = nullptr);

struct Gradient {
  std::vector<double> tables;
  std::vector<std::vector<double>> weight;
  std::vector<std::vector<double>> bias;
};

// Mean squared error over all samples and channels; `targets` holds
// points.size() * output_channels values. Fills `grad` when non-null.
double loss_and_gradient(const ToyNgpModel& model, std::span<const Vec2> points,
                         std::span<const float> targets, const QuantState* quant,
                         Gradient* grad);

RenderTarget render(const ToyNgpModel& model, const QuantState* quant, int width, int height);
// Calibrates on calibration_points(width, height) first.
RenderTarget render(const ToyNgpModel& model, const QuantPolicy& policy, int width, int height);

struct TrainOptions {
  int batch_size = 1024;
  double table_learning_rate = 1e-2;
  double mlp_learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.99;
  double epsilon = 1e-10;
  int log_every = 100;  // 0 disables the PSNR log
};

// Fine-tuning starts from a converged model, so it steps at a tenth of the
// training rates.
inline TrainOptions default_finetune_options() {
  TrainOptions o;
  o.table_learning_rate = 1e-3;
  o.mlp_learning_rate = 1e-4;
  o.log_every = 0;
  return o;
}

struct TrainLogRow {
  int step = 0;
  double loss = 0.0;
  double psnr = 0.0;
};

struct TrainResult {
  ToyNgpModel model;
  std::vector<TrainLogRow> log;
};

TrainResult train(const RenderTarget& image, const NgpConfig& config, int steps,
                  std::uint64_t seed, const TrainOptions& options = {});

// Quantization-aware fine-tuning: ranges are calibrated once on entry and
// frozen, gradients pass through fake quantization as straight-through.
ToyNgpModel finetune(const ToyNgpModel& model, const QuantPolicy& policy,
                     const RenderTarget& image, int steps, std::uint64_t seed,
                     const TrainOptions& options = default_finetune_options());

struct FinetuneResult {
  ToyNgpModel model;
  QuantState quant;  // the ranges frozen at entry
};
FinetuneResult finetune_quantized(const ToyNgpModel& model, const QuantPolicy& policy,
                                  const RenderTarget& image, int steps, std::uint64_t seed,
                                  const TrainOptions& options = default_finetune_options());

// Per pixel (32x32 tiles, row-major inside each tile), per level, the four
// cell-corner indices in row-major corner order; then one GEMM descriptor per
// layer for every tile.
inline constexpr int kTraceTileSide = 32;
AccessTrace export_trace(const ToyNgpModel& model, int width, int height,
                         int tile_side = kTraceTileSide);

// "HNGP" checkpoint container, version 1.
inline constexpr std::uint32_t kCheckpointVersion = 1;
void save_checkpoint(std::ostream& out, const ToyNgpModel& model);
void save_checkpoint(const std::filesystem::path& path, const ToyNgpModel& model);
ToyNgpModel load_checkpoint(std::istream& in);
ToyNgpModel load_checkpoint(const std::filesystem::path& path);

}  // namespace hashq
