#include "hashq/ngp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "hashq/errors.hpp"
#include "hashq/optim.hpp"

namespace hashq {
namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Hot-path fake quantization; callers guarantee finite inputs.
inline double fq(const QuantParams& p, double x) {
  double q = std::round(x / p.scale);
  if (p.mode == QuantMode::asymmetric_activation) q += p.zero_point;
  q = std::clamp(q, static_cast<double>(p.q_min), static_cast<double>(p.q_max));
  return (q - p.zero_point) * p.scale;
}

inline double ste(const QuantParams& p, double x) {
  return (x >= p.representable_min() && x <= p.representable_max()) ? 1.0 : 0.0;
}

struct Corner {
  std::uint32_t entry;
  double weight;
};

// Cell corners of `x` at `level`, row-major: (x0,y0) (x1,y0) (x0,y1) (x1,y1).
void level_corners(const Vec2& x, int level, const NgpConfig& cfg, Corner out[4]) {
  const int n = cfg.resolution(level);
  const double px = x.x * n;
  const double py = x.y * n;
  const auto cx = static_cast<std::uint32_t>(std::min(static_cast<int>(std::floor(px)), n - 1));
  const auto cy = static_cast<std::uint32_t>(std::min(static_cast<int>(std::floor(py)), n - 1));
  const double fx = px - cx;
  const double fy = py - cy;
  out[0] = {hash_index(cx, cy, level, cfg), (1.0 - fx) * (1.0 - fy)};
  out[1] = {hash_index(cx + 1, cy, level, cfg), fx * (1.0 - fy)};
  out[2] = {hash_index(cx, cy + 1, level, cfg), (1.0 - fx) * fy};
  out[3] = {hash_index(cx + 1, cy + 1, level, cfg), fx * fy};
}

void check_point(const Vec2& x) {
  if (!(x.x >= 0.0 && x.x <= 1.0 && x.y >= 0.0 && x.y <= 1.0)) {
    throw ConfigError("encode input outside the unit square");
  }
}

Matrix layer_weight(const DenseLayer& l) {
  Matrix w(l.out_dim, l.in_dim);
  for (int r = 0; r < l.out_dim; ++r) {
    for (int c = 0; c < l.in_dim; ++c) w(r, c) = l.weight[static_cast<std::size_t>(r) * l.in_dim + c];
  }
  return w;
}

Vector layer_bias(const DenseLayer& l) {
  Vector b(l.out_dim);
  for (int r = 0; r < l.out_dim; ++r) b(r) = l.bias[static_cast<std::size_t>(r)];
  return b;
}

// Everything the backward pass needs from one batched forward pass.
struct ForwardCache {
  std::vector<Corner> corners;  // B * levels * 4
  Matrix features;              // D x B, after hash-feature quantization
  std::vector<Matrix> inputs;   // per layer, after activation quantization
  std::vector<Matrix> input_mask;
  std::vector<Matrix> weights;  // per layer, after weight quantization
  std::vector<Matrix> weight_mask;
  std::vector<Matrix> pre;      // per layer pre-activation
  std::vector<Matrix> raw_inputs;
  Matrix output;                // C x B
};

void batch_forward(const ToyNgpModel& model, std::span<const Vec2> points, const QuantState* quant,
                   ForwardCache& cache) {
  const auto& cfg = model.config;
  const auto batch = static_cast<Eigen::Index>(points.size());
  const int levels = cfg.num_levels;
  const int feats = cfg.features_per_level;
  const std::size_t cap = cfg.table_capacity();

  cache.corners.resize(points.size() * static_cast<std::size_t>(levels) * 4);
  cache.features.setZero(cfg.encoding_dim(), batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const Vec2& x = points[static_cast<std::size_t>(b)];
    check_point(x);
    for (int l = 0; l < levels; ++l) {
      Corner* c = &cache.corners[(static_cast<std::size_t>(b) * levels + l) * 4];
      level_corners(x, l, cfg, c);
      const float* table = model.tables.data() + static_cast<std::size_t>(l) * cap * feats;
      for (int f = 0; f < feats; ++f) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) {
          double v = table[static_cast<std::size_t>(c[k].entry) * feats + f];
          if (quant) v = fq(quant->hash[static_cast<std::size_t>(l)], v);
          acc += c[k].weight * v;
        }
        cache.features(l * feats + f, b) = acc;
      }
    }
  }

  const auto nl = model.layers.size();
  cache.inputs.resize(nl);
  cache.raw_inputs.resize(nl);
  cache.input_mask.resize(nl);
  cache.weights.resize(nl);
  cache.weight_mask.resize(nl);
  cache.pre.resize(nl);

  Matrix hidden;
  const Matrix* h = &cache.features;
  for (std::size_t i = 0; i < nl; ++i) {
    const auto& layer = model.layers[i];
    cache.raw_inputs[i] = *h;
    Matrix w = layer_weight(layer);
    if (quant) {
      const auto& ap = quant->activation[i];
      const auto& wp = quant->weight[i];
      cache.input_mask[i] = h->unaryExpr([&](double v) { return ste(ap, v); });
      cache.inputs[i] = h->unaryExpr([&](double v) { return fq(ap, v); });
      cache.weight_mask[i] = w.unaryExpr([&](double v) { return ste(wp, v); });
      cache.weights[i] = w.unaryExpr([&](double v) { return fq(wp, v); });
    } else {
      cache.inputs[i] = *h;
      cache.weights[i] = std::move(w);
    }
    cache.pre[i] = cache.weights[i] * cache.inputs[i];
    cache.pre[i].colwise() += layer_bias(layer);
    if (i + 1 < nl) {
      hidden = cache.pre[i].cwiseMax(0.0);
      h = &hidden;
    } else {
      cache.output = cache.pre[i].unaryExpr([](double z) { return 1.0 / (1.0 + std::exp(-z)); });
    }
  }
}

Gradient zero_gradient(const ToyNgpModel& model) {
  Gradient g;
  g.tables.assign(model.tables.size(), 0.0);
  for (const auto& l : model.layers) {
    g.weight.emplace_back(l.weight.size(), 0.0);
    g.bias.emplace_back(l.bias.size(), 0.0);
  }
  return g;
}

std::vector<Vec2> pixel_centers(int width, int height) {
  std::vector<Vec2> pts;
  pts.reserve(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) pts.push_back({(x + 0.5) / width, (y + 0.5) / height});
  }
  return pts;
}

struct ModelOptimizer {
  Adam tables;
  std::vector<Adam> weight;
  std::vector<Adam> bias;

  ModelOptimizer(const ToyNgpModel& model, const TrainOptions& o) {
    tables = Adam(model.tables.size(), {o.table_learning_rate, o.beta1, o.beta2, o.epsilon});
    for (const auto& l : model.layers) {
      weight.emplace_back(l.weight.size(), AdamOptions{o.mlp_learning_rate, o.beta1, o.beta2, o.epsilon});
      bias.emplace_back(l.bias.size(), AdamOptions{o.mlp_learning_rate, o.beta1, o.beta2, o.epsilon});
    }
  }

  void step(ToyNgpModel& model, const Gradient& g) {
    tables.step(std::span<float>(model.tables), std::span<const double>(g.tables));
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
      weight[i].step(std::span<float>(model.layers[i].weight), std::span<const double>(g.weight[i]));
      bias[i].step(std::span<float>(model.layers[i].bias), std::span<const double>(g.bias[i]));
    }
  }
};

// Shared SGD loop for train() and finetune().
void optimize(ToyNgpModel& model, const RenderTarget& image, int steps, std::uint64_t seed,
              const TrainOptions& options, const QuantState* quant, std::vector<TrainLogRow>* log) {
  if (image.channels != model.config.output_channels) {
    throw ConfigError("image channel count does not match the model output");
  }
  if (options.batch_size < 1) throw ConfigError("batch size must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, image.pixel_count() - 1);
  ModelOptimizer opt(model, options);
  const auto batch = static_cast<std::size_t>(options.batch_size);
  const int channels = image.channels;
  std::vector<Vec2> pts(batch);
  std::vector<float> targets(batch * channels);
  Gradient grad = zero_gradient(model);

  for (int step = 1; step <= steps; ++step) {
    for (std::size_t b = 0; b < batch; ++b) {
      const std::size_t idx = pick(rng);
      const int px = static_cast<int>(idx % image.width);
      const int py = static_cast<int>(idx / image.width);
      pts[b] = {(px + 0.5) / image.width, (py + 0.5) / image.height};
      for (int c = 0; c < channels; ++c) targets[b * channels + c] = image.at(px, py, c);
    }
    const double loss = loss_and_gradient(model, pts, targets, quant, &grad);
    if (!std::isfinite(loss)) {
      std::ostringstream os;
      os << "training diverged at step " << step << " (loss " << loss << ")";
      throw TrainingError(os.str());
    }
    opt.step(model, grad);
    if (log && options.log_every > 0 && (step % options.log_every == 0 || step == steps)) {
      const RenderTarget out = render(model, quant, image.width, image.height);
      log->push_back({step, loss, psnr(out, image)});
    }
  }
}

}  // namespace

void NgpConfig::validate() const {
  if (num_levels < 1) throw ConfigError("num_levels must be >= 1");
  if (features_per_level < 1) throw ConfigError("features_per_level must be >= 1");
  if (table_size_log2 < 1 || table_size_log2 > 24) throw ConfigError("table_size_log2 must lie in [1, 24]");
  if (base_resolution < 1) throw ConfigError("base_resolution must be >= 1");
  if (!(growth_factor >= 1.0) || !std::isfinite(growth_factor)) {
    throw ConfigError("growth_factor must be >= 1 so resolutions are nondecreasing");
  }
  if (mlp_hidden_layers < 0 || mlp_width < 1 || output_channels < 1) {
    throw ConfigError("invalid MLP dimensions");
  }
  if (num_levels > 64) throw ConfigError("num_levels must be <= 64");
  for (int l = 1; l < num_levels; ++l) {
    if (resolution(l) < resolution(l - 1)) throw ConfigError("level resolutions must be nondecreasing");
  }
  if (resolution(num_levels - 1) > (1 << 24)) throw ConfigError("finest resolution too large");
}

int NgpConfig::resolution(int level) const {
  return static_cast<int>(std::floor(base_resolution * std::pow(growth_factor, level)));
}

bool NgpConfig::is_dense(int level) const {
  const auto side = static_cast<std::uint64_t>(resolution(level)) + 1;
  return side * side <= table_capacity();
}

std::uint32_t NgpConfig::level_entries(int level) const {
  if (!is_dense(level)) return table_capacity();
  const auto side = static_cast<std::uint32_t>(resolution(level)) + 1;
  return side * side;
}

int NgpConfig::layer_in(int layer) const { return layer == 0 ? encoding_dim() : mlp_width; }

int NgpConfig::layer_out(int layer) const {
  return layer == mlp_hidden_layers ? output_channels : mlp_width;
}

std::uint32_t hash_index(std::uint32_t gx, std::uint32_t gy, int level, const NgpConfig& config) {
  if (level < 0 || level >= config.num_levels) throw ConfigError("hash level out of range");
  if (config.is_dense(level)) {
    const auto side = static_cast<std::uint32_t>(config.resolution(level)) + 1;
    return gy * side + gx;
  }
  const std::uint32_t h = (gx * kHashPrimeX) ^ (gy * kHashPrimeY);
  return h & (config.table_capacity() - 1u);
}

ToyNgpModel ToyNgpModel::initialize(const NgpConfig& config, std::uint64_t seed) {
  config.validate();
  ToyNgpModel m;
  m.config = config;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> table_init(-1e-4f, 1e-4f);
  m.tables.resize(static_cast<std::size_t>(config.num_levels) * config.table_capacity() *
                  config.features_per_level);
  for (auto& v : m.tables) v = table_init(rng);
  for (int i = 0; i < config.layer_count(); ++i) {
    DenseLayer l;
    l.in_dim = config.layer_in(i);
    l.out_dim = config.layer_out(i);
    // He-uniform for ReLU layers, Glorot-uniform for the sigmoid output.
    const bool last = i == config.layer_count() - 1;
    const double bound = last ? std::sqrt(6.0 / (l.in_dim + l.out_dim)) : std::sqrt(6.0 / l.in_dim);
    std::uniform_real_distribution<float> w_init(static_cast<float>(-bound), static_cast<float>(bound));
    l.weight.resize(static_cast<std::size_t>(l.in_dim) * l.out_dim);
    for (auto& v : l.weight) v = w_init(rng);
    l.bias.assign(static_cast<std::size_t>(l.out_dim), 0.0f);
    m.layers.push_back(std::move(l));
  }
  return m;
}

std::span<float> ToyNgpModel::level_table(int level) {
  const std::size_t n = static_cast<std::size_t>(config.table_capacity()) * config.features_per_level;
  return std::span<float>(tables).subspan(static_cast<std::size_t>(level) * n, n);
}

std::span<const float> ToyNgpModel::level_table(int level) const {
  const std::size_t n = static_cast<std::size_t>(config.table_capacity()) * config.features_per_level;
  return std::span<const float>(tables).subspan(static_cast<std::size_t>(level) * n, n);
}

std::size_t ToyNgpModel::parameter_count() const {
  std::size_t n = tables.size();
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

void ToyNgpModel::validate() const {
  config.validate();
  if (tables.size() != static_cast<std::size_t>(config.num_levels) * config.table_capacity() *
                           config.features_per_level) {
    throw ConfigError("hash table size does not match config");
  }
  if (static_cast<int>(layers.size()) != config.layer_count()) throw ConfigError("MLP depth does not match config");
  for (int i = 0; i < config.layer_count(); ++i) {
    const auto& l = layers[static_cast<std::size_t>(i)];
    if (l.in_dim != config.layer_in(i) || l.out_dim != config.layer_out(i) ||
        l.weight.size() != static_cast<std::size_t>(l.in_dim) * l.out_dim ||
        l.bias.size() != static_cast<std::size_t>(l.out_dim)) {
      throw ConfigError("MLP layer " + std::to_string(i) + " dimensions do not match config");
    }
  }
  auto finite = [](const std::vector<float>& v) {
    return std::all_of(v.begin(), v.end(), [](float x) { return std::isfinite(x); });
  };
  bool ok = finite(tables);
  for (const auto& l : layers) ok = ok && finite(l.weight) && finite(l.bias);
  if (!ok) throw TrainingError("model contains non-finite parameters");
}

std::vector<Vec2> calibration_points(int width, int height, std::size_t count, std::uint64_t seed) {
  if (width < 1 || height < 1) throw ConfigError("calibration grid must be non-empty");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> px(0, width - 1);
  std::uniform_int_distribution<long> py(0, height - 1);
  std::vector<Vec2> pts(count);
  for (auto& p : pts) {
    const long x = px(rng);
    const long y = py(rng);
    p = {(x + 0.5) / width, (y + 0.5) / height};
  }
  return pts;
}

QuantState calibrate_quantization(const ToyNgpModel& model, const QuantPolicy& policy,
                                  std::span<const Vec2> calibration, SymmetricBounds bounds) {
  const auto& cfg = model.config;
  policy.validate();
  if (static_cast<int>(policy.hash_bits.size()) != cfg.num_levels ||
      static_cast<int>(policy.mlp_bits.size()) != cfg.layer_count()) {
    throw ConfigError("policy does not cover every quantizable unit of the model");
  }
  if (calibration.empty()) throw CalibrationError("no calibration points");

  QuantState q;
  q.policy = policy;
  for (int l = 0; l < cfg.num_levels; ++l) {
    const ValueRange r = symmetric_hull(calibrate_range(model.level_table(l)));
    q.hash.push_back(make_weight_params(r, policy.hash_bits[static_cast<std::size_t>(l)], bounds));
  }
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const ValueRange r = symmetric_hull(calibrate_range(std::span<const float>(model.layers[i].weight)));
    q.weight.push_back(make_weight_params(r, policy.mlp_bits[i].weight_bits, bounds));
  }
  ForwardCache cache;
  batch_forward(model, calibration, nullptr, cache);
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    const Matrix& in = cache.raw_inputs[i];
    const ValueRange r = calibrate_range(std::span<const double>(in.data(), static_cast<std::size_t>(in.size())));
    q.activation.push_back(make_activation_params(r, policy.mlp_bits[i].activation_bits));
  }
  return q;
}

std::vector<double> encode(const Vec2& x, const ToyNgpModel& model) {
  check_point(x);
  const auto& cfg = model.config;
  const int feats = cfg.features_per_level;
  std::vector<double> out(static_cast<std::size_t>(cfg.encoding_dim()), 0.0);
  Corner c[4];
  for (int l = 0; l < cfg.num_levels; ++l) {
    level_corners(x, l, cfg, c);
    const auto table = model.level_table(l);
    for (int f = 0; f < feats; ++f) {
      double acc = 0.0;
      for (const auto& k : c) acc += k.weight * table[static_cast<std::size_t>(k.entry) * feats + f];
      out[static_cast<std::size_t>(l * feats + f)] = acc;
    }
  }
  return out;
}

std::vector<double> forward(const Vec2& x, const ToyNgpModel& model, const QuantState* quant) {
  ForwardCache cache;
  batch_forward(model, std::span<const Vec2>(&x, 1), quant, cache);
  return std::vector<double>(cache.output.data(), cache.output.data() + cache.output.size());
}

double loss_and_gradient(const ToyNgpModel& model, std::span<const Vec2> points,
                         std::span<const float> targets, const QuantState* quant, Gradient* grad) {
  const auto& cfg = model.config;
  const int channels = cfg.output_channels;
  if (points.empty()) throw ConfigError("empty training batch");
  if (targets.size() != points.size() * static_cast<std::size_t>(channels)) {
    throw ConfigError("target count does not match batch size");
  }
  ForwardCache cache;
  batch_forward(model, points, quant, cache);

  const auto batch = static_cast<Eigen::Index>(points.size());
  Matrix diff(channels, batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    for (int c = 0; c < channels; ++c) {
      diff(c, b) = cache.output(c, b) - targets[static_cast<std::size_t>(b) * channels + c];
    }
  }
  const double denom = static_cast<double>(batch) * channels;
  const double loss = diff.squaredNorm() / denom;
  if (!grad) return loss;

  if (grad->tables.size() != model.tables.size()) *grad = zero_gradient(model);
  std::fill(grad->tables.begin(), grad->tables.end(), 0.0);

  const auto& y = cache.output;
  Matrix dz = (2.0 / denom) * diff.cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix()));
  Matrix dx;
  for (std::size_t i = model.layers.size(); i-- > 0;) {
    Matrix gw = dz * cache.inputs[i].transpose();
    if (quant) gw = gw.cwiseProduct(cache.weight_mask[i]);
    const Vector gb = dz.rowwise().sum();
    const auto& layer = model.layers[i];
    auto& gwo = grad->weight[i];
    gwo.resize(layer.weight.size());
    for (int r = 0; r < layer.out_dim; ++r) {
      for (int c = 0; c < layer.in_dim; ++c) gwo[static_cast<std::size_t>(r) * layer.in_dim + c] = gw(r, c);
    }
    grad->bias[i].assign(gb.data(), gb.data() + gb.size());

    Matrix da = cache.weights[i].transpose() * dz;
    if (quant) da = da.cwiseProduct(cache.input_mask[i]);
    if (i > 0) {
      dz = da.cwiseProduct(cache.pre[i - 1].unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
    } else {
      dx = std::move(da);
    }
  }

  const int feats = cfg.features_per_level;
  const std::size_t cap = cfg.table_capacity();
  for (Eigen::Index b = 0; b < batch; ++b) {
    for (int l = 0; l < cfg.num_levels; ++l) {
      const Corner* c = &cache.corners[(static_cast<std::size_t>(b) * cfg.num_levels + l) * 4];
      const std::size_t base = static_cast<std::size_t>(l) * cap * feats;
      for (int k = 0; k < 4; ++k) {
        const std::size_t off = base + static_cast<std::size_t>(c[k].entry) * feats;
        for (int f = 0; f < feats; ++f) {
          double g = c[k].weight * dx(l * feats + f, b);
          if (quant) g *= ste(quant->hash[static_cast<std::size_t>(l)], model.tables[off + f]);
          grad->tables[off + f] += g;
        }
      }
    }
  }
  return loss;
}

RenderTarget render(const ToyNgpModel& model, const QuantState* quant, int width, int height) {
  RenderTarget img(width, height, model.config.output_channels);
  const auto pts = pixel_centers(width, height);
  constexpr std::size_t kChunk = 4096;
  ForwardCache cache;
  for (std::size_t start = 0; start < pts.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, pts.size() - start);
    batch_forward(model, std::span<const Vec2>(pts).subspan(start, n), quant, cache);
    for (std::size_t b = 0; b < n; ++b) {
      for (int c = 0; c < img.channels; ++c) {
        img.pixels[(start + b) * img.channels + c] =
            static_cast<float>(cache.output(c, static_cast<Eigen::Index>(b)));
      }
    }
  }
  return img;
}

RenderTarget render(const ToyNgpModel& model, const QuantPolicy& policy, int width, int height) {
  const auto pts = calibration_points(width, height);
  const QuantState q = calibrate_quantization(model, policy, pts);
  return render(model, &q, width, height);
}

TrainResult train(const RenderTarget& image, const NgpConfig& config, int steps, std::uint64_t seed,
                  const TrainOptions& options) {
  if (steps < 1) throw ConfigError("training needs at least one step");
  TrainResult result{ToyNgpModel::initialize(config, seed), {}};
  optimize(result.model, image, steps, seed ^ 0x9e3779b97f4a7c15ULL, options, nullptr, &result.log);
  return result;
}

FinetuneResult finetune_quantized(const ToyNgpModel& model, const QuantPolicy& policy,
                                  const RenderTarget& image, int steps, std::uint64_t seed,
                                  const TrainOptions& options) {
  if (steps < 0) throw ConfigError("fine-tune step count must be non-negative");
  const auto pts = calibration_points(image.width, image.height);
  FinetuneResult result{model, calibrate_quantization(model, policy, pts)};
  if (steps == 0) return result;
  TrainOptions o = options;
  o.log_every = 0;
  optimize(result.model, image, steps, seed, o, &result.quant, nullptr);
  return result;
}

ToyNgpModel finetune(const ToyNgpModel& model, const QuantPolicy& policy, const RenderTarget& image,
                     int steps, std::uint64_t seed, const TrainOptions& options) {
  return finetune_quantized(model, policy, image, steps, seed, options).model;
}

AccessTrace export_trace(const ToyNgpModel& model, int width, int height, int tile_side) {
  if (width < 1 || height < 1 || tile_side < 1) throw ConfigError("trace dimensions must be positive");
  const auto& cfg = model.config;
  AccessTrace t;
  t.pixel_count = static_cast<std::uint32_t>(width) * static_cast<std::uint32_t>(height);
  t.level_count = static_cast<std::uint32_t>(cfg.num_levels);
  t.features_per_level = static_cast<std::uint32_t>(cfg.features_per_level);
  for (int l = 0; l < cfg.num_levels; ++l) t.level_entries.push_back(cfg.level_entries(l));
  t.accesses.reserve(static_cast<std::size_t>(t.pixel_count) * cfg.num_levels * 4);

  Corner c[4];
  for (int ty = 0; ty < height; ty += tile_side) {
    for (int tx = 0; tx < width; tx += tile_side) {
      const int x_end = std::min(tx + tile_side, width);
      const int y_end = std::min(ty + tile_side, height);
      for (int y = ty; y < y_end; ++y) {
        for (int x = tx; x < x_end; ++x) {
          const Vec2 p{(x + 0.5) / width, (y + 0.5) / height};
          const auto id = static_cast<std::uint32_t>(y) * static_cast<std::uint32_t>(width) + static_cast<std::uint32_t>(x);
          for (int l = 0; l < cfg.num_levels; ++l) {
            level_corners(p, l, cfg, c);
            for (const auto& k : c) t.accesses.push_back({id, static_cast<std::uint16_t>(l), k.entry});
          }
        }
      }
      const auto tile_pixels = static_cast<std::uint32_t>((x_end - tx) * (y_end - ty));
      for (int i = 0; i < cfg.layer_count(); ++i) {
        t.gemms.push_back({static_cast<std::uint16_t>(i), tile_pixels,
                           static_cast<std::uint32_t>(cfg.layer_in(i)),
                           static_cast<std::uint32_t>(cfg.layer_out(i))});
      }
    }
  }
  return t;
}

}  // namespace hashq
