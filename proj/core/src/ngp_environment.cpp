#include "hashq/ngp_environment.hpp"

#include <sstream>

#include "hashq/errors.hpp"

namespace hashq {

NgpEnvironment::NgpEnvironment(ToyNgpModel model, RenderTarget image, HwConfig hw,
                               std::uint64_t finetune_seed, TrainOptions options)
    : NgpEnvironment(model, image, export_trace(model, image.width, image.height), hw, finetune_seed,
                     options) {}

NgpEnvironment::NgpEnvironment(ToyNgpModel model, RenderTarget image, AccessTrace trace, HwConfig hw,
                               std::uint64_t finetune_seed, TrainOptions options)
    : model_(std::move(model)),
      image_(std::move(image)),
      cost_(std::move(trace), hw),
      seed_(finetune_seed),
      options_(options) {
  model_.validate();
  if (image_.channels != model_.config.output_channels) {
    throw ConfigError("reference image channels do not match the model output");
  }
  if (cost_.trace().level_count != static_cast<std::uint32_t>(model_.config.num_levels)) {
    throw ConfigError("trace level count does not match the model");
  }
}

std::vector<ObservationVector> NgpEnvironment::raw_observations() const {
  return build_observations(model_.config);
}

QuantPolicy NgpEnvironment::uniform_policy(int bits) const {
  return QuantPolicy::uniform(model_.config.num_levels, model_.config.layer_count(), bits);
}

std::uint64_t NgpEnvironment::latency(const QuantPolicy& policy) { return cost_.latency(policy); }

double NgpEnvironment::quality(const QuantPolicy& policy, int finetune_steps) {
  auto key = std::make_pair(policy.to_string(), finetune_steps);
  if (auto it = quality_memo_.find(key); it != quality_memo_.end()) return it->second;
  const auto tuned = finetune_quantized(model_, policy, image_, finetune_steps, seed_, options_);
  const double q = psnr(render(tuned.model, &tuned.quant, image_.width, image_.height), image_);
  ++evaluations_;
  quality_memo_.emplace(std::move(key), q);
  return q;
}

double NgpEnvironment::float_quality() {
  if (!float_psnr_) float_psnr_ = psnr(render(model_, nullptr, image_.width, image_.height), image_);
  return *float_psnr_;
}

std::string NgpEnvironment::description() const {
  std::ostringstream os;
  const auto& c = model_.config;
  os << "ngp " << image_.width << "x" << image_.height << " levels=" << c.num_levels
     << " features=" << c.features_per_level << " log2_table=" << c.table_size_log2
     << " hidden=" << c.mlp_hidden_layers << "x" << c.mlp_width;
  return os.str();
}

}  // namespace hashq
