#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "hashq/accel_sim.hpp"
#include "hashq/image.hpp"
#include "hashq/ngp.hpp"
#include "hashq/search.hpp"

namespace hashq {

// Search environment backed by a trained ToyNgpModel and the accelerator
// simulator. Quality is the PSNR of the fine-tuned model rendered with the
// ranges frozen at fine-tune entry; results are memoised per (policy, steps).
class NgpEnvironment : public Environment {
 public:
  NgpEnvironment(ToyNgpModel model, RenderTarget image, HwConfig hw, std::uint64_t finetune_seed,
                 TrainOptions options = default_finetune_options());
  // Uses a trace recorded earlier instead of exporting one from the model.
  NgpEnvironment(ToyNgpModel model, RenderTarget image, AccessTrace trace, HwConfig hw,
                 std::uint64_t finetune_seed, TrainOptions options = default_finetune_options());

  std::vector<ObservationVector> raw_observations() const override;
  QuantPolicy uniform_policy(int bits) const override;
  std::uint64_t latency(const QuantPolicy& policy) override;
  double quality(const QuantPolicy& policy, int finetune_steps) override;
  double float_quality() override;
  std::string description() const override;

  SimReport simulate(const QuantPolicy& policy) { return cost_.evaluate(policy); }
  const ToyNgpModel& model() const { return model_; }
  const RenderTarget& image() const { return image_; }
  const AccessTrace& trace() const { return cost_.trace(); }
  std::size_t quality_evaluations() const { return evaluations_; }

 private:
  ToyNgpModel model_;
  RenderTarget image_;
  CostModel cost_;
  std::uint64_t seed_;
  TrainOptions options_;
  std::map<std::pair<std::string, int>, double> quality_memo_;
  std::optional<double> float_psnr_;
  std::size_t evaluations_ = 0;
};

}  // namespace hashq
