#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace hashq {

enum class OutputActivation { linear, sigmoid };

// Fully connected ReLU network over row-major batches (batch x features).
// Parameters are one flat vector: for each layer, W (out x in, row-major) then b.
class DenseNet {
 public:
  struct Tape {
    std::size_t batch = 0;
    std::vector<std::vector<double>> activations;  // input of every layer, plus the output
    std::vector<std::vector<double>> pre;          // pre-activation of every layer
  };

  DenseNet() = default;
  DenseNet(std::vector<int> sizes, OutputActivation output, std::mt19937_64& rng,
           bool zero_final_layer = false);

  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }

  std::vector<double> forward(std::span<const double> x, std::size_t batch) const;
  std::vector<double> forward(std::span<const double> x, std::size_t batch, Tape& tape) const;

  // Accumulates dL/dparams into `param_grad` and returns dL/dx.
  std::vector<double> backward(const Tape& tape, std::span<const double> dy,
                               std::vector<double>& param_grad) const;

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  // target <- tau * source + (1 - tau) * target
  void soft_update_from(const DenseNet& source, double tau);

  bool operator==(const DenseNet&) const = default;

 private:
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + static_cast<std::size_t>(sizes_[layer]) * sizes_[layer + 1];
  }

  std::vector<int> sizes_;
  OutputActivation output_ = OutputActivation::linear;
  std::vector<double> params_;
  std::vector<std::size_t> offsets_;
};

}  // namespace hashq
