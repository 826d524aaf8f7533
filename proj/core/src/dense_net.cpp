#include "hashq/dense_net.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "hashq/errors.hpp"

namespace hashq {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMatrix>;
using MutMap = Eigen::Map<RowMatrix>;

}  // namespace

DenseNet::DenseNet(std::vector<int> sizes, OutputActivation output, std::mt19937_64& rng,
                   bool zero_final_layer)
    : sizes_(std::move(sizes)), output_(output) {
  if (sizes_.size() < 2) throw ConfigError("a dense network needs at least one layer");
  std::size_t total = 0;
  for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
    offsets_.push_back(total);
    total += static_cast<std::size_t>(sizes_[i]) * sizes_[i + 1] + sizes_[i + 1];
  }
  params_.assign(total, 0.0);
  for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
    const bool last = i + 2 == sizes_.size();
    if (last && zero_final_layer) continue;
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[i]));
    std::uniform_real_distribution<double> init(-bound, bound);
    const std::size_t n = static_cast<std::size_t>(sizes_[i]) * sizes_[i + 1];
    for (std::size_t j = 0; j < n; ++j) params_[offsets_[i] + j] = init(rng);
  }
}

std::vector<double> DenseNet::forward(std::span<const double> x, std::size_t batch) const {
  Tape tape;
  return forward(x, batch, tape);
}

std::vector<double> DenseNet::forward(std::span<const double> x, std::size_t batch, Tape& tape) const {
  if (x.size() != batch * static_cast<std::size_t>(input_dim())) {
    throw ConfigError("dense network input has the wrong size");
  }
  const auto b = static_cast<Eigen::Index>(batch);
  tape.batch = batch;
  tape.activations.assign(1, std::vector<double>(x.begin(), x.end()));
  tape.pre.clear();
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t i = 0; i < layers; ++i) {
    const int in = sizes_[i];
    const int out = sizes_[i + 1];
    ConstMap w(params_.data() + weight_offset(i), out, in);
    Eigen::Map<const Eigen::RowVectorXd> bias(params_.data() + bias_offset(i), out);
    ConstMap a(tape.activations.back().data(), b, in);
    RowMatrix z = a * w.transpose();
    z.rowwise() += bias;
    tape.pre.emplace_back(z.data(), z.data() + z.size());
    if (i + 1 < layers) {
      z = z.cwiseMax(0.0);
    } else if (output_ == OutputActivation::sigmoid) {
      z = z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
    }
    tape.activations.emplace_back(z.data(), z.data() + z.size());
  }
  return tape.activations.back();
}

std::vector<double> DenseNet::backward(const Tape& tape, std::span<const double> dy,
                                       std::vector<double>& param_grad) const {
  const auto b = static_cast<Eigen::Index>(tape.batch);
  if (dy.size() != tape.batch * static_cast<std::size_t>(output_dim())) {
    throw ConfigError("dense network output gradient has the wrong size");
  }
  if (param_grad.size() != params_.size()) param_grad.assign(params_.size(), 0.0);
  const std::size_t layers = sizes_.size() - 1;
  RowMatrix delta = ConstMap(dy.data(), b, output_dim());
  if (output_ == OutputActivation::sigmoid) {
    ConstMap y(tape.activations.back().data(), b, output_dim());
    delta = delta.cwiseProduct(y.cwiseProduct((1.0 - y.array()).matrix()));
  }
  for (std::size_t i = layers; i-- > 0;) {
    const int in = sizes_[i];
    const int out = sizes_[i + 1];
    ConstMap a(tape.activations[i].data(), b, in);
    ConstMap w(params_.data() + weight_offset(i), out, in);
    MutMap gw(param_grad.data() + weight_offset(i), out, in);
    Eigen::Map<Eigen::RowVectorXd> gb(param_grad.data() + bias_offset(i), out);
    gw += delta.transpose() * a;
    gb += delta.colwise().sum();
    RowMatrix da = delta * w;
    if (i > 0) {
      ConstMap z(tape.pre[i - 1].data(), b, in);
      delta = da.cwiseProduct(z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : 0.0; }));
    } else {
      return std::vector<double>(da.data(), da.data() + da.size());
    }
  }
  return {};
}

void DenseNet::soft_update_from(const DenseNet& source, double tau) {
  if (source.params_.size() != params_.size()) throw ConfigError("soft update between mismatched networks");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    params_[i] = tau * source.params_[i] + (1.0 - tau) * params_[i];
  }
}

}  // namespace hashq
