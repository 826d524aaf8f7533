#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hashq/dense_net.hpp"

namespace hashq {
namespace {

// Loss L = sum_i w_i * y_i with fixed weights, so dL/dy = w.
double weighted_output(const DenseNet& net, const std::vector<double>& x, std::size_t batch,
                       const std::vector<double>& w) {
  const auto y = net.forward(x, batch);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += w[i] * y[i];
  return s;
}

void check_gradients(OutputActivation act) {
  std::mt19937_64 rng(5);
  DenseNet net({5, 7, 6, 2}, act, rng);
  const std::size_t batch = 3;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(batch * 5), w(batch * 2);
  for (auto& v : x) v = u(rng);
  for (auto& v : w) v = u(rng);

  DenseNet::Tape tape;
  net.forward(x, batch, tape);
  std::vector<double> grad(net.params().size(), 0.0);
  const auto dx = net.backward(tape, w, grad);

  const double h = 1e-6;
  for (std::size_t i = 0; i < net.params().size(); ++i) {
    DenseNet plus = net, minus = net;
    plus.params()[i] += h;
    minus.params()[i] -= h;
    const double fd = (weighted_output(plus, x, batch, w) - weighted_output(minus, x, batch, w)) / (2 * h);
    EXPECT_NEAR(grad[i], fd, 1e-6 + 1e-4 * std::abs(fd)) << "param " << i;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    auto xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const double fd = (weighted_output(net, xp, batch, w) - weighted_output(net, xm, batch, w)) / (2 * h);
    EXPECT_NEAR(dx[i], fd, 1e-6 + 1e-4 * std::abs(fd)) << "input " << i;
  }
}

TEST(DenseNet, LinearHeadGradientsMatchFiniteDifferences) { check_gradients(OutputActivation::linear); }
TEST(DenseNet, SigmoidHeadGradientsMatchFiniteDifferences) { check_gradients(OutputActivation::sigmoid); }

TEST(DenseNet, ZeroFinalLayerGivesConstantOutput) {
  std::mt19937_64 rng(1);
  DenseNet net({3, 4, 1}, OutputActivation::sigmoid, rng, true);
  const std::vector<double> x{0.3, -2.0, 5.0};
  EXPECT_DOUBLE_EQ(net.forward(x, 1).front(), 0.5);
}

TEST(DenseNet, SoftUpdateFollowsDecayLaw) {
  std::mt19937_64 rng(2);
  DenseNet source({2, 3, 1}, OutputActivation::linear, rng);
  DenseNet target({2, 3, 1}, OutputActivation::linear, rng);
  const auto s0 = source.params();
  const auto t0 = target.params();
  const double tau = 0.01;
  const int n = 50;
  for (int i = 0; i < n; ++i) target.soft_update_from(source, tau);
  for (std::size_t i = 0; i < t0.size(); ++i) {
    const double expected = s0[i] + (t0[i] - s0[i]) * std::pow(1 - tau, n);
    EXPECT_NEAR(target.params()[i], expected, 1e-12);
  }
}

}  // namespace
}  // namespace hashq
