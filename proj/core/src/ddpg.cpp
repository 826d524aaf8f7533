#include "hashq/ddpg.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

#include "hashq/binary_io.hpp"
#include "hashq/errors.hpp"
#include "hashq/quantizer.hpp"

namespace hashq {
namespace {

std::vector<double> critic_input(std::span<const Transition> batch, bool next, const std::vector<double>* actions) {
  std::vector<double> x;
  x.reserve(batch.size() * (kObservationDim + 1));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& o = next ? batch[i].next_obs.normalized : batch[i].obs.normalized;
    x.insert(x.end(), o.begin(), o.end());
    x.push_back(actions ? (*actions)[i] : batch[i].action);
  }
  return x;
}

std::vector<double> actor_input(std::span<const Transition> batch, bool next) {
  std::vector<double> x;
  x.reserve(batch.size() * kObservationDim);
  for (const auto& t : batch) {
    const auto& o = next ? t.next_obs.normalized : t.obs.normalized;
    x.insert(x.end(), o.begin(), o.end());
  }
  return x;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void write_net(std::ostream& out, const DenseNet& net) {
  binary::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(net.params().size()));
  for (const double v : net.params()) binary::write_le<double>(out, v);
}

void read_net(std::istream& in, DenseNet& net) {
  const auto n = binary::read_le<std::uint32_t>(in);
  if (n != net.params().size()) throw FormatError("agent checkpoint network size mismatch");
  for (auto& v : net.params()) v = binary::read_le<double>(in);
}

}  // namespace

LayerObservation normalize_observation(const ObservationVector& raw, const ObservationVector& maxima) {
  LayerObservation o;
  o.raw = raw;
  for (int i = 0; i < kObservationDim; ++i) {
    if (!(maxima[i] > 0.0)) {
      throw ConfigError("observation maximum for component " + std::to_string(i) + " must be positive");
    }
    o.normalized[i] = raw[i] / maxima[i];
  }
  return o;
}

int action_to_bits(double action) {
  if (!(action >= 0.0 && action <= 1.0)) {
    std::clog << "warning: action " << action << " outside [0, 1], clamping\n";
    action = std::isnan(action) ? 0.0 : std::clamp(action, 0.0, 1.0);
  }
  const double b = round_half_away(static_cast<double>(kMinBits) - 0.5 +
                                   action * ((kMaxBits + 0.5) - (kMinBits - 0.5)));
  return std::clamp(static_cast<int>(b), kMinBits, kMaxBits);
}

double bits_to_action(int bits) {
  bits = std::clamp(bits, kMinBits, kMaxBits);
  return (bits - 0.5) / 8.0;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("replay capacity must be positive");
}

void ReplayBuffer::push(const Transition& t) {
  if (items_.size() == capacity_) items_.pop_front();
  items_.push_back(t);
}

std::vector<Transition> ReplayBuffer::sample(std::size_t count, std::mt19937_64& rng) const {
  if (items_.empty()) throw Error("cannot sample from an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<Transition> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(items_[pick(rng)]);
  return out;
}

void DdpgConfig::validate() const {
  if (hidden < 1) throw ConfigError("agent hidden width must be positive");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (!(ema_decay >= 0.0 && ema_decay < 1.0)) throw ConfigError("ema_decay must lie in [0, 1)");
  if (!(noise_sigma >= 0.0) || !(noise_floor >= 0.0) || !(noise_decay > 0.0 && noise_decay <= 1.0)) {
    throw ConfigError("invalid exploration noise settings");
  }
  if (!(actor_learning_rate > 0.0) || !(critic_learning_rate > 0.0)) {
    throw ConfigError("learning rates must be positive");
  }
  if (replay_capacity == 0) throw ConfigError("replay capacity must be positive");
  if (warmup_episodes < 0 || updates_per_episode < 0) throw ConfigError("invalid episode schedule");
}

DdpgAgent::DdpgAgent(const DdpgConfig& config)
    : config_(config), rng_(config.seed), replay_(config.replay_capacity), sigma_(config.noise_sigma) {
  config_.validate();
  const int h = config_.hidden;
  actor_ = DenseNet({kObservationDim, h, h, 1}, OutputActivation::sigmoid, rng_, true);
  critic_ = DenseNet({kObservationDim + 1, h, h, 1}, OutputActivation::linear, rng_);
  actor_target_ = actor_;
  critic_target_ = critic_;
  actor_opt_ = Adam(actor_.params().size(), {config_.actor_learning_rate, 0.9, 0.999, 1e-8});
  critic_opt_ = Adam(critic_.params().size(), {config_.critic_learning_rate, 0.9, 0.999, 1e-8});
}

double DdpgAgent::policy_action(const LayerObservation& obs) const {
  return actor_.forward(obs.normalized, 1).front();
}

double DdpgAgent::q_value(const LayerObservation& obs, double action) const {
  std::vector<double> x(obs.normalized.begin(), obs.normalized.end());
  x.push_back(action);
  return critic_.forward(x, 1).front();
}

double DdpgAgent::select_action(const LayerObservation& obs, bool explore) {
  const double mu = policy_action(obs);
  if (!explore || sigma_ <= 0.0) return std::clamp(mu, 0.0, 1.0);
  // Gaussian around mu truncated to [0, 1] by rejection; clip as a fallback.
  std::normal_distribution<double> noise(0.0, sigma_);
  for (int attempt = 0; attempt < 64; ++attempt) {
    const double a = mu + noise(rng_);
    if (a >= 0.0 && a <= 1.0) return a;
  }
  return std::clamp(mu + noise(rng_), 0.0, 1.0);
}

double DdpgAgent::random_action() {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng_);
}

double DdpgAgent::compute_q_target(const Transition& t) const {
  if (t.done) return t.reward - baseline_;
  const double next_action = actor_target_.forward(t.next_obs.normalized, 1).front();
  std::vector<double> x(t.next_obs.normalized.begin(), t.next_obs.normalized.end());
  x.push_back(next_action);
  const double next_q = critic_target_.forward(x, 1).front();
  return t.reward + config_.gamma * next_q - baseline_;
}

UpdateStats DdpgAgent::update(std::span<const Transition> batch) {
  UpdateStats stats;
  if (batch.empty()) throw ConfigError("update needs a non-empty batch");
  const std::size_t k = batch.size();

  std::vector<double> targets(k);
  for (std::size_t i = 0; i < k; ++i) targets[i] = compute_q_target(batch[i]);

  // Critic: (1/K) sum (Q_hat - Q(S, a))^2
  DenseNet::Tape critic_tape;
  const auto q = critic_.forward(critic_input(batch, false, nullptr), k, critic_tape);
  std::vector<double> dq(k);
  double critic_loss = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double err = q[i] - targets[i];
    critic_loss += err * err;
    dq[i] = 2.0 * err / static_cast<double>(k);
  }
  critic_loss /= static_cast<double>(k);
  std::vector<double> critic_grad(critic_.params().size(), 0.0);
  critic_.backward(critic_tape, dq, critic_grad);

  // Actor: maximize Q(S, mu(S)) through the current critic.
  DenseNet::Tape actor_tape;
  const auto mu = actor_.forward(actor_input(batch, false), k, actor_tape);
  DenseNet::Tape through_tape;
  const auto q_mu = critic_.forward(critic_input(batch, false, &mu), k, through_tape);
  double actor_loss = 0.0;
  for (const double v : q_mu) actor_loss -= v;
  actor_loss /= static_cast<double>(k);
  std::vector<double> unused(critic_.params().size(), 0.0);
  const std::vector<double> dq_mu(k, -1.0 / static_cast<double>(k));
  const auto dx = critic_.backward(through_tape, dq_mu, unused);
  std::vector<double> dmu(k);
  for (std::size_t i = 0; i < k; ++i) dmu[i] = dx[i * (kObservationDim + 1) + kObservationDim];
  std::vector<double> actor_grad(actor_.params().size(), 0.0);
  actor_.backward(actor_tape, dmu, actor_grad);

  stats.critic_loss = critic_loss;
  stats.actor_loss = actor_loss;
  if (!std::isfinite(critic_loss) || !std::isfinite(actor_loss) || !all_finite(critic_grad) ||
      !all_finite(actor_grad)) {
    std::clog << "warning: rejected agent update (critic loss " << critic_loss << ", actor loss "
              << actor_loss << ")\n";
    return stats;
  }
  critic_opt_.step(std::span<double>(critic_.params()), std::span<const double>(critic_grad));
  actor_opt_.step(std::span<double>(actor_.params()), std::span<const double>(actor_grad));
  soft_update_targets();
  stats.applied = true;
  return stats;
}

void DdpgAgent::observe_reward(double reward) {
  if (rewards_seen_ == 0) {
    baseline_ = reward;
  } else {
    baseline_ = config_.ema_decay * baseline_ + (1.0 - config_.ema_decay) * reward;
  }
  ++rewards_seen_;
}

void DdpgAgent::end_episode() {
  sigma_ = std::max(config_.noise_floor, sigma_ * config_.noise_decay);
  ++episode_;
}

void DdpgAgent::soft_update_targets() {
  actor_target_.soft_update_from(actor_, config_.tau);
  critic_target_.soft_update_from(critic_, config_.tau);
}

void DdpgAgent::save(std::ostream& out) const {
  binary::write_magic(out, "HDPG");
  binary::write_le<std::uint32_t>(out, kAgentCheckpointVersion);
  write_net(out, actor_);
  write_net(out, critic_);
  write_net(out, actor_target_);
  write_net(out, critic_target_);
  binary::write_le<double>(out, baseline_);
  binary::write_le<std::uint64_t>(out, rewards_seen_);
  binary::write_le<double>(out, sigma_);
  binary::write_le<std::uint64_t>(out, episode_);
}

DdpgAgent DdpgAgent::load(std::istream& in, const DdpgConfig& config) {
  binary::expect_magic(in, "HDPG");
  const auto version = binary::read_le<std::uint32_t>(in);
  if (version != kAgentCheckpointVersion) {
    throw FormatError("unsupported agent checkpoint version " + std::to_string(version));
  }
  DdpgAgent agent(config);
  read_net(in, agent.actor_);
  read_net(in, agent.critic_);
  read_net(in, agent.actor_target_);
  read_net(in, agent.critic_target_);
  agent.baseline_ = binary::read_le<double>(in);
  agent.rewards_seen_ = binary::read_le<std::uint64_t>(in);
  agent.sigma_ = binary::read_le<double>(in);
  agent.episode_ = binary::read_le<std::uint64_t>(in);
  return agent;
}

}  // namespace hashq
