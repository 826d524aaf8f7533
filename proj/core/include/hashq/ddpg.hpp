#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <vector>

#include "hashq/dense_net.hpp"
#include "hashq/optim.hpp"

namespace hashq {

inline constexpr int kObservationDim = 7;
using ObservationVector = std::array<double, kObservationDim>;

// Component order of an observation.
enum ObservationField : int {
  kLayerType = 0,
  kDimIn = 1,     // d_in for MLP units, embedding width for hash levels
  kDimOut = 2,    // d_out for MLP units, table entries for hash levels
  kParamSize = 3, // parameter count for MLP units, level index for hash levels
  kUnitIndex = 4,
  kPrevAction = 5,
  kWeightFlag = 6,
};

// Layer-type indicator values.
inline constexpr double kUnitHashLevel = 0.0;
inline constexpr double kUnitHiddenMlp = 1.0;
inline constexpr double kUnitOutputMlp = 2.0;

struct LayerObservation {
  ObservationVector raw{};
  ObservationVector normalized{};
};

LayerObservation normalize_observation(const ObservationVector& raw, const ObservationVector& maxima);

// round(0.5 + 8a), clamped to [1, 8]. Inputs outside [0, 1] are clamped first.
int action_to_bits(double action);
// Centre of the action interval that maps to `bits`.
double bits_to_action(int bits);

struct Transition {
  LayerObservation obs;
  double action = 0.0;
  double reward = 0.0;
  LayerObservation next_obs;
  bool done = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 2048);

  void push(const Transition& t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return items_[i]; }  // 0 = oldest

  // Uniform sampling with replacement.
  std::vector<Transition> sample(std::size_t count, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::deque<Transition> items_;
};

struct DdpgConfig {
  int hidden = 64;
  double actor_learning_rate = 1e-4;
  double critic_learning_rate = 1e-3;
  double tau = 0.01;
  double gamma = 1.0;
  std::size_t replay_capacity = 2048;
  double ema_decay = 0.95;
  double noise_sigma = 0.5;
  double noise_decay = 0.99;
  double noise_floor = 0.02;
  int warmup_episodes = 8;
  int updates_per_episode = 1;
  std::uint64_t seed = 1;

  void validate() const;
};

struct UpdateStats {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
  bool applied = false;
};

// Actor: obs -> [0,1] (sigmoid). Critic: (obs, action) -> Q.
class DdpgAgent {
 public:
  explicit DdpgAgent(const DdpgConfig& config);

  double select_action(const LayerObservation& obs, bool explore);
  double random_action();
  double policy_action(const LayerObservation& obs) const;
  double q_value(const LayerObservation& obs, double action) const;

  // R + gamma * Q'(S', mu'(S')) - eps, or R - eps for terminal transitions.
  double compute_q_target(const Transition& t) const;

  // One critic step and one actor step on `batch`, then a soft target update.
  // A non-finite loss rejects the update and leaves every parameter untouched.
  UpdateStats update(std::span<const Transition> batch);

  // Folds an episode reward into the moving-average baseline.
  void observe_reward(double reward);
  // Decays exploration noise and advances the episode counter.
  void end_episode();
  void soft_update_targets();

  double baseline() const { return baseline_; }
  double noise_sigma() const { return sigma_; }
  std::uint64_t episode() const { return episode_; }
  const DdpgConfig& config() const { return config_; }

  ReplayBuffer& replay() { return replay_; }
  const ReplayBuffer& replay() const { return replay_; }
  std::mt19937_64& rng() { return rng_; }

  DenseNet& actor() { return actor_; }
  DenseNet& critic() { return critic_; }
  const DenseNet& actor() const { return actor_; }
  const DenseNet& critic() const { return critic_; }
  const DenseNet& actor_target() const { return actor_target_; }
  const DenseNet& critic_target() const { return critic_target_; }

  // "HDPG" container: networks, baseline, noise scale, episode counter.
  void save(std::ostream& out) const;
  static DdpgAgent load(std::istream& in, const DdpgConfig& config);

 private:
  DdpgConfig config_;
  std::mt19937_64 rng_;
  DenseNet actor_;
  DenseNet critic_;
  DenseNet actor_target_;
  DenseNet critic_target_;
  Adam actor_opt_;
  Adam critic_opt_;
  ReplayBuffer replay_;
  double baseline_ = 0.0;
  std::uint64_t rewards_seen_ = 0;
  double sigma_;
  std::uint64_t episode_ = 0;
};

inline constexpr std::uint32_t kAgentCheckpointVersion = 1;

}  // namespace hashq
