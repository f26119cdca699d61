#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "wpmec/config.hpp"
#include "wpmec/mlp.hpp"
#include "wpmec/world.hpp"

namespace wpmec {

// ---------------------------------------------------------------- actions

struct UavAction {
  int beta = 0;
  int direction = -1;  // -1 stay, else 0..7 clockwise from north
  double speed = 0.0;  // m/s, 0 for stay
};

/// beta x (stay + 8 compass moves x speed levels). Moves are clamped to the
/// area, so a move into a wall may fly less than speed * T.
class ActionSpace {
 public:
  explicit ActionSpace(const SimConfig& cfg);

  int size() const { return static_cast<int>(actions_.size()); }
  const UavAction& operator[](int i) const { return actions_.at(static_cast<std::size_t>(i)); }
  Vec2 next_position(int index, const Vec2& from) const;
  int index_of(int beta, int direction, double speed) const;

 private:
  std::vector<UavAction> actions_;
  double side_ = 0.0;
  double dt_ = 1.0;
};

ActionSpace build_action_space(const SimConfig& cfg);

// ----------------------------------------------------------- observations

/// 3 own-UAV features, 4 per other UAV when joint_obs is set, 3 per device.
int observation_size(const SimConfig& cfg);

/// Observation for UAV `u`, every entry in [0, 1]. Other UAVs follow in id
/// order (skipping `u`), then devices in id order.
Vector observe(const WorldState& world, int u, const SimConfig& cfg);

// ----------------------------------------------------------------- reward

/// lambda_u when the UAV's use exceeds its residual plus harvest, else 0.
double penalty(double use, double residual, double harvest, const SimConfig& cfg);

/// Efficiency-based reward for a slot given the efficiencies so far in the
/// episode (last entry is the current slot).
double base_reward(std::span<const double> efficiency_history, RewardMode mode);

/// Running mean of the slot efficiency over the first `warmup` slots of
/// training, frozen afterwards. Rewards are efficiency / mean * scale.
struct RewardNormalizer {
  int warmup = 100;
  double scale = 1.0;
  std::int64_t count = 0;
  double mean = 0.0;

  void observe(double efficiency);
  double normalize(double value) const;
};

/// r'' = r' + (lambda / mu) log pi0(a|s). Throws on pi0 <= 0.
double shaped_reward(double reward, double pi0_prob, const SimConfig& cfg);

/// (1/mu) log sum_a pi0(a) exp(mu Q(a)), max-shifted.
double soft_value(const Vector& q, const Vector& pi0, double mu);

/// pi0(a) exp(mu (Q(a) - V)).
Vector boltzmann_policy(const Vector& q, const Vector& pi0, double mu);

/// Soft Bellman target for one step.
double q_target(double reward, double pi0_prob, double next_value, bool done, const SimConfig& cfg);

// ----------------------------------------------------------------- replay

struct Transition {
  Vector obs;
  int action = 0;
  double reward = 0.0;  // shaped
  Vector next_obs;
  int slot = 0;
  bool done = false;
};

class ReplayBuffer {
 public:
  ReplayBuffer() = default;
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {}

  void push(Transition t);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// Uniform with replacement.
  std::vector<const Transition*> sample(std::size_t n, std::mt19937_64& rng) const;

  // Storage in insertion ring order, for checkpoints.
  const std::vector<Transition>& data() const { return data_; }
  std::size_t next() const { return next_; }
  void restore(std::vector<Transition> data, std::size_t next);

 private:
  std::size_t capacity_ = 0;
  std::size_t next_ = 0;
  std::vector<Transition> data_;
};

// --------------------------------------------------------------- networks

struct PolicyNets {
  Mlp shared;  // logits; pi0 is their softmax
  Adam shared_opt;
  std::vector<Mlp> task;    // Q_u
  std::vector<Mlp> target;  // frozen copies of Q_u
  std::vector<Adam> task_opt;
};

PolicyNets make_policy_nets(const SimConfig& cfg, int obs_size, int actions, std::mt19937_64& rng);

/// pi0 for a batch of observations (actions x batch).
Matrix shared_policy(const PolicyNets& nets, const Matrix& obs);

/// pi_u for one observation.
Vector task_policy(const PolicyNets& nets, int u, const Vector& obs, const SimConfig& cfg);

/// Mean of (Q(s, a) - y)^2; fills `grad` with its gradient when non-null.
double task_loss(const Mlp& q, const Matrix& obs, std::span<const int> actions, const Vector& targets,
                 Vector* grad);

/// Mean of -log pi0(a | s); fills `grad` when non-null.
double shared_loss(const Mlp& pi0, const Matrix& obs, std::span<const int> actions, Vector* grad);

/// Targets for a batch using the frozen net and the current shared policy.
Vector task_targets(std::span<const Transition* const> batch, const PolicyNets& nets, int u,
                    const SimConfig& cfg);

/// One optimizer step on Q_u; returns the loss before the step. Synchronizes
/// the frozen copy every target_sync_interval steps. Throws on a non-finite
/// loss.
double train_task_network(std::span<const Transition* const> batch, PolicyNets& nets, int u,
                          const SimConfig& cfg);

/// One distillation step on pi0 over the union of the task batches; returns
/// the negative log-likelihood before the step.
double train_shared_network(std::span<const std::vector<const Transition*>> batches, PolicyNets& nets);

}  // namespace wpmec
