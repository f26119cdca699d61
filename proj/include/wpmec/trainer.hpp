#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "wpmec/config.hpp"
#include "wpmec/mtdrl.hpp"

namespace wpmec {

struct EpisodeLog {
  int episode = 0;
  double reward = 0.0;           // sum over slots and UAVs of the unshaped reward
  double loss_task_mean = 0.0;   // mean over training steps and UAVs, 0 before training starts
  double loss_shared = 0.0;      // mean over training steps
  double mean_efficiency = 0.0;  // bits/J, averaged over slots
  int penalty_events = 0;
};

/// Complete learner state. Everything a resumed run needs lives here.
struct Trainer {
  SimConfig cfg;
  std::uint64_t seed = 0;
  ActionSpace space;
  PolicyNets nets;
  std::vector<ReplayBuffer> replay;  // one per UAV
  std::mt19937_64 rng;
  RewardNormalizer normalizer;
  int next_episode = 0;
  std::vector<EpisodeLog> log;
};

Trainer make_trainer(const SimConfig& cfg, std::uint64_t seed);

/// Probability of a uniformly random action in the behavior policy.
double exploration_rate(const SimConfig& cfg, int episode);

/// Seed of the world used for training episode `episode`.
std::uint64_t training_seed(std::uint64_t seed, int episode);

/// Runs the next episode: sample actions from the mixed task policies,
/// schedule devices and solve the time split for them, apply the slot,
/// store transitions and take one task and one shared training step per
/// slot once every replay holds a batch.
const EpisodeLog& train_episode(Trainer& t);

/// Trains until `t.next_episode == episodes`. The callback sees every
/// finished episode.
void train_until(Trainer& t, int episodes, const std::function<void(const EpisodeLog&)>& on_episode = {});

struct TrainingResult {
  PolicyNets nets;
  std::vector<EpisodeLog> log;
};

/// cfg.episodes episodes from scratch.
TrainingResult run_training(const SimConfig& cfg, std::uint64_t seed);

}  // namespace wpmec
