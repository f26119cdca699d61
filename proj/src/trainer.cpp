#include "wpmec/trainer.hpp"

#include <algorithm>
#include <vector>

#include "wpmec/device_sched.hpp"
#include "wpmec/environment.hpp"
#include "wpmec/mural.hpp"

namespace wpmec {

Trainer make_trainer(const SimConfig& cfg, std::uint64_t seed) {
  Trainer t{cfg, seed, ActionSpace(cfg), {}, {}, std::mt19937_64(derive_seed(seed, 4)), {}, 0, {}};
  std::mt19937_64 init(derive_seed(seed, 5));
  t.nets = make_policy_nets(cfg, observation_size(cfg), t.space.size(), init);
  t.replay.assign(static_cast<std::size_t>(cfg.num_uavs), ReplayBuffer(static_cast<std::size_t>(cfg.replay_capacity)));
  t.normalizer.warmup = cfg.reward_norm_warmup;
  t.normalizer.scale = cfg.reward_scale;
  return t;
}

double exploration_rate(const SimConfig& cfg, int episode) {
  const double span = cfg.explore_anneal_fraction * cfg.episodes;
  const double f = span > 0.0 ? std::min(1.0, episode / span) : 1.0;
  return cfg.explore_start + (cfg.explore_end - cfg.explore_start) * f;
}

std::uint64_t training_seed(std::uint64_t seed, int episode) {
  return derive_seed(seed, 100, static_cast<std::uint64_t>(episode));
}

const EpisodeLog& train_episode(Trainer& t) {
  const auto& cfg = t.cfg;
  const int U = cfg.num_uavs;
  const int A = t.space.size();
  const double eps = exploration_rate(cfg, t.next_episode);
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  Environment env(cfg, training_seed(t.seed, t.next_episode));
  EpisodeLog log;
  log.episode = t.next_episode;
  std::vector<double> history;
  double task_loss_sum = 0.0;
  double shared_loss_sum = 0.0;
  int steps = 0;

  Matrix obs(observation_size(cfg), U);
  for (int u = 0; u < U; ++u) obs.col(u) = observe(env.world(), u, cfg);

  for (int slot = 0; slot < cfg.slots_per_episode; ++slot) {
    const Matrix pi0 = shared_policy(t.nets, obs);
    std::vector<int> actions(static_cast<std::size_t>(U));
    for (int u = 0; u < U; ++u) {
      const Vector q = t.nets.task[static_cast<std::size_t>(u)].forward(obs.col(u)).col(0);
      const Vector pi = boltzmann_policy(q, pi0.col(u), cfg.inverse_temperature);
      const Vector behavior = (1.0 - eps) * pi.array() + eps / A;
      std::discrete_distribution<int> pick(behavior.data(), behavior.data() + behavior.size());
      actions[static_cast<std::size_t>(u)] = pick(t.rng);
    }

    const auto alpha = schedule_devices(env.world(), cfg).alpha;
    const auto decision = decide_slot(env.world(), alpha, actions, t.space, cfg);
    const auto m = env.apply(decision);

    t.normalizer.observe(m.efficiency);
    history.push_back(m.efficiency);
    const double base = t.normalizer.normalize(base_reward(history, cfg.reward_mode));
    const bool done = slot + 1 == cfg.slots_per_episode;

    Matrix next(obs.rows(), U);
    for (int u = 0; u < U; ++u) next.col(u) = observe(env.world(), u, cfg);
    for (int u = 0; u < U; ++u) {
      const auto k = static_cast<std::size_t>(u);
      const auto& o = m.uavs[k];
      const double r = base - penalty(o.energy.flight + o.energy.uav_compute, o.residual_before, o.harvest_raw, cfg);
      log.reward += r;
      const int a = actions[k];
      t.replay[k].push({obs.col(u), a, shaped_reward(r, pi0(a, u), cfg), next.col(u), slot, done});
    }
    log.mean_efficiency += m.efficiency;
    log.penalty_events += m.penalty_events;
    obs = std::move(next);

    const bool ready = std::all_of(t.replay.begin(), t.replay.end(),
                                   [&](const ReplayBuffer& r) { return r.size() >= batch; });
    if (ready) {
      std::vector<std::vector<const Transition*>> batches;
      for (int u = 0; u < U; ++u) {
        batches.push_back(t.replay[static_cast<std::size_t>(u)].sample(batch, t.rng));
        task_loss_sum += train_task_network(batches.back(), t.nets, u, cfg);
      }
      shared_loss_sum += train_shared_network(batches, t.nets);
      ++steps;
    }
  }

  log.mean_efficiency /= cfg.slots_per_episode;
  if (steps > 0) {
    log.loss_task_mean = task_loss_sum / (steps * U);
    log.loss_shared = shared_loss_sum / steps;
  }
  ++t.next_episode;
  t.log.push_back(log);
  return t.log.back();
}

void train_until(Trainer& t, int episodes, const std::function<void(const EpisodeLog&)>& on_episode) {
  while (t.next_episode < episodes) {
    const auto& log = train_episode(t);
    if (on_episode) on_episode(log);
  }
}

TrainingResult run_training(const SimConfig& cfg, std::uint64_t seed) {
  auto t = make_trainer(cfg, seed);
  train_until(t, cfg.episodes);
  return {std::move(t.nets), std::move(t.log)};
}

}  // namespace wpmec
