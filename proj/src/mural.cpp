#include "wpmec/mural.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wpmec/device_sched.hpp"
#include "wpmec/physics.hpp"
#include "wpmec/tau_solver.hpp"

namespace wpmec {

PolicyKind parse_policy(std::string_view name) {
  if (name == "mural") return PolicyKind::kMural;
  if (name == "oo") return PolicyKind::kOffloadOnly;
  if (name == "nsd") return PolicyKind::kNoScheduling;
  if (name == "greedy") return PolicyKind::kGreedy;
  throw std::invalid_argument("unknown policy '" + std::string(name) + "' (expected mural, oo, nsd or greedy)");
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kMural: return "mural";
    case PolicyKind::kOffloadOnly: return "oo";
    case PolicyKind::kNoScheduling: return "nsd";
    case PolicyKind::kGreedy: return "greedy";
  }
  return "?";
}

bool uses_networks(PolicyKind kind) { return kind != PolicyKind::kGreedy; }

SlotDecision decide_slot(const WorldState& world, std::span<const int> alpha, std::span<const int> actions,
                         const ActionSpace& space, const SimConfig& cfg, bool local_compute) {
  SlotDecision d;
  d.alpha.assign(alpha.begin(), alpha.end());
  for (std::size_t u = 0; u < world.uavs.size(); ++u) {
    d.beta.push_back(space[actions[u]].beta);
    d.positions.push_back(space.next_position(actions[u], world.uavs[u].pos));
  }
  const auto sol = solve_slot(build_slot_problem(world, d.alpha, d.beta, d.positions, cfg, local_compute));
  d.tau = sol.tau;
  d.tau_feasible = sol.feasible;
  d.tau_violation = sol.violation;
  d.inner_iterations = 1;
  return d;
}

std::vector<int> greedy_actions(const PolicyNets& nets, const ActionSpace& space, const WorldState& world,
                                const SimConfig& cfg) {
  const int U = static_cast<int>(world.uavs.size());
  Matrix obs(observation_size(cfg), U);
  for (int u = 0; u < U; ++u) obs.col(u) = observe(world, u, cfg);
  const Matrix pi0 = shared_policy(nets, obs);
  std::vector<int> out;
  for (int u = 0; u < U; ++u) {
    const Vector q = nets.task.at(static_cast<std::size_t>(u)).forward(obs.col(u)).col(0);
    const Vector pi = boltzmann_policy(q, pi0.col(u), cfg.inverse_temperature);
    Eigen::Index best = 0;
    pi.head(space.size()).maxCoeff(&best);
    out.push_back(static_cast<int>(best));
  }
  return out;
}

std::vector<int> greedy_baseline_actions(const ActionSpace& space, const WorldState& world,
                                         const SimConfig& cfg) {
  const std::size_t U = world.uavs.size();
  std::vector<Vec2> sum(U);
  std::vector<int> count(U, 0);
  for (const auto& d : world.devices) {
    std::size_t best = 0;
    for (std::size_t u = 1; u < U; ++u) {
      if (squared_norm(world.uavs[u].pos - d.pos) < squared_norm(world.uavs[best].pos - d.pos)) best = u;
    }
    sum[best] = sum[best] + d.pos;
    ++count[best];
  }
  Vec2 all;
  for (const auto& d : world.devices) all = all + d.pos;
  all = all * (1.0 / static_cast<double>(world.devices.size()));

  // Most expensive serving action, priced the same way as the slot itself.
  double worst = 0.0;
  for (int a = 0; a < space.size(); ++a) {
    if (space[a].beta != 1) continue;
    worst = std::max(worst, uav_energy(1, space[a].speed, uav_profile(cfg), cfg).total());
  }

  std::vector<int> out;
  for (std::size_t u = 0; u < U; ++u) {
    const auto& uav = world.uavs[u];
    const Vec2 goal = count[u] > 0 ? sum[u] * (1.0 / count[u]) : all;
    const int beta = uav.residual > worst ? 1 : 0;
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int a = 0; a < space.size(); ++a) {
      if (space[a].beta != beta) continue;
      const double dist = distance(space.next_position(a, uav.pos), goal);
      if (dist < best_d) {
        best_d = dist;
        best = a;
      }
    }
    out.push_back(best);
  }
  return out;
}

namespace {

SlotDecision alternate(const WorldState& world, std::span<const int> alpha, const PolicyNets& nets,
                       const ActionSpace& space, const SimConfig& cfg, bool local_compute) {
  const std::size_t U = world.uavs.size();
  std::vector<int> beta;
  std::vector<Vec2> pos;
  for (const auto& u : world.uavs) {
    beta.push_back(u.beta);
    pos.push_back(u.pos);
  }

  SlotDecision d;
  d.alpha.assign(alpha.begin(), alpha.end());
  d.converged = false;
  double tau_prev = std::numeric_limits<double>::quiet_NaN();
  TauSolution sol;
  // Observations carry no time split, so the argmax does not change
  // between rounds.
  const auto actions = greedy_actions(nets, space, world, cfg);
  for (int i = 1; i <= cfg.max_inner_iters; ++i) {
    sol = solve_slot(build_slot_problem(world, d.alpha, beta, pos, cfg, local_compute));
    double d_beta = 0.0;
    double d_pos = 0.0;
    for (std::size_t u = 0; u < U; ++u) {
      const int b = space[actions[u]].beta;
      const Vec2 q = space.next_position(actions[u], world.uavs[u].pos);
      d_beta += std::abs(b - beta[u]);
      d_pos += distance(q, pos[u]);
      beta[u] = b;
      pos[u] = q;
    }
    const double d_tau = std::isnan(tau_prev) ? std::numeric_limits<double>::infinity()
                                               : std::abs(sol.tau - tau_prev);
    tau_prev = sol.tau;
    d.inner_iterations = i;
    if (d_beta <= cfg.psi_beta && d_pos <= cfg.psi_position && d_tau <= cfg.psi_tau) {
      d.converged = true;
      break;
    }
  }
  d.beta = beta;
  d.positions = pos;
  if (!d.converged) sol = solve_slot(build_slot_problem(world, d.alpha, beta, pos, cfg, local_compute));
  d.tau = sol.tau;
  d.tau_feasible = sol.feasible;
  d.tau_violation = sol.violation;
  return d;
}

}  // namespace

SlotDecision plan_slot(const WorldState& world, const PolicyNets* nets, const ActionSpace& space,
                       PolicyKind kind, const SimConfig& cfg) {
  if (uses_networks(kind) && nets == nullptr) {
    throw std::invalid_argument("policy '" + to_string(kind) + "' needs trained networks");
  }
  const auto alpha = schedule_devices(world, cfg).alpha;
  switch (kind) {
    case PolicyKind::kMural: return alternate(world, alpha, *nets, space, cfg, true);
    case PolicyKind::kOffloadOnly: return alternate(world, alpha, *nets, space, cfg, false);
    case PolicyKind::kNoScheduling: {
      const std::vector<int> all_type1(world.devices.size(), 1);
      auto d = decide_slot(world, all_type1, greedy_actions(*nets, space, world, cfg), space, cfg);
      d.tau = 0.5;
      d.tau_feasible = true;
      d.tau_violation = 0.0;
      return d;
    }
    case PolicyKind::kGreedy:
      return decide_slot(world, alpha, greedy_baseline_actions(space, world, cfg), space, cfg);
  }
  throw std::logic_error("plan_slot: unhandled policy");
}

SlotResult run_slot(Environment& env, const PolicyNets* nets, const ActionSpace& space, PolicyKind kind) {
  SlotResult r;
  r.decision = plan_slot(env.world(), nets, space, kind, env.config());
  r.metrics = env.apply(r.decision,
                        kind == PolicyKind::kOffloadOnly ? ComputeMode::kOffloadOnly : ComputeMode::kFull);
  return r;
}

EpisodeMetrics run_episode(Environment& env, const PolicyNets* nets, const ActionSpace& space, PolicyKind kind,
                           const SlotObserver& observer) {
  const auto& cfg = env.config();
  EpisodeMetrics e;
  double harvest = 0.0;
  for (int t = 0; t < cfg.slots_per_episode; ++t) {
    const auto r = run_slot(env, nets, space, kind);
    const auto& m = r.metrics;
    ++e.slots;
    e.mean_efficiency += m.efficiency;
    e.total_bits += m.total_bits;
    e.total_energy += m.total_energy();
    harvest += m.device_harvest;
    e.converged_slots += r.decision.converged ? 1 : 0;
    e.infeasible_slots += m.tau_infeasible ? 1 : 0;
    e.penalty_events += m.penalty_events;
    if (observer) observer(r, env.world());
  }
  if (e.slots > 0) {
    const double n = e.slots;
    e.mean_efficiency /= n;
    e.avg_bits = e.total_bits / n;
    e.avg_energy = e.total_energy / n;
    e.mean_device_harvest = harvest / (n * static_cast<double>(env.world().devices.size()));
  }
  return e;
}

std::uint64_t evaluation_seed(std::uint64_t seed, int episode) {
  return derive_seed(seed, 200, static_cast<std::uint64_t>(episode));
}

}  // namespace wpmec
