#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wpmec/config.hpp"
#include "wpmec/environment.hpp"
#include "wpmec/mtdrl.hpp"
#include "wpmec/world.hpp"

namespace wpmec {

enum class PolicyKind {
  kMural,
  kOffloadOnly,     // no local computing
  kNoScheduling,    // every device type-1, tau fixed at 0.5
  kGreedy,          // centroid chasing, threshold charging
};

PolicyKind parse_policy(std::string_view name);
std::string to_string(PolicyKind kind);
/// Whether the policy needs trained networks.
bool uses_networks(PolicyKind kind);

/// Turns one action per UAV into beta flags and positions, then solves the
/// time split for them.
SlotDecision decide_slot(const WorldState& world, std::span<const int> alpha, std::span<const int> actions,
                         const ActionSpace& space, const SimConfig& cfg, bool local_compute = true);

/// argmax_a pi_u(a | s_u) for every UAV; ties go to the lowest index.
std::vector<int> greedy_actions(const PolicyNets& nets, const ActionSpace& space, const WorldState& world,
                                const SimConfig& cfg);

/// Each UAV heads for the centroid of the devices it is closest to (all
/// devices when it has none) and serves only when its battery covers the
/// most expensive serving action.
std::vector<int> greedy_baseline_actions(const ActionSpace& space, const WorldState& world,
                                         const SimConfig& cfg);

struct SlotResult {
  SlotDecision decision;
  SlotMetrics metrics;
};

/// Plans and applies one slot. `nets` may be null for policies that do not
/// use them.
SlotResult run_slot(Environment& env, const PolicyNets* nets, const ActionSpace& space, PolicyKind kind);

/// Planning half of run_slot, without touching the environment.
SlotDecision plan_slot(const WorldState& world, const PolicyNets* nets, const ActionSpace& space,
                       PolicyKind kind, const SimConfig& cfg);

struct EpisodeMetrics {
  int slots = 0;
  double mean_efficiency = 0.0;  // average of per-slot efficiency
  double total_bits = 0.0;
  double total_energy = 0.0;
  double avg_bits = 0.0;    // per slot
  double avg_energy = 0.0;  // per slot
  double mean_device_harvest = 0.0;  // J per device per slot
  int converged_slots = 0;
  int infeasible_slots = 0;
  int penalty_events = 0;
};

using SlotObserver = std::function<void(const SlotResult&, const WorldState& after)>;

EpisodeMetrics run_episode(Environment& env, const PolicyNets* nets, const ActionSpace& space, PolicyKind kind,
                           const SlotObserver& observer = {});

/// Seed of the world used for evaluation episode `episode`.
std::uint64_t evaluation_seed(std::uint64_t seed, int episode);

}  // namespace wpmec
