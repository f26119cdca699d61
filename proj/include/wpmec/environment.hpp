#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "wpmec/config.hpp"
#include "wpmec/mobility.hpp"
#include "wpmec/physics.hpp"
#include "wpmec/world.hpp"

namespace wpmec {

/// Everything decided for one slot.
struct SlotDecision {
  double tau = 0.5;
  std::vector<int> alpha;        // per device
  std::vector<int> beta;         // per UAV
  std::vector<Vec2> positions;   // per UAV, this slot
  int inner_iterations = 0;
  bool converged = true;
  bool tau_feasible = true;
  double tau_violation = 0.0;    // J, zero when feasible
};

enum class ComputeMode {
  kFull,
  kOffloadOnly,  // local computing disabled
};

struct DeviceOutcome {
  int uav = -1;  // serving UAV, -1 if none
  double local_bits = 0.0;
  double offload_bits = 0.0;
  EnergyLedger energy;       // harvested is what actually entered the battery
  double harvest_raw = 0.0;  // before the battery cap
  double residual_before = 0.0;
  double residual_after = 0.0;
  bool offload_dropped = false;  // could not afford to transmit
  bool local_limited = false;    // could not afford full local computing
};

struct UavOutcome {
  EnergyLedger energy;
  double harvest_raw = 0.0;
  double speed = 0.0;
  double residual_before = 0.0;
  double residual_after = 0.0;
  bool overspent = false;  // consumption exceeded residual + harvest
};

struct SlotMetrics {
  int slot = 0;
  double tau = 0.0;
  double local_bits = 0.0;
  double offload_bits = 0.0;
  double total_bits = 0.0;
  double device_energy = 0.0;
  double uav_energy = 0.0;
  double efficiency = 0.0;  // bits/J
  double device_harvest = 0.0;
  double uav_harvest = 0.0;
  bool tau_infeasible = false;
  int offload_drops = 0;
  int penalty_events = 0;
  std::vector<DeviceOutcome> devices;
  std::vector<UavOutcome> uavs;

  double total_energy() const { return device_energy + uav_energy; }
};

/// The simulation loop's mutable state: the world plus the mobility random
/// stream. Copying an Environment forks the simulation.
class Environment {
 public:
  Environment(const SimConfig& cfg, std::uint64_t seed);

  void reset(std::uint64_t seed);
  /// Starts from a given state instead of a fresh scenario.
  void reset(WorldState world, std::uint64_t mobility_seed);

  /// Applies one slot: UAVs move to their decided positions, devices and
  /// UAVs spend and harvest energy, then devices walk for one slot.
  ///
  /// A device that cannot pay for its planned transmission out of its
  /// residual plus harvest skips offloading; if local computing alone is
  /// still unaffordable it computes the affordable fraction. A UAV that
  /// over-spends is flagged and its battery empties. Batteries clamp at
  /// their caps.
  SlotMetrics apply(const SlotDecision& d, ComputeMode mode = ComputeMode::kFull);

  const WorldState& world() const { return world_; }
  const SimConfig& config() const { return cfg_; }
  const StreetGrid& grid() const { return grid_; }

 private:
  void move_devices();

  SimConfig cfg_;
  StreetGrid grid_;
  WorldState world_;
  std::mt19937_64 mobility_rng_;
};

}  // namespace wpmec
