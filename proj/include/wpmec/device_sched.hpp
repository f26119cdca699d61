#pragma once

#include <span>
#include <vector>

#include "wpmec/config.hpp"
#include "wpmec/world.hpp"

namespace wpmec {

/// Largest energy a device can spend in one slot: computing locally and
/// transmitting for the whole slot, (k f^3 + P) T.
double threshold(const DeviceProfile& dev, const SimConfig& cfg);

struct DeviceSchedule {
  std::vector<int> alpha;
  std::vector<double> thresholds;
};

/// alpha = 1 exactly when the residual energy is strictly above the
/// device's threshold. Both spans must have the same length.
DeviceSchedule schedule_devices(std::span<const double> residuals, std::span<const double> thresholds);

/// Convenience overload reading residuals and profiles from the world.
DeviceSchedule schedule_devices(const WorldState& world, const SimConfig& cfg);

struct ScheduledQuantities {
  double bits = 0.0;     // local + offloaded
  double energy = 0.0;   // local + transmit
  double harvest = 0.0;  // before battery clamping
  int uav = -1;          // assigned type-1 UAV, -1 if none
};

/// Bits, energy and harvest of every device under a fixed schedule and
/// time split, using the world's current UAV positions and beta flags.
std::vector<ScheduledQuantities> scheduled_quantities(std::span<const int> alpha, double tau,
                                                      const WorldState& world, const SimConfig& cfg);

}  // namespace wpmec
