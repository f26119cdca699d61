#include "wpmec/device_sched.hpp"

#include <cmath>
#include <stdexcept>

#include "wpmec/physics.hpp"

namespace wpmec {

double threshold(const DeviceProfile& dev, const SimConfig& cfg) {
  return (dev.chip_coeff * std::pow(dev.cpu_hz, 3) + dev.tx_power) * cfg.slot_duration;
}

DeviceSchedule schedule_devices(std::span<const double> residuals, std::span<const double> thresholds) {
  if (residuals.size() != thresholds.size()) {
    throw std::invalid_argument("schedule_devices: residuals and thresholds differ in length");
  }
  DeviceSchedule s;
  s.thresholds.assign(thresholds.begin(), thresholds.end());
  s.alpha.reserve(residuals.size());
  for (std::size_t m = 0; m < residuals.size(); ++m) s.alpha.push_back(residuals[m] > thresholds[m] ? 1 : 0);
  return s;
}

DeviceSchedule schedule_devices(const WorldState& world, const SimConfig& cfg) {
  std::vector<double> residuals;
  std::vector<double> thresholds;
  residuals.reserve(world.devices.size());
  thresholds.reserve(world.devices.size());
  for (const auto& d : world.devices) {
    residuals.push_back(d.residual);
    thresholds.push_back(threshold(d.profile, cfg));
  }
  return schedule_devices(residuals, thresholds);
}

std::vector<ScheduledQuantities> scheduled_quantities(std::span<const int> alpha, double tau,
                                                      const WorldState& world, const SimConfig& cfg) {
  if (alpha.size() != world.devices.size()) {
    throw std::invalid_argument("scheduled_quantities: one alpha per device required");
  }
  std::vector<ScheduledQuantities> out;
  out.reserve(alpha.size());
  for (std::size_t m = 0; m < alpha.size(); ++m) {
    const auto& dev = world.devices[m];
    const auto uav = assign_best_uav(dev.pos, world.uavs, cfg);
    std::optional<double> gain;
    if (uav) gain = channel_gain(world.uavs[*uav].pos, dev.pos, cfg);
    ScheduledQuantities q;
    q.bits = device_bits(alpha[m], tau, gain, dev.profile, cfg).total();
    q.energy = device_energy(alpha[m], tau, uav.has_value(), dev.profile, cfg).total();
    q.harvest = device_harvest(alpha[m], virtual_ap_gain(dev.pos, world.aps, cfg), tau, cfg);
    q.uav = uav.value_or(-1);
    out.push_back(q);
  }
  return out;
}

}  // namespace wpmec
