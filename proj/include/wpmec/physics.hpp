#pragma once

#include <limits>
#include <optional>
#include <span>

#include "wpmec/config.hpp"
#include "wpmec/geometry.hpp"
#include "wpmec/world.hpp"

namespace wpmec {

constexpr double kUnlimited = std::numeric_limits<double>::infinity();

/// Per-entity energy flows of one slot, all in joules and non-negative.
struct EnergyLedger {
  double harvested = 0.0;
  double local_compute = 0.0;
  double transmit = 0.0;
  double flight = 0.0;
  double uav_compute = 0.0;

  double consumed() const { return local_compute + transmit + flight + uav_compute; }
};

// Line-of-sight UAV-device gain: xi0 / (H^2 + horizontal distance^2).
double channel_gain(const Vec2& uav, const Vec2& device, const SimConfig& cfg);

/// Gain from the virtual transmitter formed by all APs: the sum of
/// xi_ap / (d0^2 + d^2) over APs.
double virtual_ap_gain(const Vec2& device, std::span<const Vec2> aps, const SimConfig& cfg);

double laser_gain_at_distance(double d, const SimConfig& cfg);
/// Uses the 3-D distance between the UAV (at altitude H) and the emitter.
double laser_gain(const Vec2& uav, const Vec2& laser, const SimConfig& cfg);

/// Share of the slot a device spends offloading: tau for type-1, 1 - tau
/// for type-2.
inline double offload_share(int alpha, double tau) { return 1.0 - tau - alpha + 2.0 * alpha * tau; }
/// The complementary share, spent harvesting.
inline double harvest_share(int alpha, double tau) { return 1.0 - offload_share(alpha, tau); }

/// Shannon rate B log2(1 + P h / sigma^2) in bits/s.
double offload_rate(double gain, double tx_power, const SimConfig& cfg);

double device_harvest(int alpha, double ap_gain, double tau, const SimConfig& cfg,
                      double headroom = kUnlimited);

struct DeviceBits {
  double local = 0.0;
  double offload = 0.0;
  double total() const { return local + offload; }
};

/// `uav_gain` is the gain to the assigned type-1 UAV; without one nothing
/// is offloaded.
DeviceBits device_bits(int alpha, double tau, std::optional<double> uav_gain,
                       const DeviceProfile& dev, const SimConfig& cfg);

struct DeviceEnergy {
  double local = 0.0;
  double transmit = 0.0;
  double total() const { return local + transmit; }
};

DeviceEnergy device_energy(int alpha, double tau, bool served, const DeviceProfile& dev,
                           const SimConfig& cfg);

double uav_harvest(int beta, double laser_gain, const SimConfig& cfg, double headroom = kUnlimited);

struct UavEnergy {
  double flight = 0.0;
  double compute = 0.0;
  double total() const { return flight + compute; }
};

/// Fixed-wing propulsion plus serving cost. Speeds below min_speed_clamp
/// are priced at the clamp; the propulsion model diverges at zero speed.
UavEnergy uav_energy(int beta, double speed, const UavProfile& uav, const SimConfig& cfg);

/// Bits per joule. Throws std::domain_error when the energy total is not
/// positive.
double slot_efficiency(double bits, double device_energy, double uav_energy);

/// Type-1 UAV with the strongest channel to `device`; ties go to the lowest
/// id. Empty when no UAV serves this slot.
std::optional<int> assign_best_uav(const Vec2& device, std::span<const Uav> uavs,
                                   const SimConfig& cfg);

}  // namespace wpmec
