#include "wpmec/physics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wpmec {

double channel_gain(const Vec2& uav, const Vec2& device, const SimConfig& cfg) {
  const double h = cfg.uav_altitude;
  return cfg.channel_ref_gain / (h * h + squared_norm(uav - device));
}

double virtual_ap_gain(const Vec2& device, std::span<const Vec2> aps, const SimConfig& cfg) {
  const double d0_sq = cfg.ap_ref_distance * cfg.ap_ref_distance;
  double sum = 0.0;
  for (const auto& ap : aps) sum += cfg.ap_ref_gain / (d0_sq + squared_norm(device - ap));
  return sum;
}

double laser_gain_at_distance(double d, const SimConfig& cfg) {
  const double spot = cfg.laser_beam_size + cfg.laser_divergence * d;
  return cfg.laser_collector_area * cfg.laser_optical_eff * std::exp(-cfg.laser_attenuation * d) /
         (spot * spot);
}

double laser_gain(const Vec2& uav, const Vec2& laser, const SimConfig& cfg) {
  const double h = cfg.uav_altitude;
  return laser_gain_at_distance(std::sqrt(squared_norm(uav - laser) + h * h), cfg);
}

double offload_rate(double gain, double tx_power, const SimConfig& cfg) {
  return cfg.bandwidth * std::log2(1.0 + tx_power * gain / cfg.noise_power);
}

double device_harvest(int alpha, double ap_gain, double tau, const SimConfig& cfg, double headroom) {
  const double e = cfg.device_harvest_eff * ap_gain * cfg.ap_tx_power * harvest_share(alpha, tau) *
                   cfg.slot_duration;
  return std::clamp(e, 0.0, std::max(0.0, headroom));
}

DeviceBits device_bits(int alpha, double tau, std::optional<double> uav_gain,
                       const DeviceProfile& dev, const SimConfig& cfg) {
  DeviceBits bits;
  bits.local = dev.cpu_hz * cfg.slot_duration / cfg.cycles_per_bit;
  if (uav_gain) {
    bits.offload = offload_share(alpha, tau) * offload_rate(*uav_gain, dev.tx_power, cfg) *
                   cfg.slot_duration;
  }
  return bits;
}

DeviceEnergy device_energy(int alpha, double tau, bool served, const DeviceProfile& dev,
                           const SimConfig& cfg) {
  DeviceEnergy e;
  e.local = dev.chip_coeff * std::pow(dev.cpu_hz, 3) * cfg.slot_duration;
  if (served) e.transmit = offload_share(alpha, tau) * cfg.slot_duration * dev.tx_power;
  return e;
}

double uav_harvest(int beta, double laser_gain, const SimConfig& cfg, double headroom) {
  const double e = cfg.uav_harvest_eff * (1 - beta) * laser_gain * cfg.laser_tx_power * cfg.slot_duration;
  return std::clamp(e, 0.0, std::max(0.0, headroom));
}

UavEnergy uav_energy(int beta, double speed, const UavProfile& uav, const SimConfig& cfg) {
  const double v = std::max(speed, cfg.min_speed_clamp);
  UavEnergy e;
  e.flight = cfg.slot_duration * (cfg.flight_coeff_cubic * v * v * v + cfg.flight_coeff_inverse / v);
  e.compute = beta * uav.chip_coeff * std::pow(uav.cpu_hz, 3) * cfg.slot_duration;
  return e;
}

double slot_efficiency(double bits, double device_energy, double uav_energy) {
  const double total = device_energy + uav_energy;
  if (!(total > 0.0)) throw std::domain_error("slot_efficiency: total energy must be positive");
  return bits / total;
}

std::optional<int> assign_best_uav(const Vec2& device, std::span<const Uav> uavs,
                                   const SimConfig& cfg) {
  std::optional<int> best;
  double best_gain = -1.0;
  for (const auto& u : uavs) {
    if (u.beta != 1) continue;
    const double g = channel_gain(u.pos, device, cfg);
    if (g > best_gain || (g == best_gain && best && u.id < *best)) {
      best_gain = g;
      best = u.id;
    }
  }
  return best;
}

}  // namespace wpmec
