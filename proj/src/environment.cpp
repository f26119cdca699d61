#include "wpmec/environment.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace wpmec {

Environment::Environment(const SimConfig& cfg, std::uint64_t seed)
    : cfg_(cfg), grid_(cfg.area_side, cfg.block_size) {
  reset(seed);
}

void Environment::reset(std::uint64_t seed) {
  world_ = init_world(cfg_, seed);
  mobility_rng_.seed(derive_seed(seed, 3));
}

void Environment::reset(WorldState world, std::uint64_t mobility_seed) {
  world_ = std::move(world);
  mobility_rng_.seed(derive_seed(mobility_seed, 3));
}

SlotMetrics Environment::apply(const SlotDecision& d, ComputeMode mode) {
  const std::size_t M = world_.devices.size();
  const std::size_t U = world_.uavs.size();
  if (d.alpha.size() != M || d.beta.size() != U || d.positions.size() != U) {
    throw std::invalid_argument("Environment::apply: decision does not match the world");
  }
  const double T = cfg_.slot_duration;

  SlotMetrics out;
  out.slot = world_.slot;
  out.tau = d.tau;
  out.tau_infeasible = !d.tau_feasible;
  out.devices.resize(M);
  out.uavs.resize(U);

  for (std::size_t u = 0; u < U; ++u) {
    auto& uav = world_.uavs[u];
    const Vec2 p{std::clamp(d.positions[u].x, 0.0, cfg_.area_side),
                 std::clamp(d.positions[u].y, 0.0, cfg_.area_side)};
    uav.speed = distance(p, uav.pos) / T;
    uav.pos = p;
    uav.beta = d.beta[u];
  }

  for (std::size_t m = 0; m < M; ++m) {
    auto& dev = world_.devices[m];
    auto& o = out.devices[m];
    const int alpha = d.alpha[m];
    dev.alpha = alpha;
    o.residual_before = dev.residual;

    const auto uav = assign_best_uav(dev.pos, world_.uavs, cfg_);
    std::optional<double> gain;
    if (uav) gain = channel_gain(world_.uavs[*uav].pos, dev.pos, cfg_);
    auto bits = device_bits(alpha, d.tau, gain, dev.profile, cfg_);
    auto energy = device_energy(alpha, d.tau, uav.has_value(), dev.profile, cfg_);
    if (mode == ComputeMode::kOffloadOnly) {
      bits.local = 0.0;
      energy.local = 0.0;
    }
    o.harvest_raw = device_harvest(alpha, virtual_ap_gain(dev.pos, world_.aps, cfg_), d.tau, cfg_);
    const double available = dev.residual + o.harvest_raw;

    if (energy.transmit > 0.0) {
      // Spending in the first period can only come from the battery.
      const double local_power = energy.local / T;
      const double first_period = (alpha * dev.profile.tx_power + local_power) * d.tau * T;
      if (first_period > dev.residual || energy.total() > available) {
        bits.offload = 0.0;
        energy.transmit = 0.0;
        o.offload_dropped = true;
        ++out.offload_drops;
      }
    }
    if (energy.local > available) {
      const double frac = energy.local > 0.0 ? std::max(0.0, available) / energy.local : 0.0;
      bits.local *= frac;
      energy.local = std::max(0.0, available);
      o.local_limited = true;
    }
    if (uav && bits.offload > 0.0) o.uav = *uav;

    double after = dev.residual + o.harvest_raw - energy.total();
    double harvested = o.harvest_raw;
    if (after > dev.battery_cap) {
      harvested -= after - dev.battery_cap;
      after = dev.battery_cap;
    }
    after = std::max(0.0, after);

    o.local_bits = bits.local;
    o.offload_bits = bits.offload;
    o.energy.harvested = std::max(0.0, harvested);
    o.energy.local_compute = energy.local;
    o.energy.transmit = energy.transmit;
    o.residual_after = after;
    dev.residual = after;

    out.local_bits += bits.local;
    out.offload_bits += bits.offload;
    out.device_energy += energy.total();
    out.device_harvest += o.energy.harvested;
  }

  for (std::size_t u = 0; u < U; ++u) {
    auto& uav = world_.uavs[u];
    auto& o = out.uavs[u];
    o.residual_before = uav.residual;
    o.speed = uav.speed;
    const auto e = uav_energy(uav.beta, uav.speed, uav.profile, cfg_);
    o.harvest_raw = uav_harvest(uav.beta, laser_gain(uav.pos, world_.laser, cfg_), cfg_);
    o.overspent = e.total() - uav.residual - o.harvest_raw > 0.0;
    if (o.overspent) ++out.penalty_events;

    double after = uav.residual + o.harvest_raw - e.total();
    double harvested = o.harvest_raw;
    if (after > uav.battery_cap) {
      harvested -= after - uav.battery_cap;
      after = uav.battery_cap;
    }
    after = std::max(0.0, after);

    o.energy.harvested = std::max(0.0, harvested);
    o.energy.flight = e.flight;
    o.energy.uav_compute = e.compute;
    o.residual_after = after;
    uav.residual = after;

    out.uav_energy += e.total();
    out.uav_harvest += o.energy.harvested;
  }

  out.total_bits = out.local_bits + out.offload_bits;
  out.efficiency = slot_efficiency(out.total_bits, out.device_energy, out.uav_energy);

  ++world_.slot;
  move_devices();
  return out;
}

void Environment::move_devices() {
  std::uniform_real_distribution<double> speed(0.0, cfg_.device_max_speed);
  for (auto& dev : world_.devices) {
    const auto w = step_device({dev.pos, dev.heading}, speed(mobility_rng_), cfg_.slot_duration, grid_,
                               mobility_rng_, cfg_.turn_straight_prob);
    dev.pos = w.pos;
    dev.heading = w.heading;
  }
}

}  // namespace wpmec
