#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "wpmec/config.hpp"
#include "wpmec/geometry.hpp"

namespace wpmec {

/// Per-device hardware figures. Devices copy these from the config at
/// creation, so heterogeneous populations only need a different profile.
struct DeviceProfile {
  double tx_power = 0.0;    // W
  double cpu_hz = 0.0;      // cycles/s
  double chip_coeff = 0.0;  // J s^2/cycle^3
};

struct UavProfile {
  double cpu_hz = 0.0;
  double chip_coeff = 0.0;
};

DeviceProfile device_profile(const SimConfig& cfg);
UavProfile uav_profile(const SimConfig& cfg);

struct Device {
  int id = 0;
  Vec2 pos;
  Heading heading = Heading::kNorth;
  double residual = 0.0;  // J, end of previous slot
  double battery_cap = 0.0;
  int alpha = 0;  // 1: offloads in the first period
  DeviceProfile profile;
};

struct Uav {
  int id = 0;
  Vec2 pos;  // altitude is SimConfig::uav_altitude
  double residual = 0.0;
  double battery_cap = 0.0;
  int beta = 0;  // 1: serves computation this slot, 0: charges from the laser
  double speed = 0.0;  // m/s flown in the last slot
  UavProfile profile;
};

struct WorldState {
  int slot = 0;
  std::vector<Device> devices;
  std::vector<Uav> uavs;
  std::vector<Vec2> aps;
  Vec2 laser;
};

/// Access points on a near-square grid of cell centers, row by row. A
/// partial last row is spread evenly across the area.
std::vector<Vec2> ap_grid(int count, double area_side);

/// Fresh scenario for a seed. Devices start on random street intersections,
/// UAVs at random positions; both use independent streams so changing the
/// UAV count does not move devices and vice versa.
WorldState init_world(const SimConfig& cfg, std::uint64_t seed);

nlohmann::json world_to_json(const WorldState& w, const SimConfig& cfg);
WorldState world_from_json(const nlohmann::json& j);

/// Stream derivation used for per-episode and per-entity seeding.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index = 0);

}  // namespace wpmec
