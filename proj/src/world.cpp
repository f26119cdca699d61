#include "wpmec/world.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "wpmec/device_sched.hpp"
#include "wpmec/mobility.hpp"

namespace wpmec {

DeviceProfile device_profile(const SimConfig& cfg) {
  return {cfg.device_tx_power, cfg.device_cpu, cfg.chip_coeff_device};
}

UavProfile uav_profile(const SimConfig& cfg) { return {cfg.uav_cpu, cfg.chip_coeff_uav}; }

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream, std::uint64_t index) {
  // splitmix64 over a mixed key
  std::uint64_t z = base ^ (stream * 0x9E3779B97F4A7C15ULL) ^ (index * 0xD1B54A32D192ED03ULL);
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<Vec2> ap_grid(int count, double area_side) {
  std::vector<Vec2> aps;
  if (count <= 0) return aps;
  const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
  const int rows = (count + cols - 1) / cols;
  aps.reserve(count);
  for (int r = 0; r < rows; ++r) {
    const int in_row = std::min(cols, count - r * cols);
    const double y = (r + 0.5) * area_side / rows;
    for (int c = 0; c < in_row; ++c) aps.push_back({(c + 0.5) * area_side / in_row, y});
  }
  std::sort(aps.begin(), aps.end(), [](const Vec2& a, const Vec2& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  return aps;
}

WorldState init_world(const SimConfig& cfg, std::uint64_t seed) {
  WorldState w;
  w.laser = {cfg.area_side / 2.0, cfg.area_side / 2.0};
  w.aps = ap_grid(cfg.num_aps, cfg.area_side);

  const StreetGrid grid(cfg.area_side, cfg.block_size);
  std::mt19937_64 dev_rng(derive_seed(seed, 1));
  std::uniform_int_distribution<int> pick_node(0, grid.node_count() - 1);
  const auto dprof = device_profile(cfg);
  const double theta = threshold(dprof, cfg);
  for (int m = 0; m < cfg.num_devices; ++m) {
    Device d;
    d.id = m;
    d.pos = grid.node(pick_node(dev_rng));
    d.heading = random_exit(d.pos, grid, dev_rng);
    d.profile = dprof;
    d.battery_cap = cfg.device_battery_cap * theta;
    d.residual = cfg.device_initial_battery * theta;
    w.devices.push_back(d);
  }

  std::mt19937_64 uav_rng(derive_seed(seed, 2));
  std::uniform_real_distribution<double> coord(0.0, cfg.area_side);
  for (int u = 0; u < cfg.num_uavs; ++u) {
    Uav a;
    a.id = u;
    a.pos.x = coord(uav_rng);
    a.pos.y = coord(uav_rng);
    a.profile = uav_profile(cfg);
    a.battery_cap = cfg.uav_battery_cap;
    a.residual = cfg.uav_initial_battery;
    w.uavs.push_back(a);
  }
  return w;
}

nlohmann::json world_to_json(const WorldState& w, const SimConfig& cfg) {
  using nlohmann::json;
  json j;
  j["slot"] = w.slot;
  j["laser"] = {w.laser.x, w.laser.y, 0.0};
  j["aps"] = json::array();
  for (const auto& a : w.aps) j["aps"].push_back({a.x, a.y, 0.0});
  j["devices"] = json::array();
  for (const auto& d : w.devices) {
    j["devices"].push_back({{"id", d.id},
                            {"pos", {d.pos.x, d.pos.y, 0.0}},
                            {"heading", static_cast<int>(d.heading)},
                            {"residual", d.residual},
                            {"battery_cap", d.battery_cap},
                            {"alpha", d.alpha},
                            {"tx_power", d.profile.tx_power},
                            {"cpu_hz", d.profile.cpu_hz},
                            {"chip_coeff", d.profile.chip_coeff}});
  }
  j["uavs"] = json::array();
  for (const auto& u : w.uavs) {
    j["uavs"].push_back({{"id", u.id},
                         {"pos", {u.pos.x, u.pos.y, cfg.uav_altitude}},
                         {"residual", u.residual},
                         {"battery_cap", u.battery_cap},
                         {"beta", u.beta},
                         {"speed", u.speed},
                         {"cpu_hz", u.profile.cpu_hz},
                         {"chip_coeff", u.profile.chip_coeff}});
  }
  return j;
}

WorldState world_from_json(const nlohmann::json& j) {
  WorldState w;
  w.slot = j.at("slot").get<int>();
  w.laser = {j.at("laser")[0].get<double>(), j.at("laser")[1].get<double>()};
  for (const auto& a : j.at("aps")) w.aps.push_back({a[0].get<double>(), a[1].get<double>()});
  for (const auto& jd : j.at("devices")) {
    Device d;
    d.id = jd.at("id").get<int>();
    d.pos = {jd.at("pos")[0].get<double>(), jd.at("pos")[1].get<double>()};
    d.heading = static_cast<Heading>(jd.at("heading").get<int>());
    d.residual = jd.at("residual").get<double>();
    d.battery_cap = jd.at("battery_cap").get<double>();
    d.alpha = jd.at("alpha").get<int>();
    d.profile = {jd.at("tx_power").get<double>(), jd.at("cpu_hz").get<double>(),
                 jd.at("chip_coeff").get<double>()};
    w.devices.push_back(d);
  }
  for (const auto& ju : j.at("uavs")) {
    Uav u;
    u.id = ju.at("id").get<int>();
    u.pos = {ju.at("pos")[0].get<double>(), ju.at("pos")[1].get<double>()};
    u.residual = ju.at("residual").get<double>();
    u.battery_cap = ju.at("battery_cap").get<double>();
    u.beta = ju.at("beta").get<int>();
    u.speed = ju.at("speed").get<double>();
    u.profile = {ju.at("cpu_hz").get<double>(), ju.at("chip_coeff").get<double>()};
    w.uavs.push_back(u);
  }
  return w;
}

}  // namespace wpmec
