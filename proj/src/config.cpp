#include "wpmec/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

namespace wpmec {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError(msg);
}

void positive(double v, const char* name) {
  require(std::isfinite(v) && v > 0.0, std::string(name) + " must be > 0");
}

void non_negative(double v, const char* name) {
  require(std::isfinite(v) && v >= 0.0, std::string(name) + " must be >= 0");
}

void open_unit(double v, const char* name) {
  require(v > 0.0 && v < 1.0, std::string(name) + " out of (0,1)");
}

void at_least_one(int v, const char* name) {
  require(v >= 1, std::string(name) + " must be >= 1");
}

}  // namespace

const char* to_string(RewardMode mode) {
  return mode == RewardMode::kIncremental ? "incremental" : "cumulative";
}

SimConfig validate_config(const SimConfig& c) {
  at_least_one(c.num_devices, "num_devices");
  at_least_one(c.num_uavs, "num_uavs");
  at_least_one(c.num_aps, "num_aps");

  positive(c.area_side, "area_side");
  positive(c.slot_duration, "slot_duration");
  positive(c.bandwidth, "bandwidth");
  positive(c.noise_power, "noise_power");
  positive(c.device_tx_power, "device_tx_power");
  positive(c.device_cpu, "device_cpu");
  positive(c.uav_cpu, "uav_cpu");
  positive(c.cycles_per_bit, "cycles_per_bit");
  positive(c.ap_tx_power, "ap_tx_power");
  positive(c.laser_tx_power, "laser_tx_power");
  open_unit(c.device_harvest_eff, "device_harvest_eff");
  open_unit(c.uav_harvest_eff, "uav_harvest_eff");
  positive(c.uav_altitude, "uav_altitude");
  non_negative(c.device_max_speed, "device_max_speed");
  positive(c.chip_coeff_device, "chip_coeff_device");
  positive(c.chip_coeff_uav, "chip_coeff_uav");
  positive(c.flight_coeff_cubic, "flight_coeff_cubic");
  positive(c.flight_coeff_inverse, "flight_coeff_inverse");
  positive(c.channel_ref_gain, "channel_ref_gain");
  positive(c.ap_ref_gain, "ap_ref_gain");
  positive(c.ap_ref_distance, "ap_ref_distance");
  positive(c.laser_collector_area, "laser_collector_area");
  positive(c.laser_optical_eff, "laser_optical_eff");
  non_negative(c.laser_attenuation, "laser_attenuation");
  positive(c.laser_beam_size, "laser_beam_size");
  non_negative(c.laser_divergence, "laser_divergence");
  positive(c.min_speed_clamp, "min_speed_clamp");
  require(c.tau_epsilon > 0.0 && c.tau_epsilon < 0.5, "tau_epsilon out of (0,0.5)");

  positive(c.device_initial_battery, "device_initial_battery");
  positive(c.device_battery_cap, "device_battery_cap");
  require(c.device_initial_battery <= c.device_battery_cap,
          "device_initial_battery must not exceed device_battery_cap");
  positive(c.uav_initial_battery, "uav_initial_battery");
  positive(c.uav_battery_cap, "uav_battery_cap");
  require(c.uav_initial_battery <= c.uav_battery_cap,
          "uav_initial_battery must not exceed uav_battery_cap");

  positive(c.block_size, "block_size");
  require(c.block_size <= c.area_side, "block_size must not exceed area_side");
  require(c.turn_straight_prob >= 0.0 && c.turn_straight_prob <= 1.0,
          "turn_straight_prob out of [0,1]");

  positive(c.uav_speed_low, "uav_speed_low");
  require(c.uav_speed_high >= c.uav_speed_low, "uav_speed_high must be >= uav_speed_low");

  open_unit(c.discount, "discount");
  require(c.distill_weight >= 0.0 && c.distill_weight <= 1.0, "distill_weight out of [0,1]");
  positive(c.inverse_temperature, "inverse_temperature");
  non_negative(c.penalty, "penalty");
  at_least_one(c.batch_size, "batch_size");
  positive(c.learning_rate, "learning_rate");
  at_least_one(c.hidden_layers, "hidden_layers");
  at_least_one(c.hidden_units, "hidden_units");
  require(c.episodes >= 0, "episodes must be >= 0");
  at_least_one(c.slots_per_episode, "slots_per_episode");
  at_least_one(c.replay_capacity, "replay_capacity");
  at_least_one(c.target_sync_interval, "target_sync_interval");
  require(c.explore_start >= 0.0 && c.explore_start <= 1.0, "explore_start out of [0,1]");
  require(c.explore_end >= 0.0 && c.explore_end <= 1.0, "explore_end out of [0,1]");
  require(c.explore_anneal_fraction > 0.0 && c.explore_anneal_fraction <= 1.0,
          "explore_anneal_fraction out of (0,1]");
  at_least_one(c.reward_norm_warmup, "reward_norm_warmup");
  positive(c.reward_scale, "reward_scale");

  non_negative(c.psi_beta, "psi_beta");
  non_negative(c.psi_position, "psi_position");
  non_negative(c.psi_tau, "psi_tau");
  at_least_one(c.max_inner_iters, "max_inner_iters");
  return c;
}

namespace {

template <class T>
void read_field(const nlohmann::json& j, const char* name, T& out) {
  if constexpr (std::is_same_v<T, RewardMode>) {
    const auto s = j.get<std::string>();
    if (s == "incremental") {
      out = RewardMode::kIncremental;
    } else if (s == "cumulative") {
      out = RewardMode::kCumulative;
    } else {
      throw ConfigError(std::string(name) + " must be \"incremental\" or \"cumulative\"");
    }
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!j.is_boolean()) throw ConfigError(std::string(name) + " must be a boolean");
    out = j.get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) throw ConfigError(std::string(name) + " must be an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (j.is_number_unsigned()) {
        out = j.get<T>();
      } else {
        const auto v = j.get<std::int64_t>();
        if (v < 0) throw ConfigError(std::string(name) + " must be >= 0");
        out = static_cast<T>(v);
      }
    } else {
      out = j.get<T>();
    }
  } else {
    if (!j.is_number()) throw ConfigError(std::string(name) + " must be a number");
    out = j.get<T>();
  }
}

}  // namespace

SimConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  SimConfig cfg;
  std::set<std::string> known;
  visit_fields(cfg, [&](const char* name, auto& field) {
    known.insert(name);
    if (auto it = j.find(name); it != j.end()) read_field(*it, name, field);
  });
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key \"" + key + "\"");
  }
  return validate_config(cfg);
}

nlohmann::json config_to_json(const SimConfig& cfg) {
  nlohmann::json j = nlohmann::json::object();
  visit_fields(cfg, [&](const char* name, const auto& field) {
    using T = std::decay_t<decltype(field)>;
    if constexpr (std::is_same_v<T, RewardMode>) {
      j[name] = to_string(field);
    } else {
      j[name] = field;
    }
  });
  return j;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed config " + path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace wpmec
