#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace wpmec {

/// Thrown when a configuration record violates an invariant. The message
/// names the first violated field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class RewardMode { kIncremental, kCumulative };

/// Every scalar the simulator and learner consume. See README,
/// "Configuration", for units and the less obvious defaults.
struct SimConfig {
  // Scenario geometry and population.
  double area_side = 1000.0;  // m
  int num_devices = 40;
  int num_uavs = 4;
  int num_aps = 4;
  double slot_duration = 1.0;  // s

  // Radio and computation.
  double bandwidth = 1e6;           // Hz
  double noise_power = 1e-13;       // W, about -100 dBm over 1 MHz
  double device_tx_power = 0.1;     // W
  double device_cpu = 5e8;          // cycles/s
  double uav_cpu = 2.5e9;           // cycles/s
  double cycles_per_bit = 50.0;     // cycles/bit
  double ap_tx_power = 60.0;        // W
  double laser_tx_power = 200.0;    // W
  double device_harvest_eff = 0.5;  // (0,1)
  double uav_harvest_eff = 0.8;     // (0,1)
  double uav_altitude = 10.0;       // m
  double device_max_speed = 5.56;   // m/s
  double chip_coeff_device = 1e-28;
  double chip_coeff_uav = 1e-28;
  double flight_coeff_cubic = 1e-3;   // W s^3/m^3
  double flight_coeff_inverse = 40.0; // W m/s
  double channel_ref_gain = 1e-3;     // at 1 m
  double ap_ref_gain = 50.0;
  double ap_ref_distance = 1.0;  // m, regularizes the AP path loss at zero range

  // Laser link: g = G * theta * exp(-phi d) / (F + nu d)^2.
  double laser_collector_area = 1.0;  // G
  double laser_optical_eff = 1.0;     // theta
  double laser_attenuation = 1e-4;    // phi, 1/m
  double laser_beam_size = 0.1;       // F, m
  double laser_divergence = 1e-3;     // nu, rad

  double min_speed_clamp = 0.1;  // m/s
  double tau_epsilon = 1e-4;

  // Batteries. Device figures are multiples of the scheduling threshold.
  double device_initial_battery = 5.0;
  double device_battery_cap = 10.0;
  double uav_initial_battery = 500.0;  // J
  double uav_battery_cap = 1000.0;     // J

  // Manhattan mobility.
  double block_size = 100.0;  // m
  double turn_straight_prob = 0.5;

  // UAV action discretization.
  double uav_speed_low = 5.0;   // m/s
  double uav_speed_high = 10.0; // m/s

  // Learner.
  double discount = 0.95;
  double distill_weight = 0.5;       // lambda
  double inverse_temperature = 1.0;  // mu
  double penalty = 10.0;             // lambda_u, in normalized reward units
  int batch_size = 128;
  double learning_rate = 1e-3;
  int hidden_layers = 2;
  int hidden_units = 128;
  int episodes = 200;
  int slots_per_episode = 50;
  int replay_capacity = 10000;
  int target_sync_interval = 100;
  double explore_start = 0.3;
  double explore_end = 0.01;
  double explore_anneal_fraction = 1.0 / 3.0;
  int reward_norm_warmup = 100;  // slots used to estimate the reward scale
  double reward_scale = 1.0;
  RewardMode reward_mode = RewardMode::kIncremental;
  bool joint_obs = true;

  // Alternating optimization.
  double psi_beta = 1e-3;
  double psi_position = 1.0;  // m
  double psi_tau = 1e-3;
  int max_inner_iters = 10;

  std::uint64_t rng_seed = 1;
};

/// Calls `f(name, field)` for every field, in schema order.
template <class Cfg, class F>
void visit_fields(Cfg& c, F&& f) {
  f("area_side", c.area_side);
  f("num_devices", c.num_devices);
  f("num_uavs", c.num_uavs);
  f("num_aps", c.num_aps);
  f("slot_duration", c.slot_duration);
  f("bandwidth", c.bandwidth);
  f("noise_power", c.noise_power);
  f("device_tx_power", c.device_tx_power);
  f("device_cpu", c.device_cpu);
  f("uav_cpu", c.uav_cpu);
  f("cycles_per_bit", c.cycles_per_bit);
  f("ap_tx_power", c.ap_tx_power);
  f("laser_tx_power", c.laser_tx_power);
  f("device_harvest_eff", c.device_harvest_eff);
  f("uav_harvest_eff", c.uav_harvest_eff);
  f("uav_altitude", c.uav_altitude);
  f("device_max_speed", c.device_max_speed);
  f("chip_coeff_device", c.chip_coeff_device);
  f("chip_coeff_uav", c.chip_coeff_uav);
  f("flight_coeff_cubic", c.flight_coeff_cubic);
  f("flight_coeff_inverse", c.flight_coeff_inverse);
  f("channel_ref_gain", c.channel_ref_gain);
  f("ap_ref_gain", c.ap_ref_gain);
  f("ap_ref_distance", c.ap_ref_distance);
  f("laser_collector_area", c.laser_collector_area);
  f("laser_optical_eff", c.laser_optical_eff);
  f("laser_attenuation", c.laser_attenuation);
  f("laser_beam_size", c.laser_beam_size);
  f("laser_divergence", c.laser_divergence);
  f("min_speed_clamp", c.min_speed_clamp);
  f("tau_epsilon", c.tau_epsilon);
  f("device_initial_battery", c.device_initial_battery);
  f("device_battery_cap", c.device_battery_cap);
  f("uav_initial_battery", c.uav_initial_battery);
  f("uav_battery_cap", c.uav_battery_cap);
  f("block_size", c.block_size);
  f("turn_straight_prob", c.turn_straight_prob);
  f("uav_speed_low", c.uav_speed_low);
  f("uav_speed_high", c.uav_speed_high);
  f("discount", c.discount);
  f("distill_weight", c.distill_weight);
  f("inverse_temperature", c.inverse_temperature);
  f("penalty", c.penalty);
  f("batch_size", c.batch_size);
  f("learning_rate", c.learning_rate);
  f("hidden_layers", c.hidden_layers);
  f("hidden_units", c.hidden_units);
  f("episodes", c.episodes);
  f("slots_per_episode", c.slots_per_episode);
  f("replay_capacity", c.replay_capacity);
  f("target_sync_interval", c.target_sync_interval);
  f("explore_start", c.explore_start);
  f("explore_end", c.explore_end);
  f("explore_anneal_fraction", c.explore_anneal_fraction);
  f("reward_norm_warmup", c.reward_norm_warmup);
  f("reward_scale", c.reward_scale);
  f("reward_mode", c.reward_mode);
  f("joint_obs", c.joint_obs);
  f("psi_beta", c.psi_beta);
  f("psi_position", c.psi_position);
  f("psi_tau", c.psi_tau);
  f("max_inner_iters", c.max_inner_iters);
  f("rng_seed", c.rng_seed);
}

/// Checks every invariant; throws ConfigError naming the first violation.
/// Returns the config unchanged on success.
SimConfig validate_config(const SimConfig& cfg);

/// Builds a config from a JSON object. Absent keys take their defaults,
/// unknown keys are rejected. The result is validated.
SimConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SimConfig& cfg);

SimConfig load_config(const std::string& path);

const char* to_string(RewardMode mode);

}  // namespace wpmec
