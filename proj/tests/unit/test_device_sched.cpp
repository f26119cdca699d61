#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "instances.hpp"
#include "wpmec/device_sched.hpp"
#include "wpmec/physics.hpp"

using namespace wpmec;
using doctest::Approx;

TEST_CASE("threshold") {
  SimConfig cfg;
  auto prof = device_profile(cfg);
  CHECK(threshold(prof, cfg) == Approx(0.1125).epsilon(1e-12));
  cfg.slot_duration = 2.0;
  CHECK(threshold(prof, cfg) == Approx(0.225).epsilon(1e-12));
  cfg.slot_duration = 1.0;
  prof.tx_power = 0.0;
  CHECK(threshold(prof, cfg) == Approx(0.0125).epsilon(1e-12));
}

TEST_CASE("schedule uses a strict inequality") {
  const double theta = 0.1125;
  const std::vector<double> residuals{0.0, 2 * theta, theta, std::nextafter(theta, 1.0)};
  const std::vector<double> thresholds(4, theta);
  const auto s = schedule_devices(residuals, thresholds);
  CHECK(s.alpha == std::vector<int>{0, 1, 0, 1});
  CHECK(s.thresholds == thresholds);
  const std::vector<double> short_list(2, theta);
  CHECK_THROWS(schedule_devices(residuals, short_list));
}

TEST_CASE("schedule from the world uses each device's own profile") {
  SimConfig cfg;
  cfg.num_devices = 3;
  auto w = init_world(cfg, 1);
  w.devices[0].residual = 0.2;
  w.devices[1].residual = 0.2;
  w.devices[1].profile.tx_power = 0.5;  // threshold 0.5125
  w.devices[2].residual = 0.05;
  const auto s = schedule_devices(w, cfg);
  CHECK(s.alpha == std::vector<int>{1, 0, 0});
  CHECK(s.thresholds[1] == Approx(0.5125));
}

TEST_CASE("scheduled quantities are the physics formulas") {
  SimConfig cfg;
  cfg.num_devices = 12;
  cfg.num_uavs = 3;
  auto w = init_world(cfg, 8);
  w.uavs[0].beta = 1;
  w.uavs[2].beta = 1;
  std::mt19937_64 rng(2);
  for (auto& d : w.devices) d.residual = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
  const auto alpha = schedule_devices(w, cfg).alpha;
  for (double tau : {0.1, 0.5, 0.9}) {
    const auto q = scheduled_quantities(alpha, tau, w, cfg);
    REQUIRE(q.size() == w.devices.size());
    for (std::size_t m = 0; m < q.size(); ++m) {
      const auto& d = w.devices[m];
      const auto u = assign_best_uav(d.pos, w.uavs, cfg);
      std::optional<double> gain;
      if (u) gain = channel_gain(w.uavs[*u].pos, d.pos, cfg);
      CHECK(q[m].uav == (u ? *u : -1));
      CHECK(q[m].bits == Approx(device_bits(alpha[m], tau, gain, d.profile, cfg).total()));
      CHECK(q[m].energy == Approx(device_energy(alpha[m], tau, u.has_value(), d.profile, cfg).total()));
      CHECK(q[m].harvest == Approx(device_harvest(alpha[m], virtual_ap_gain(d.pos, w.aps, cfg), tau, cfg)));
    }
  }
}

TEST_CASE("type-1 devices can always pay for the first period") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> tau(1e-4, 1 - 1e-4);
  for (int i = 0; i < 300; ++i) {
    const auto inst = testing::random_instance(rng);
    const auto& cfg = inst.cfg;
    for (std::size_t m = 0; m < inst.alpha.size(); ++m) {
      if (inst.alpha[m] != 1) continue;
      const auto& d = inst.world.devices[m];
      for (int k = 0; k < 5; ++k) {
        const double t = tau(rng);
        const double spend = (d.profile.tx_power + d.profile.chip_coeff * std::pow(d.profile.cpu_hz, 3)) * t *
                             cfg.slot_duration;
        CHECK(spend <= d.residual);
      }
    }
  }
}
