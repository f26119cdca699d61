#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "instances.hpp"
#include "tau_oracle.hpp"
#include "wpmec/environment.hpp"
#include "wpmec/tau_solver.hpp"

using namespace wpmec;
using doctest::Approx;

namespace {

SlotProblem problem_of(const testing::TauInstance& inst) {
  return build_slot_problem(inst.world, inst.alpha, inst.beta, inst.positions, inst.cfg);
}

DeviceTerms terms(int alpha, double rate, double residual, double harvest_power = 0.0) {
  DeviceTerms t;
  t.alpha = alpha;
  t.offload_rate = rate;
  t.local_rate = 1e7;
  t.local_power = 0.0125;
  t.tx_power = rate > 0.0 ? 0.1 : 0.0;
  t.harvest_power = harvest_power;
  t.residual = residual;
  return t;
}

}  // namespace

TEST_CASE("coefficient signs follow the device types") {
  SimConfig cfg;
  cfg.num_devices = 6;
  cfg.num_uavs = 2;
  const auto w = init_world(cfg, 3);
  const std::vector<int> beta{1, 1};
  const std::vector<Vec2> pos{w.uavs[0].pos, w.uavs[1].pos};

  const std::vector<int> ones(6, 1);
  const auto k1 = coefficients(build_slot_problem(w, ones, beta, pos, cfg));
  CHECK(k1.a > 0.0);
  CHECK(k1.c == Approx(6 * 0.1));
  const std::vector<int> zeros(6, 0);
  const auto k0 = coefficients(build_slot_problem(w, zeros, beta, pos, cfg));
  CHECK(k0.a < 0.0);
  CHECK(k0.c == Approx(-6 * 0.1));
  CHECK(k0.b > 0.0);
  CHECK(k0.d > 0.0);
}

TEST_CASE("two-device mixed instance matches hand sums") {
  SlotProblem p;
  p.devices = {terms(1, 3e6, 1.0), terms(0, 5e6, 1.0)};
  p.uav_power = 6.5625;
  const auto k = coefficients(p);
  CHECK(k.a == Approx(3e6 - 5e6));
  CHECK(k.b == Approx(1e7 + 1e7 + 5e6));
  CHECK(k.c == Approx(0.1 - 0.1));
  CHECK(k.d == Approx(0.0125 + 0.0125 + 0.1 + 6.5625));
  CHECK(k.determinant() == Approx(k.a * k.d - k.b * k.c));
}

TEST_CASE("objective") {
  FractionalCoefficients flat{0.0, 4e6, 0.0, 2.0};
  for (double t : {0.0, 0.2, 0.9}) CHECK(objective(t, flat) == Approx(2e6));
  const FractionalCoefficients k{-3e6, 2e7, 0.4, 5.0};
  CHECK(objective(0.0, k) == Approx(2e7 / 5.0));
  CHECK(objective(0.37, k) == Approx((-3e6 * 0.37 + 2e7) / (0.4 * 0.37 + 5.0)).epsilon(1e-14));
  CHECK_THROWS_AS(objective(0.5, FractionalCoefficients{1, 1, -4, 2}), std::domain_error);
}

TEST_CASE("slack constraints give the whole admissible range") {
  SlotProblem p;
  p.devices = {terms(1, 3e6, 1e6), terms(0, 2e6, 1e6)};
  const auto iv = feasible_interval(p);
  CHECK(iv.feasible);
  CHECK(iv.lo == Approx(1e-4));
  CHECK(iv.hi == Approx(1 - 1e-4));
}

TEST_CASE("first-period budget bounds a half-charged type-1 device") {
  const double theta = 0.1125;
  SlotProblem p;
  // Harvest in the second period is plentiful, so only the first-period
  // budget binds.
  p.devices = {terms(1, 3e6, theta / 2, 1.0)};
  const auto iv = feasible_interval(p);
  CHECK(iv.feasible);
  CHECK(iv.hi == Approx(0.5).epsilon(1e-12));
  CHECK(constraint_violation(p, 0.5) == Approx(0.0));
  CHECK(constraint_violation(p, 0.6) > 0.0);
}

TEST_CASE("interval equals the raw constraint set on a grid") {
  std::mt19937_64 rng(77);
  int compared = 0;
  for (int i = 0; i < 60; ++i) {
    const auto inst = testing::random_instance(rng);
    const testing::TauOracle oracle(inst.world, inst.alpha, inst.beta, inst.positions, inst.cfg);
    const auto iv = feasible_interval(problem_of(inst));
    for (double tau = 1e-4; tau <= 1 - 1e-4; tau += 1e-3) {
      const bool inside = iv.feasible && tau >= iv.lo && tau <= iv.hi;
      const bool near_edge = iv.feasible && (std::abs(tau - iv.lo) < 1e-9 || std::abs(tau - iv.hi) < 1e-9);
      if (near_edge) continue;
      CHECK(oracle.evaluate(tau).feasible == inside);
      ++compared;
    }
  }
  CHECK(compared > 50000);
}

TEST_CASE("closed form picks the end the objective increases toward") {
  const TauInterval iv{0.2, 0.7, true};
  CHECK(solve_tau(FractionalCoefficients{5e6, 1e7, 0.2, 3.0}, iv).tau == 0.7);
  CHECK(solve_tau(FractionalCoefficients{-5e6, 1e7, -0.2, 3.0}, iv).tau == 0.2);
  const auto mid = solve_tau(FractionalCoefficients{0.0, 1e7, 0.0, 3.0}, iv);
  CHECK(mid.tau == Approx(0.45));
  CHECK(mid.feasible);
  CHECK_THROWS_AS(solve_tau(FractionalCoefficients{1, 1, 0, 1}, TauInterval{0.6, 0.4, false}), std::domain_error);
}

TEST_CASE("all type-1 goes high, all type-2 goes low") {
  SimConfig cfg;
  cfg.num_devices = 8;
  cfg.num_uavs = 2;
  auto w = init_world(cfg, 12);
  const std::vector<int> beta{1, 1};
  const std::vector<Vec2> pos{w.uavs[0].pos, w.uavs[1].pos};
  const std::vector<int> ones(8, 1);
  const auto p1 = build_slot_problem(w, ones, beta, pos, cfg);
  CHECK(solve_slot(p1).tau == Approx(feasible_interval(p1).hi));
  const std::vector<int> zeros(8, 0);
  const auto p0 = build_slot_problem(w, zeros, beta, pos, cfg);
  CHECK(solve_slot(p0).tau == Approx(feasible_interval(p0).lo));
}

TEST_CASE("capacity polarity can disagree with the determinant") {
  // Two weak type-1 links barely outweigh one strong type-2 link: A > 0 but
  // the transmit-power imbalance makes the objective decrease in tau.
  SlotProblem p;
  p.devices = {terms(1, 2.6e6, 1.0, 1.0), terms(1, 2.6e6, 1.0, 1.0), terms(0, 5e6, 1.0, 1.0)};
  p.uav_power = 6.5625;
  const auto k = coefficients(p);
  CHECK(k.a > 0.0);
  CHECK(capacity_polarity(k) == 1);
  CHECK(k.determinant() < 0.0);
  const auto iv = feasible_interval(p);
  REQUIRE(iv.feasible);
  const auto s = solve_tau(k, iv);
  CHECK(s.tau == iv.lo);
  CHECK(objective(iv.lo, k) > objective(iv.hi, k));
}

TEST_CASE("infeasible slots fall back to the least violation") {
  SlotProblem p;
  // An empty type-2 device cannot even run its local computation.
  p.devices = {terms(0, 2e6, 0.0, 0.01), terms(1, 3e6, 0.5, 0.0)};
  p.uav_power = 5.0;
  REQUIRE_FALSE(feasible_interval(p).feasible);
  const auto s = solve_slot(p);
  CHECK_FALSE(s.feasible);
  CHECK(s.violation == Approx(constraint_violation(p, s.tau)));
  double best = 1e300;
  for (double tau = 1e-4; tau <= 1 - 1e-4; tau += 1e-5) best = std::min(best, constraint_violation(p, tau));
  CHECK(s.violation <= best + 1e-12);
  CHECK(s.tau >= 1e-4);
  CHECK(s.tau <= 1 - 1e-4);
}

TEST_CASE("objective equals the efficiency of the assembled slot") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> tau(1e-4, 1 - 1e-4);
  for (int i = 0; i < 100; ++i) {
    const auto inst = testing::random_instance(rng);
    const auto k = coefficients(problem_of(inst));
    const testing::TauOracle oracle(inst.world, inst.alpha, inst.beta, inst.positions, inst.cfg);
    const double t = tau(rng);
    CHECK(objective(t, k) == Approx(oracle.evaluate(t).objective).epsilon(1e-10));
  }
}

TEST_CASE("objective matches the environment when nothing is dropped") {
  SimConfig cfg;
  cfg.num_devices = 10;
  cfg.num_uavs = 2;
  Environment env(cfg, 4);
  SlotDecision d;
  d.alpha = schedule_devices(env.world(), cfg).alpha;
  d.beta = {1, 0};
  d.positions = {env.world().uavs[0].pos + Vec2{5, 0}, env.world().uavs[1].pos + Vec2{0, -10}};
  const auto p = build_slot_problem(env.world(), d.alpha, d.beta, d.positions, cfg);
  const auto s = solve_slot(p);
  REQUIRE(s.feasible);
  d.tau = s.tau;
  const auto m = env.apply(d);
  REQUIRE(m.offload_drops == 0);
  CHECK(m.efficiency == Approx(objective(s.tau, coefficients(p))).epsilon(1e-12));
}

TEST_CASE("closed form agrees with the grid oracle") {
  std::mt19937_64 rng(2718);
  int checked = 0;
  for (int i = 0; i < 150; ++i) {
    const auto inst = testing::random_instance(rng);
    const auto p = problem_of(inst);
    const auto iv = feasible_interval(p);
    if (!iv.feasible) continue;
    const auto k = coefficients(p);
    const auto s = solve_tau(k, iv);
    const testing::TauOracle oracle(inst.world, inst.alpha, inst.beta, inst.positions, inst.cfg);
    const auto ref = oracle.scan(1e-4);
    if (!ref.feasible) {
      CHECK(iv.hi - iv.lo < 1e-4);
      continue;
    }
    const double at_closed = oracle.evaluate(s.tau).objective;
    CHECK((ref.objective - at_closed) / std::abs(at_closed) <= 1e-9);
    const double scale = std::abs(k.a * k.d) + std::abs(k.b * k.c);
    if (std::abs(k.determinant()) > 1e-12 * scale) CHECK(std::abs(s.tau - ref.tau) <= 1e-4 + 1e-12);
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("objective is monotone on the interval") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 300; ++i) {
    const auto inst = testing::random_instance(rng);
    const auto p = problem_of(inst);
    const auto iv = feasible_interval(p);
    if (!iv.feasible || iv.hi - iv.lo < 1e-6) continue;
    const auto k = coefficients(p);
    const double f0 = objective(iv.lo, k);
    const double f1 = objective(0.5 * (iv.lo + iv.hi), k);
    const double f2 = objective(iv.hi, k);
    const double tol = 1e-12 * std::abs(f1);
    if (k.determinant() > 0) {
      CHECK(f0 <= f1 + tol);
      CHECK(f1 <= f2 + tol);
    } else if (k.determinant() < 0) {
      CHECK(f0 >= f1 - tol);
      CHECK(f1 >= f2 - tol);
    }
    CHECK(k.b > 0.0);
    CHECK(k.d > 0.0);
  }
}

TEST_CASE("offload-only problems drop the local terms") {
  SimConfig cfg;
  cfg.num_devices = 4;
  cfg.num_uavs = 1;
  const auto w = init_world(cfg, 6);
  const std::vector<int> alpha(4, 1);
  const std::vector<int> beta{1};
  const std::vector<Vec2> pos{w.uavs[0].pos};
  const auto p = build_slot_problem(w, alpha, beta, pos, cfg, false);
  for (const auto& t : p.devices) {
    CHECK(t.local_rate == 0.0);
    CHECK(t.local_power == 0.0);
    CHECK(t.offload_rate > 0.0);
  }
  CHECK_THROWS(build_slot_problem(w, std::vector<int>(3, 1), beta, pos, cfg));
}
