#pragma once

#include <span>
#include <vector>

#include "wpmec/config.hpp"
#include "wpmec/world.hpp"

namespace wpmec {

/// Everything the time-split problem needs about one device, with the
/// schedule and UAV assignment already resolved. Rates and powers are per
/// second; an unserved device has zero offload rate and zero tx power.
struct DeviceTerms {
  int alpha = 0;
  double offload_rate = 0.0;   // bits/s to the assigned UAV
  double local_rate = 0.0;     // f / C1, bits/s
  double local_power = 0.0;    // k f^3, W
  double tx_power = 0.0;       // W while offloading
  double harvest_power = 0.0;  // eps * h_ap * P0, W while harvesting
  double residual = 0.0;       // J available at slot start
};

struct SlotProblem {
  std::vector<DeviceTerms> devices;
  double uav_power = 0.0;  // sum over UAVs of propulsion + serving power, W
  double slot_duration = 1.0;
  double tau_epsilon = 1e-4;
};

/// Assembles the problem for a candidate UAV configuration. `uav_positions`
/// are this slot's positions; speeds follow from the world's previous
/// positions. With `local_compute` off the local terms vanish (offload-only).
SlotProblem build_slot_problem(const WorldState& world, std::span<const int> alpha,
                               std::span<const int> beta, std::span<const Vec2> uav_positions,
                               const SimConfig& cfg, bool local_compute = true);

/// Efficiency as (A tau + B) / (C tau + D).
struct FractionalCoefficients {
  double a = 0.0;  // bits/s
  double b = 0.0;  // bits/s
  double c = 0.0;  // W
  double d = 0.0;  // W

  /// A D - B C; its sign is the sign of the objective's derivative.
  double determinant() const { return a * d - b * c; }
};

FractionalCoefficients coefficients(const SlotProblem& p);

/// Throws std::domain_error when C tau + D <= 0.
double objective(double tau, const FractionalCoefficients& k);

struct TauInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool feasible = false;
};

/// Intersection over devices of the first-period budget and the slot energy
/// balance, clipped to [eps, 1 - eps]. Each constraint is linear in tau and
/// its direction follows the sign of its tau coefficient.
TauInterval feasible_interval(const SlotProblem& p);

struct TauSolution {
  double tau = 0.5;
  bool feasible = false;
  double violation = 0.0;  // J, summed over devices and constraints
};

/// Closed form: the objective is monotone in tau, so the optimum is the
/// upper end when A D - B C > 0 and the lower end when it is < 0. A
/// vanishing determinant makes the objective flat and the midpoint is
/// returned. Throws std::domain_error on an infeasible interval.
TauSolution solve_tau(const FractionalCoefficients& k, const TauInterval& interval);

/// solve_tau with the infeasible fallback: the split with the least total
/// constraint violation, ties broken by objective.
TauSolution solve_slot(const SlotProblem& p);

/// Total violation in joules of both energy constraints at `tau`.
double constraint_violation(const SlotProblem& p, double tau);

/// sign(A), the polarity predicted by the capacity comparison between
/// type-1 and type-2 devices.
int capacity_polarity(const FractionalCoefficients& k);

}  // namespace wpmec
