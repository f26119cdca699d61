#include "wpmec/tau_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "wpmec/physics.hpp"

namespace wpmec {

SlotProblem build_slot_problem(const WorldState& world, std::span<const int> alpha,
                               std::span<const int> beta, std::span<const Vec2> uav_positions,
                               const SimConfig& cfg, bool local_compute) {
  if (alpha.size() != world.devices.size() || beta.size() != world.uavs.size() ||
      uav_positions.size() != world.uavs.size()) {
    throw std::invalid_argument("build_slot_problem: schedule sizes do not match the world");
  }
  SlotProblem p;
  p.slot_duration = cfg.slot_duration;
  p.tau_epsilon = cfg.tau_epsilon;

  std::vector<Uav> candidate = world.uavs;
  for (std::size_t u = 0; u < candidate.size(); ++u) {
    const double speed = distance(uav_positions[u], world.uavs[u].pos) / cfg.slot_duration;
    candidate[u].beta = beta[u];
    candidate[u].pos = uav_positions[u];
    p.uav_power += uav_energy(beta[u], speed, candidate[u].profile, cfg).total() / cfg.slot_duration;
  }

  p.devices.reserve(world.devices.size());
  for (std::size_t m = 0; m < world.devices.size(); ++m) {
    const auto& dev = world.devices[m];
    DeviceTerms t;
    t.alpha = alpha[m];
    if (local_compute) {
      t.local_rate = dev.profile.cpu_hz / cfg.cycles_per_bit;
      t.local_power = dev.profile.chip_coeff * std::pow(dev.profile.cpu_hz, 3);
    }
    if (const auto u = assign_best_uav(dev.pos, candidate, cfg)) {
      const double gain = channel_gain(candidate[*u].pos, dev.pos, cfg);
      t.offload_rate = offload_rate(gain, dev.profile.tx_power, cfg);
      t.tx_power = dev.profile.tx_power;
    }
    t.harvest_power = cfg.device_harvest_eff * virtual_ap_gain(dev.pos, world.aps, cfg) * cfg.ap_tx_power;
    t.residual = dev.residual;
    p.devices.push_back(t);
  }
  return p;
}

FractionalCoefficients coefficients(const SlotProblem& p) {
  FractionalCoefficients k;
  for (const auto& t : p.devices) {
    const double sign = 2.0 * t.alpha - 1.0;
    k.a += sign * t.offload_rate;
    k.b += t.local_rate + (1 - t.alpha) * t.offload_rate;
    k.c += sign * t.tx_power;
    k.d += t.local_power + (1 - t.alpha) * t.tx_power;
  }
  k.d += p.uav_power;
  return k;
}

double objective(double tau, const FractionalCoefficients& k) {
  const double den = k.c * tau + k.d;
  if (!(den > 0.0)) throw std::domain_error("objective: non-positive denominator");
  return (k.a * tau + k.b) / den;
}

namespace {

// c0 + c1 * tau <= 0, in joules.
struct Linear {
  double c0;
  double c1;
};

template <class F>
void for_each_constraint(const SlotProblem& p, F&& f) {
  const double T = p.slot_duration;
  for (const auto& t : p.devices) {
    // Energy spent during the first period must already be in the battery.
    f(Linear{-t.residual, (t.alpha * t.tx_power + t.local_power) * T});
    // Slot energy balance: spending <= residual + harvest.
    f(Linear{t.local_power * T + (1 - t.alpha) * T * t.tx_power - t.residual - t.harvest_power * T * t.alpha,
             (2.0 * t.alpha - 1.0) * T * (t.tx_power + t.harvest_power)});
  }
}

}  // namespace

TauInterval feasible_interval(const SlotProblem& p) {
  TauInterval iv{p.tau_epsilon, 1.0 - p.tau_epsilon, true};
  for_each_constraint(p, [&](const Linear& l) {
    if (l.c1 > 0.0) {
      iv.hi = std::min(iv.hi, -l.c0 / l.c1);
    } else if (l.c1 < 0.0) {
      iv.lo = std::max(iv.lo, -l.c0 / l.c1);
    } else if (l.c0 > 0.0) {
      iv.feasible = false;
    }
  });
  if (iv.lo > iv.hi) {
    iv.feasible = false;
    return iv;
  }
  // A bound from -c0/c1 can round an ulp past the constraint, and the
  // environment recomputes the budget in its own arithmetic. Step edges set
  // by a constraint inward by a hair so the chosen end is safely feasible.
  constexpr double kMargin = 1e-12;
  const bool lo_bound = iv.lo > p.tau_epsilon;
  const bool hi_bound = iv.hi < 1.0 - p.tau_epsilon;
  const double room = iv.hi - iv.lo;
  if (room > 4 * kMargin) {
    if (lo_bound) iv.lo += kMargin;
    if (hi_bound) iv.hi -= kMargin;
  } else if (lo_bound || hi_bound) {
    iv.lo = iv.hi = 0.5 * (iv.lo + iv.hi);
  }
  return iv;
}

double constraint_violation(const SlotProblem& p, double tau) {
  double v = 0.0;
  for_each_constraint(p, [&](const Linear& l) { v += std::max(0.0, l.c0 + l.c1 * tau); });
  return v;
}

int capacity_polarity(const FractionalCoefficients& k) { return (k.a > 0.0) - (k.a < 0.0); }

TauSolution solve_tau(const FractionalCoefficients& k, const TauInterval& interval) {
  if (!interval.feasible) throw std::domain_error("solve_tau: infeasible interval");
  const double det = k.determinant();
  const double scale = std::abs(k.a * k.d) + std::abs(k.b * k.c);
  TauSolution s;
  s.feasible = true;
  if (std::abs(det) <= 1e-12 * scale || det == 0.0) {
    s.tau = 0.5 * (interval.lo + interval.hi);
  } else {
    s.tau = det > 0.0 ? interval.hi : interval.lo;
  }
  return s;
}

TauSolution solve_slot(const SlotProblem& p) {
  const auto interval = feasible_interval(p);
  const auto k = coefficients(p);
  if (interval.feasible) return solve_tau(k, interval);

  // Total violation is convex and piecewise linear in tau, so its minimum
  // sits on a breakpoint or an end of the admissible range.
  const double lo = p.tau_epsilon;
  const double hi = 1.0 - p.tau_epsilon;
  std::vector<double> candidates{lo, hi};
  for_each_constraint(p, [&](const Linear& l) {
    if (l.c1 != 0.0) candidates.push_back(std::clamp(-l.c0 / l.c1, lo, hi));
  });
  std::sort(candidates.begin(), candidates.end());

  TauSolution best;
  best.feasible = false;
  best.violation = std::numeric_limits<double>::infinity();
  double best_obj = -std::numeric_limits<double>::infinity();
  for (const double tau : candidates) {
    const double v = constraint_violation(p, tau);
    const double den = k.c * tau + k.d;
    const double obj = den > 0.0 ? (k.a * tau + k.b) / den : -std::numeric_limits<double>::infinity();
    const double tol = 1e-12 * (std::isfinite(best.violation) ? std::max(1.0, best.violation) : 1.0);
    if (v < best.violation - tol || (std::abs(v - best.violation) <= tol && obj > best_obj)) {
      best.tau = tau;
      best.violation = v;
      best_obj = obj;
    }
  }
  return best;
}

}  // namespace wpmec
