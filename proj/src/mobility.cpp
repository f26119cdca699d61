#include "wpmec/mobility.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace wpmec {

namespace {

constexpr double kSnapTol = 1e-9;

double along(const Vec2& p, Heading h) { return is_vertical(h) ? p.y : p.x; }

void set_along(Vec2& p, Heading h, double v) { (is_vertical(h) ? p.y : p.x) = v; }

double sign_of(Heading h) { return (h == Heading::kNorth || h == Heading::kEast) ? 1.0 : -1.0; }

}  // namespace

StreetGrid::StreetGrid(double area_side, double block)
    : block_(block), lines_(static_cast<int>(std::floor(area_side / block + kSnapTol)) + 1) {
  if (!(block > 0.0) || lines_ < 2) {
    throw std::invalid_argument("street grid needs at least two intersections per side");
  }
}

int StreetGrid::line_index(double v) const {
  const double k = v / block_;
  const double r = std::round(k);
  if (std::abs(k - r) > kSnapTol * std::max(1.0, std::abs(k))) return -1;
  const int i = static_cast<int>(r);
  return (i >= 0 && i < lines_) ? i : -1;
}

bool StreetGrid::on_street(const Vec2& p) const {
  const double lo = -kSnapTol * block_;
  const double hi = extent() + kSnapTol * block_;
  const bool in_x = p.x >= lo && p.x <= hi;
  const bool in_y = p.y >= lo && p.y <= hi;
  return (in_y && line_index(p.x) >= 0) || (in_x && line_index(p.y) >= 0);
}

bool StreetGrid::at_node(const Vec2& p) const {
  return line_index(p.x) >= 0 && line_index(p.y) >= 0;
}

bool StreetGrid::can_leave(const Vec2& p, Heading h) const {
  const int ix = line_index(p.x);
  const int iy = line_index(p.y);
  if (ix < 0 || iy < 0) return false;
  switch (h) {
    case Heading::kNorth: return iy + 1 < lines_;
    case Heading::kSouth: return iy > 0;
    case Heading::kEast: return ix + 1 < lines_;
    case Heading::kWest: return ix > 0;
  }
  return false;
}

int StreetGrid::segment_of(const Vec2& p, Heading h) const {
  // Horizontal segments first: row iy, column ix in [0, lines-2].
  const int horizontal = lines_ * (lines_ - 1);
  if (is_vertical(h)) {
    const int ix = line_index(p.x);
    double k = p.y / block_;
    int lower = static_cast<int>(std::floor(k + kSnapTol));
    if (h == Heading::kSouth && std::abs(k - std::round(k)) <= kSnapTol) lower -= 1;
    lower = std::clamp(lower, 0, lines_ - 2);
    return horizontal + ix * (lines_ - 1) + lower;
  }
  const int iy = line_index(p.y);
  double k = p.x / block_;
  int lower = static_cast<int>(std::floor(k + kSnapTol));
  if (h == Heading::kWest && std::abs(k - std::round(k)) <= kSnapTol) lower -= 1;
  lower = std::clamp(lower, 0, lines_ - 2);
  return iy * (lines_ - 1) + lower;
}

Heading random_exit(const Vec2& p, const StreetGrid& grid, std::mt19937_64& rng) {
  std::array<Heading, 4> exits{};
  int n = 0;
  for (Heading h : {Heading::kNorth, Heading::kEast, Heading::kSouth, Heading::kWest}) {
    if (grid.can_leave(p, h)) exits[n++] = h;
  }
  if (n == 0) throw std::invalid_argument("random_exit: point is not an intersection");
  std::uniform_int_distribution<int> pick(0, n - 1);
  return exits[pick(rng)];
}

namespace {

Heading choose_turn(const Vec2& node, Heading heading, const StreetGrid& grid,
                    std::mt19937_64& rng, double straight_prob) {
  const double side = 0.5 * (1.0 - straight_prob);
  const std::array<std::pair<Heading, double>, 3> options{{
      {heading, straight_prob},
      {turn_left(heading), side},
      {turn_right(heading), side},
  }};
  std::array<std::pair<Heading, double>, 3> valid{};
  int n = 0;
  double total = 0.0;
  for (const auto& o : options) {
    if (grid.can_leave(node, o.first)) {
      valid[n++] = o;
      total += o.second;
    }
  }
  if (n == 0) return reverse(heading);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double draw = u(rng);
  if (total <= 0.0) return valid[std::min(n - 1, static_cast<int>(draw * n))].first;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += valid[i].second / total;
    if (draw < acc) return valid[i].first;
  }
  return valid[n - 1].first;
}

}  // namespace

Walker step_device(const Walker& w, double speed, double dt, const StreetGrid& grid,
                   std::mt19937_64& rng, double straight_prob) {
  if (!grid.on_street(w.pos)) throw std::invalid_argument("step_device: position is off the street grid");
  if (speed < 0.0 || dt < 0.0) throw std::invalid_argument("step_device: negative speed or duration");

  Walker out = w;
  if (!grid.at_node(out.pos)) {
    // Mid-block: the heading must run along the street we are on.
    const double b = grid.block();
    const double kx = out.pos.x / b;
    const bool x_on_line = std::abs(kx - std::round(kx)) <= kSnapTol * std::max(1.0, std::abs(kx));
    if (x_on_line != is_vertical(out.heading)) {
      throw std::invalid_argument("step_device: heading crosses the street");
    }
  }

  const double b = grid.block();
  double remaining = speed * dt;
  while (remaining > 0.0) {
    if (grid.at_node(out.pos)) {
      out.pos = {std::round(out.pos.x / b) * b, std::round(out.pos.y / b) * b};
      out.heading = choose_turn(out.pos, out.heading, grid, rng, straight_prob);
    }
    const double a = along(out.pos, out.heading);
    const double s = sign_of(out.heading);
    const double k = a / b;
    const double target =
        (s > 0.0 ? std::floor(k + kSnapTol) + 1.0 : std::ceil(k - kSnapTol) - 1.0) * b;
    const double gap = std::abs(target - a);
    if (remaining < gap) {
      set_along(out.pos, out.heading, a + s * remaining);
      remaining = 0.0;
    } else {
      set_along(out.pos, out.heading, target);
      remaining -= gap;
    }
  }
  return out;
}

}  // namespace wpmec
