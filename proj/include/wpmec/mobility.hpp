#pragma once

#include <random>

#include "wpmec/geometry.hpp"

namespace wpmec {

/// Axis-aligned street grid: intersections every `block` meters starting at
/// the origin, streets joining neighboring intersections.
class StreetGrid {
 public:
  StreetGrid(double area_side, double block);

  int lines() const { return lines_; }
  double block() const { return block_; }
  double extent() const { return block_ * (lines_ - 1); }
  int node_count() const { return lines_ * lines_; }
  int segment_count() const { return 2 * lines_ * (lines_ - 1); }

  Vec2 node(int ix, int iy) const { return {ix * block_, iy * block_}; }
  Vec2 node(int index) const { return node(index % lines_, index / lines_); }

  bool on_street(const Vec2& p) const;
  bool at_node(const Vec2& p) const;
  /// True when the street leaving intersection `p` in direction `h` exists.
  bool can_leave(const Vec2& p, Heading h) const;
  /// Index of the street segment a walker at `p` heading `h` is traversing.
  /// At an intersection this is the segment about to be entered.
  int segment_of(const Vec2& p, Heading h) const;

 private:
  // Nearest grid line index when `v` lies on one, else -1.
  int line_index(double v) const;

  double block_;
  int lines_;
};

struct Walker {
  Vec2 pos;
  Heading heading = Heading::kNorth;
};

/// Advances a walker `speed * dt` meters along the streets. At every
/// intersection it goes straight with `straight_prob` and turns left or
/// right with half the remainder each; exits leaving the grid are dropped
/// and a dead end forces a U-turn. Throws std::invalid_argument when the
/// walker is not on a street or heads across it.
Walker step_device(const Walker& w, double speed, double dt, const StreetGrid& grid,
                   std::mt19937_64& rng, double straight_prob = 0.5);

/// Uniformly random heading among the streets leaving intersection `p`.
Heading random_exit(const Vec2& p, const StreetGrid& grid, std::mt19937_64& rng);

}  // namespace wpmec
