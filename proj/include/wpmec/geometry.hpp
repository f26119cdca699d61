#pragma once

#include <cmath>
#include <cstdint>

namespace wpmec {

/// Horizontal-plane coordinates in meters. Altitude is implicit: ground
/// entities sit at z = 0 and UAVs at the configured altitude.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Vec2&, const Vec2&) = default;
  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline double squared_norm(const Vec2& v) { return v.x * v.x + v.y * v.y; }
inline double norm(const Vec2& v) { return std::sqrt(squared_norm(v)); }
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }

enum class Heading : std::uint8_t { kNorth = 0, kEast = 1, kSouth = 2, kWest = 3 };

inline Vec2 unit(Heading h) {
  switch (h) {
    case Heading::kNorth: return {0.0, 1.0};
    case Heading::kEast: return {1.0, 0.0};
    case Heading::kSouth: return {0.0, -1.0};
    case Heading::kWest: return {-1.0, 0.0};
  }
  return {};
}

inline Heading turn_left(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 3) % 4); }
inline Heading turn_right(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 1) % 4); }
inline Heading reverse(Heading h) { return static_cast<Heading>((static_cast<int>(h) + 2) % 4); }
inline bool is_vertical(Heading h) { return h == Heading::kNorth || h == Heading::kSouth; }

}  // namespace wpmec
