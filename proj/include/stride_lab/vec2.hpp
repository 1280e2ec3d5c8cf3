#pragma once

#include <cmath>

namespace stride_lab {

/// Horizontal-plane vector: x is the direction of travel, y points left.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }

  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator/(const Vec2& a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;

  [[nodiscard]] double norm() const { return std::hypot(x, y); }
  [[nodiscard]] constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  [[nodiscard]] bool finite() const { return std::isfinite(x) && std::isfinite(y); }

  /// Component access by axis index (0 = x, 1 = y).
  [[nodiscard]] constexpr double operator[](int axis) const { return axis == 0 ? x : y; }
  constexpr double& operator[](int axis) { return axis == 0 ? x : y; }
};

}  // namespace stride_lab
