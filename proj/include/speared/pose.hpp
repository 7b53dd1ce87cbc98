#pragma once

#include <cmath>

namespace speared {

/// Cartesian position in mm. Used both as a point and as an offset.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

  Pose& operator+=(const Pose& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Pose& operator-=(const Pose& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }

  friend Pose operator+(Pose a, const Pose& b) { return a += b; }
  friend Pose operator-(Pose a, const Pose& b) { return a -= b; }
  friend Pose operator*(const Pose& a, double s) { return {a.x * s, a.y * s, a.z * s}; }
  friend Pose operator*(double s, const Pose& a) { return a * s; }
  friend bool operator==(const Pose&, const Pose&) = default;
};

inline double norm(const Pose& p) { return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z); }
inline double distance(const Pose& a, const Pose& b) { return norm(a - b); }

}  // namespace speared
