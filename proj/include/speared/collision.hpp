#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include "speared/pose.hpp"

namespace speared {

/// Closed axis-aligned box.
struct Aabb {
  Pose min;
  Pose max;

  static Aabb from_center_size(const Pose& center, const Pose& size) {
    const Pose half = size * 0.5;
    return {center - half, center + half};
  }

  bool contains(const Pose& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y && p.z >= min.z && p.z <= max.z;
  }
};

struct Segment {
  Pose from;
  Pose to;

  Pose at(double t) const { return from + (to - from) * t; }
};

struct Contact {
  double t = 0.0;  ///< parameter along the segment, in [0, 1]
  Pose point;
};

/// Slab test. Returns the first point of the segment inside the box; a
/// segment starting inside reports t = 0.
inline std::optional<Contact> segment_aabb_contact(const Segment& seg, const Aabb& box) {
  double t_enter = 0.0;
  double t_exit = 1.0;
  const double origin[3] = {seg.from.x, seg.from.y, seg.from.z};
  const double delta[3] = {seg.to.x - seg.from.x, seg.to.y - seg.from.y, seg.to.z - seg.from.z};
  const double lo[3] = {box.min.x, box.min.y, box.min.z};
  const double hi[3] = {box.max.x, box.max.y, box.max.z};

  for (int k = 0; k < 3; ++k) {
    if (delta[k] == 0.0) {
      if (origin[k] < lo[k] || origin[k] > hi[k]) return std::nullopt;
      continue;
    }
    double t0 = (lo[k] - origin[k]) / delta[k];
    double t1 = (hi[k] - origin[k]) / delta[k];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return std::nullopt;
  }

  Pose point = seg.at(t_enter);
  // snap the entry coordinate onto the face it crossed
  for (int k = 0; k < 3; ++k) {
    double& c = k == 0 ? point.x : (k == 1 ? point.y : point.z);
    c = std::clamp(c, lo[k], hi[k]);
  }
  return Contact{t_enter, point};
}

}  // namespace speared
