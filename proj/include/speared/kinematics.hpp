#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "speared/error.hpp"
#include "speared/pose.hpp"

namespace speared {

/// Position tolerance used for equality checks (mm).
inline constexpr double kPositionTolerance = 1e-6;
/// Angle tolerance used for limit checks and equality (degrees).
inline constexpr double kAngleTolerance = 1e-9;

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

struct JointLimit {
  double min = 0.0;
  double max = 0.0;

  bool contains(double deg, double tol = kAngleTolerance) const {
    return deg >= min - tol && deg <= max + tol;
  }

  friend bool operator==(const JointLimit&, const JointLimit&) = default;
  double clamp(double deg) const { return std::clamp(deg, min, max); }
};

/// Geometry of the simulated 4-axis desktop arm (base yaw, shoulder, elbow,
/// fixed-orientation suction tip). Lengths in mm, angles in degrees.
struct ArmProfile {
  double l1 = 135.0;           ///< rear arm
  double l2 = 147.0;           ///< forearm
  double base_height = 138.0;  ///< tip height at the zero pose
  std::array<JointLimit, 3> joint_limits{{{-135.0, 135.0}, {0.0, 85.0}, {-10.0, 95.0}}};
  double max_joint_speed = 90.0;  ///< deg/s

  /// Throws InvalidProfile when an invariant does not hold.
  void validate() const {
    auto fail = [](const std::string& what) { throw InvalidProfile(what); };
    if (!(std::isfinite(l1) && l1 > 0)) fail("l1 must be > 0");
    if (!(std::isfinite(l2) && l2 > 0)) fail("l2 must be > 0");
    if (!(std::isfinite(base_height) && base_height >= 0)) fail("base_height must be >= 0");
    for (std::size_t j = 0; j < joint_limits.size(); ++j) {
      const auto& lim = joint_limits[j];
      if (!(std::isfinite(lim.min) && std::isfinite(lim.max) && lim.min < lim.max))
        fail("joint " + std::to_string(j + 1) + " limit requires min < max");
    }
    if (!(std::isfinite(max_joint_speed) && max_joint_speed > 0)) fail("max_joint_speed must be > 0");
  }

  friend bool operator==(const ArmProfile&, const ArmProfile&) = default;
};

/// Approximates a DoBot Magician.
inline ArmProfile default_arm_profile() { return ArmProfile{}; }

/// Joint angles in degrees. theta2 is measured from horizontal, theta3 relative
/// to the rear arm.
struct JointState {
  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;

  double operator[](std::size_t i) const { return i == 0 ? theta1 : (i == 1 ? theta2 : theta3); }
  double& operator[](std::size_t i) { return i == 0 ? theta1 : (i == 1 ? theta2 : theta3); }

  bool is_finite() const {
    return std::isfinite(theta1) && std::isfinite(theta2) && std::isfinite(theta3);
  }

  friend bool operator==(const JointState&, const JointState&) = default;
};

inline bool within_limits(const ArmProfile& profile, const JointState& q, double tol = kAngleTolerance) {
  for (std::size_t j = 0; j < 3; ++j)
    if (!profile.joint_limits[j].contains(q[j], tol)) return false;
  return true;
}

struct Trajectory {
  std::vector<JointState> waypoints;
  double duration = 0.0;  ///< seconds at speed factor 1

  /// Joint state at parametric position s in [0, 1], piecewise linear over
  /// the waypoints. s == 1 returns the last waypoint exactly.
  JointState at(double s) const {
    const std::size_t segments = waypoints.size() - 1;
    if (s <= 0.0) return waypoints.front();
    if (s >= 1.0) return waypoints.back();
    const double pos = s * static_cast<double>(segments);
    const std::size_t i = std::min(static_cast<std::size_t>(pos), segments - 1);
    const double u = pos - static_cast<double>(i);
    const JointState& a = waypoints[i];
    const JointState& b = waypoints[i + 1];
    return {a.theta1 + (b.theta1 - a.theta1) * u, a.theta2 + (b.theta2 - a.theta2) * u,
            a.theta3 + (b.theta3 - a.theta3) * u};
  }
};

inline Pose forward_kinematics(const ArmProfile& profile, const JointState& q) {
  const double yaw = deg_to_rad(q.theta1);
  const double shoulder = deg_to_rad(q.theta2);
  const double forearm = deg_to_rad(q.theta2 + q.theta3);
  const double r = profile.l1 * std::cos(shoulder) + profile.l2 * std::cos(forearm);
  return {r * std::cos(yaw), r * std::sin(yaw),
          profile.base_height + profile.l1 * std::sin(shoulder) + profile.l2 * std::sin(forearm)};
}

struct IkSolution {
  std::optional<JointState> joints;
  UnreachableReason reason = UnreachableReason::out_of_envelope;  ///< meaningful when !joints
};

/// Closed-form IK. The tip may sit on either side of the base axis (the arm
/// can reach back over itself), so both the direct yaw and the yaw rotated by
/// 180 degrees with a negated planar reach are candidates, in that order. For
/// each, the elbow branch with theta3 >= 0 is tried first, then the mirrored
/// branch.
inline IkSolution solve_inverse_kinematics(const ArmProfile& profile, const Pose& target) {
  if (!target.is_finite()) throw std::invalid_argument("inverse_kinematics: target must be finite");

  const double r = std::hypot(target.x, target.y);
  const double h = target.z - profile.base_height;
  const double l1 = profile.l1;
  const double l2 = profile.l2;
  double c = (r * r + h * h - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
  // a few ulps of slack so fully stretched / folded poses still solve
  constexpr double kCosSlack = 1e-12;
  if (c > 1.0 + kCosSlack || c < -1.0 - kCosSlack) return {std::nullopt, UnreachableReason::out_of_envelope};
  c = std::clamp(c, -1.0, 1.0);
  const double elbow = std::acos(c);

  const double yaw = rad_to_deg(std::atan2(target.y, target.x));
  const double flipped = yaw > 0.0 ? yaw - 180.0 : yaw + 180.0;
  const std::pair<double, double> candidates[2] = {{yaw, r}, {flipped, -r}};
  for (const auto& [theta1, reach] : candidates) {
    if (!profile.joint_limits[0].contains(theta1)) continue;
    const double reach_dir = std::atan2(h, reach);
    for (const double e : {elbow, -elbow}) {
      const double shoulder = reach_dir - std::atan2(l2 * std::sin(e), l1 + l2 * std::cos(e));
      JointState q{theta1, rad_to_deg(shoulder), rad_to_deg(e)};
      if (within_limits(profile, q)) {
        for (std::size_t j = 0; j < 3; ++j) q[j] = profile.joint_limits[j].clamp(q[j]);
        return {q, UnreachableReason::out_of_envelope};
      }
    }
  }
  return {std::nullopt, UnreachableReason::joint_limit};
}

/// Throws Unreachable when no in-limit solution exists.
inline JointState inverse_kinematics(const ArmProfile& profile, const Pose& target) {
  auto sol = solve_inverse_kinematics(profile, target);
  if (!sol.joints) throw Unreachable(sol.reason, target);
  return *sol.joints;
}

inline bool is_reachable(const ArmProfile& profile, const Pose& target) {
  return solve_inverse_kinematics(profile, target).joints.has_value();
}

inline double move_duration(const ArmProfile& profile, const JointState& from, const JointState& to) {
  double largest = 0.0;
  for (std::size_t j = 0; j < 3; ++j) largest = std::max(largest, std::abs(to[j] - from[j]));
  return largest / profile.max_joint_speed;
}

/// n waypoints linearly interpolated per joint. Endpoints are copied exactly.
inline Trajectory plan_trajectory(const ArmProfile& profile, const JointState& from, const JointState& to,
                                  std::size_t n) {
  if (n < 2) throw InvalidWaypointCount(n);
  if (!within_limits(profile, from) || !within_limits(profile, to))
    throw std::invalid_argument("plan_trajectory: joint state outside limits");

  Trajectory traj;
  traj.duration = move_duration(profile, from, to);
  traj.waypoints.reserve(n);
  const double last = static_cast<double>(n - 1);
  traj.waypoints.push_back(from);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double u = static_cast<double>(i) / last;
    JointState q;
    for (std::size_t j = 0; j < 3; ++j) q[j] = from[j] + (to[j] - from[j]) * u;
    traj.waypoints.push_back(q);
  }
  traj.waypoints.push_back(to);
  return traj;
}

}  // namespace speared
