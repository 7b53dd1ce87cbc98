#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "speared/kinematics.hpp"
#include "speared/serialization.hpp"

namespace speared {
namespace {

const ArmProfile kProfile = default_arm_profile();

void expect_pose_near(const Pose& a, const Pose& b, double tol = 1e-9) {
  EXPECT_NEAR(a.x, b.x, tol);
  EXPECT_NEAR(a.y, b.y, tol);
  EXPECT_NEAR(a.z, b.z, tol);
}

void expect_joints_near(const JointState& a, const JointState& b, double tol = 1e-9) {
  EXPECT_NEAR(a.theta1, b.theta1, tol);
  EXPECT_NEAR(a.theta2, b.theta2, tol);
  EXPECT_NEAR(a.theta3, b.theta3, tol);
}

TEST(ForwardKinematics, StraightOutPose) {
  expect_pose_near(forward_kinematics(kProfile, {0, 0, 0}), {282, 0, 138});
}

TEST(ForwardKinematics, PureBaseYaw) {
  expect_pose_near(forward_kinematics(kProfile, {90, 0, 0}), {0, 282, 138});
}

TEST(ForwardKinematics, ForearmVertical) {
  expect_pose_near(forward_kinematics(kProfile, {0, 0, 90}), {135, 0, 285});
}

TEST(ForwardKinematics, MatchesReferenceFormula) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    const JointState q = testing::random_joints(kProfile, rng);
    expect_pose_near(forward_kinematics(kProfile, q), testing::fk_reference(kProfile, q.theta1, q.theta2, q.theta3),
                     1e-9);
  }
}

TEST(InverseKinematics, StraightOutPose) {
  expect_joints_near(inverse_kinematics(kProfile, {282, 0, 138}), {0, 0, 0}, 1e-6);
}

TEST(InverseKinematics, ForearmVerticalPicksPositiveElbow) {
  expect_joints_near(inverse_kinematics(kProfile, {135, 0, 285}), {0, 0, 90}, 1e-9);
}

TEST(InverseKinematics, BeyondReachIsOutOfEnvelope) {
  try {
    inverse_kinematics(kProfile, {1000, 0, 138});
    FAIL() << "expected Unreachable";
  } catch (const Unreachable& e) {
    EXPECT_EQ(e.reason(), UnreachableReason::out_of_envelope);
  }
}

TEST(InverseKinematics, ReachesBackOverTheBase) {
  // theta2 + theta3 > 90 puts the tip behind the base axis.
  const JointState q{0, 80, 90};
  const Pose target = forward_kinematics(kProfile, q);
  ASSERT_LT(target.x, 0);
  const JointState sol = inverse_kinematics(kProfile, target);
  EXPECT_LT(distance(forward_kinematics(kProfile, sol), target), kPositionTolerance);
}

TEST(InverseKinematics, YawOutsideLimitIsJointLimit) {
  // Behind the base at a distance only the forward-facing arm could cover.
  try {
    inverse_kinematics(kProfile, {-200, 0, 200});
    FAIL() << "expected Unreachable";
  } catch (const Unreachable& e) {
    EXPECT_EQ(e.reason(), UnreachableReason::joint_limit);
  }
}

TEST(InverseKinematics, BelowShoulderRangeIsJointLimit) {
  // Within l1+l2 of the shoulder but would need theta2 < 0.
  const auto sol = solve_inverse_kinematics(kProfile, {150, 0, 60});
  ASSERT_FALSE(sol.joints);
  EXPECT_EQ(sol.reason, UnreachableReason::joint_limit);
}

TEST(InverseKinematics, RejectsNonFiniteTarget) {
  EXPECT_THROW(inverse_kinematics(kProfile, {NAN, 0, 0}), std::invalid_argument);
}

// FK-sampling oracle: every target produced by FK of an in-limit state must
// be solved to 1e-6 mm, with the solution inside the limits.
TEST(InverseKinematics, FkSampledTargetsRoundTrip) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const JointState q = testing::random_joints(kProfile, rng);
    const Pose target = forward_kinematics(kProfile, q);
    const JointState sol = inverse_kinematics(kProfile, target);
    EXPECT_TRUE(within_limits(kProfile, sol, 0.0));
    EXPECT_LT(distance(forward_kinematics(kProfile, sol), target), kPositionTolerance) << "sample " << i;
  }
}

TEST(InverseKinematics, LimitCornersRoundTrip) {
  const auto& lim = kProfile.joint_limits;
  for (double t1 : {lim[0].min, 0.0, lim[0].max})
    for (double t2 : {lim[1].min, lim[1].max})
      for (double t3 : {lim[2].min, 0.0, lim[2].max}) {
        const Pose target = forward_kinematics(kProfile, {t1, t2, t3});
        const JointState sol = inverse_kinematics(kProfile, target);
        EXPECT_LT(distance(forward_kinematics(kProfile, sol), target), kPositionTolerance);
      }
}

TEST(InverseKinematics, Deterministic) {
  const Pose target{200.5, -33.25, 281.0};
  EXPECT_EQ(inverse_kinematics(kProfile, target), inverse_kinematics(kProfile, target));
}

TEST(InverseKinematics, YawEquivariance) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> yaw(-60.0, 60.0);
  std::uniform_real_distribution<double> phi(-60.0, 60.0);
  for (int i = 0; i < 500; ++i) {
    JointState q = testing::random_joints(kProfile, rng);
    q.theta1 = yaw(rng);
    const Pose target = forward_kinematics(kProfile, q);
    if (std::hypot(target.x, target.y) < 1.0) continue;
    // keep the tip in front of the base so the direct yaw is the solution
    if (kProfile.l1 * std::cos(deg_to_rad(q.theta2)) + kProfile.l2 * std::cos(deg_to_rad(q.theta2 + q.theta3)) <= 0)
      continue;
    const double rot = phi(rng);
    const double c = std::cos(deg_to_rad(rot));
    const double s = std::sin(deg_to_rad(rot));
    const Pose rotated{c * target.x - s * target.y, s * target.x + c * target.y, target.z};

    const JointState a = inverse_kinematics(kProfile, target);
    const JointState b = inverse_kinematics(kProfile, rotated);
    EXPECT_NEAR(std::remainder(b.theta1 - a.theta1 - rot, 360.0), 0.0, 1e-9);
    EXPECT_NEAR(b.theta2, a.theta2, 1e-9);
    EXPECT_NEAR(b.theta3, a.theta3, 1e-9);
  }
}

TEST(IsReachable, Examples) {
  EXPECT_TRUE(is_reachable(kProfile, {282, 0, 138}));
  EXPECT_FALSE(is_reachable(kProfile, {0, 0, 1000}));
}

TEST(PlanTrajectory, IdentityMove) {
  const JointState q{10, 20, 30};
  const Trajectory t = plan_trajectory(kProfile, q, q, 2);
  ASSERT_EQ(t.waypoints.size(), 2u);
  EXPECT_EQ(t.waypoints[0], q);
  EXPECT_EQ(t.waypoints[1], q);
  EXPECT_EQ(t.duration, 0.0);
}

TEST(PlanTrajectory, LinearInterpolation) {
  const Trajectory t = plan_trajectory(kProfile, {0, 0, 0}, {90, 0, 0}, 3);
  ASSERT_EQ(t.waypoints.size(), 3u);
  EXPECT_EQ(t.waypoints[0], (JointState{0, 0, 0}));
  EXPECT_EQ(t.waypoints[1], (JointState{45, 0, 0}));
  EXPECT_EQ(t.waypoints[2], (JointState{90, 0, 0}));
  EXPECT_DOUBLE_EQ(t.duration, 1.0);
}

TEST(PlanTrajectory, RejectsFewerThanTwoWaypoints) {
  EXPECT_THROW(plan_trajectory(kProfile, {0, 0, 0}, {1, 1, 1}, 1), InvalidWaypointCount);
  EXPECT_THROW(plan_trajectory(kProfile, {0, 0, 0}, {1, 1, 1}, 0), InvalidWaypointCount);
}

TEST(PlanTrajectory, RejectsOutOfLimitStates) {
  EXPECT_THROW(plan_trajectory(kProfile, {0, -5, 0}, {0, 0, 0}, 2), std::invalid_argument);
}

TEST(PlanTrajectory, UniformStepsEndpointsAndMonotonicity) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<std::size_t> count(2, 120);
  for (int i = 0; i < 300; ++i) {
    const JointState from = testing::random_joints(kProfile, rng);
    const JointState to = testing::random_joints(kProfile, rng);
    const std::size_t n = count(rng);
    const Trajectory t = plan_trajectory(kProfile, from, to, n);
    ASSERT_EQ(t.waypoints.size(), n);
    EXPECT_EQ(t.waypoints.front(), from);
    EXPECT_EQ(t.waypoints.back(), to);

    double largest = 0;
    for (std::size_t j = 0; j < 3; ++j) largest = std::max(largest, std::abs(to[j] - from[j]));
    EXPECT_DOUBLE_EQ(t.duration, largest / kProfile.max_joint_speed);

    for (std::size_t k = 1; k < n; ++k)
      for (std::size_t j = 0; j < 3; ++j) {
        const double step = t.waypoints[k][j] - t.waypoints[k - 1][j];
        EXPECT_NEAR(step, (to[j] - from[j]) / static_cast<double>(n - 1), 1e-9);
        const double sign = to[j] >= from[j] ? 1.0 : -1.0;
        EXPECT_GE(sign * step, -1e-12);
      }
  }
}

TEST(ArmProfile, ValidatesInvariants) {
  ArmProfile p;
  EXPECT_NO_THROW(p.validate());
  p.l1 = 0;
  EXPECT_THROW(p.validate(), InvalidProfile);
  p = ArmProfile{};
  p.joint_limits[1] = {10, 10};
  EXPECT_THROW(p.validate(), InvalidProfile);
  p = ArmProfile{};
  p.max_joint_speed = -1;
  EXPECT_THROW(p.validate(), InvalidProfile);
}

TEST(ArmProfile, JsonRoundTripAndSchemaErrors) {
  const ArmProfile p = default_arm_profile();
  EXPECT_EQ(arm_profile_from_json(arm_profile_to_json(p)), p);
  EXPECT_THROW(arm_profile_from_json_text(R"({"l1":1})"), JsonFormatError);
  EXPECT_THROW(arm_profile_from_json_text(
                   R"({"l1":1,"l2":1,"base_height":0,"joint_limits":[[0,1],[0,1]],"max_joint_speed":1})"),
               JsonFormatError);
  EXPECT_THROW(arm_profile_from_json_text(
                   R"({"l1":-1,"l2":1,"base_height":0,"joint_limits":[[0,1],[0,1],[0,1]],"max_joint_speed":1})"),
               InvalidProfile);
}

}  // namespace
}  // namespace speared
