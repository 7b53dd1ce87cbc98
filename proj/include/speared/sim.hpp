#pragma once

// Kinematic simulation of program execution: trajectory following, swept-tip
// collision checks against scene boxes, suction pick and place, and physics
// controls (pause, resume, speed factor).
//
// Time model. `clock` is simulated seconds and advances by `dt` per unpaused
// step. Motion progresses at `dt * speed_factor`, so a move of unscaled
// duration D completes after D / speed_factor of clock time. Discrete events
// carry the exact instant at which they happen (not the end of the step that
// contained them), which makes the event log independent of how the run is
// partitioned into steps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "speared/collision.hpp"
#include "speared/dsl.hpp"
#include "speared/kinematics.hpp"
#include "speared/scene.hpp"

namespace speared {

class ValidationFailed : public Error {
 public:
  explicit ValidationFailed(std::vector<Diagnostic> diagnostics)
      : Error("program failed validation (" + std::to_string(diagnostics.size()) + " diagnostics)"),
        diagnostics_(std::move(diagnostics)) {}

  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

struct PhysicsState {
  bool paused = false;
  double speed_factor = 1.0;

  friend bool operator==(const PhysicsState&, const PhysicsState&) = default;
};

struct SimState {
  JointState joints;
  bool suction = false;
  std::optional<std::string> held_object;
  PhysicsState physics;
  double clock = 0.0;
  bool idle = true;
  std::optional<std::size_t> current_command;

  friend bool operator==(const SimState&, const SimState&) = default;
};

enum class FinishStatus { success, collision };

inline std::string_view to_string(FinishStatus s) { return s == FinishStatus::success ? "success" : "collision"; }

struct JointStateChanged {
  JointState joints;
  friend bool operator==(const JointStateChanged&, const JointStateChanged&) = default;
};
struct CommandStarted {
  std::size_t index = 0;
  friend bool operator==(const CommandStarted&, const CommandStarted&) = default;
};
struct CommandFinished {
  std::size_t index = 0;
  friend bool operator==(const CommandFinished&, const CommandFinished&) = default;
};
struct Collision {
  std::string object_id;
  std::size_t command_index = 0;
  Pose tip_pose;  ///< world frame contact point
  friend bool operator==(const Collision&, const Collision&) = default;
};
struct ObjectPicked {
  std::string id;
  friend bool operator==(const ObjectPicked&, const ObjectPicked&) = default;
};
struct ObjectReleased {
  std::string id;
  Pose rest_pose;
  friend bool operator==(const ObjectReleased&, const ObjectReleased&) = default;
};
struct ProgramFinished {
  FinishStatus status = FinishStatus::success;
  friend bool operator==(const ProgramFinished&, const ProgramFinished&) = default;
};
struct TrajectoryPlanned {
  std::size_t command_index = 0;
  std::vector<JointState> waypoints;
  double duration = 0.0;
  friend bool operator==(const TrajectoryPlanned&, const TrajectoryPlanned&) = default;
};

struct SimEvent {
  double clock = 0.0;
  std::variant<JointStateChanged, CommandStarted, CommandFinished, Collision, ObjectPicked, ObjectReleased,
               ProgramFinished, TrajectoryPlanned>
      data;

  template <typename T>
  const T* as() const {
    return std::get_if<T>(&data);
  }
  template <typename T>
  bool is() const {
    return std::holds_alternative<T>(data);
  }

  friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

struct Pause {};
struct Resume {};
struct SetSpeed {
  double factor = 1.0;
};
using PhysicsAction = std::variant<Pause, Resume, SetSpeed>;

class Simulator {
 public:
  /// Upright park pose the simulator starts in.
  static constexpr JointState kHome{0.0, 45.0, 45.0};
  /// Max distance from the tip to an object's top-face center for a pick (mm).
  static constexpr double kPickRadius = 10.0;
  /// Collision sample spacing in unscaled motion time (s).
  static constexpr double kCollisionStep = 0.005;
  /// Trajectory waypoints per second of motion.
  static constexpr double kWaypointRate = 50.0;

  Simulator(ArmProfile profile, Scene scene, JointState home = kHome)
      : profile_(std::move(profile)), scene_(std::move(scene)) {
    profile_.validate();
    if (!home.is_finite() || !within_limits(profile_, home))
      throw std::invalid_argument("home joint state outside the profile limits");
    state_.joints = home;
    for (auto& o : scene_.objects) o.attached = false;
  }

  const SimState& state() const { return state_; }
  const Scene& scene() const { return scene_; }
  const ArmProfile& profile() const { return profile_; }

  /// Tip position in the robot base frame.
  Pose tip() const { return forward_kinematics(profile_, state_.joints); }
  Pose tip_world() const { return robot_to_world(scene_, tip()); }

  /// Trajectory of the move being executed, if any.
  const Trajectory* active_trajectory() const { return move_ ? &move_->trajectory : nullptr; }

  std::vector<SceneObject> detect_objects() const { return scene_.objects; }

  std::vector<SimEvent> submit_program(const Program& p) {
    if (!state_.idle) throw NotIdle();
    check_program(p);
    auto diags = validate_program(p, profile_);
    if (has_errors(diags)) throw ValidationFailed(std::move(diags));

    std::vector<SimEvent> events;
    if (p.empty()) {
      events.push_back({state_.clock, ProgramFinished{FinishStatus::success}});
      return events;
    }
    program_ = p;
    state_.idle = false;
    start_command(0, state_.clock, events);
    return events;
  }

  std::vector<SimEvent> step(double dt) {
    if (!std::isfinite(dt) || dt < 0) throw std::invalid_argument("step: dt must be finite and >= 0");
    std::vector<SimEvent> events;
    if (state_.physics.paused) return events;

    const JointState before = state_.joints;
    const double end = state_.clock + dt;
    double now = state_.clock;
    while (!state_.idle) {
      if (!move_) {
        // suction commands take no time
        const std::size_t index = *state_.current_command;
        apply_suction(std::get<Suction>(program_.commands[index]).enabled, now, events);
        complete_command(index, now, events);
        continue;
      }
      const double done_at = completion_instant();
      if (done_at <= end) {
        if (sweep_to(1.0, events)) return events;
        state_.joints = move_->trajectory.waypoints.back();
        track_held_object();
        now = done_at;
        const std::size_t index = move_->command_index;
        move_.reset();
        complete_command(index, now, events);
      } else {
        const double s = std::min(progress_at(end) / move_->trajectory.duration, 1.0);
        if (sweep_to(s, events)) return events;
        state_.joints = move_->trajectory.at(s);
        track_held_object();
        break;
      }
    }
    state_.clock = end;
    if (state_.joints != before) events.push_back({end, JointStateChanged{state_.joints}});
    return events;
  }

  PhysicsState set_physics(const PhysicsAction& action) {
    if (std::holds_alternative<Pause>(action)) {
      state_.physics.paused = true;
    } else if (std::holds_alternative<Resume>(action)) {
      state_.physics.paused = false;
    } else {
      const double f = std::get<SetSpeed>(action).factor;
      if (!std::isfinite(f) || f <= 0) throw InvalidFactor(f);
      if (move_) {
        move_->anchor_progress = progress_at(state_.clock);
        move_->anchor_clock = state_.clock;
      }
      state_.physics.speed_factor = f;
    }
    return state_.physics;
  }

  std::vector<SimEvent> set_suction(bool enabled) {
    std::vector<SimEvent> events;
    apply_suction(enabled, state_.clock, events);
    return events;
  }

 private:
  struct ActiveMove {
    std::size_t command_index = 0;
    Trajectory trajectory;
    double anchor_clock = 0.0;     // clock at which anchor_progress was reached
    double anchor_progress = 0.0;  // unscaled motion seconds
    std::size_t lattice = 1;       // collision segments along the trajectory
    std::size_t checked = 0;       // segments already tested
    std::optional<std::string> pick_target;
  };

  double progress_at(double clock) const {
    return move_->anchor_progress + (clock - move_->anchor_clock) * state_.physics.speed_factor;
  }

  double completion_instant() const {
    return move_->anchor_clock +
           (move_->trajectory.duration - move_->anchor_progress) / state_.physics.speed_factor;
  }

  double instant_of_progress(double progress) const {
    return move_->anchor_clock + (progress - move_->anchor_progress) / state_.physics.speed_factor;
  }

  Pose tip_world_at(const JointState& q) const { return robot_to_world(scene_, forward_kinematics(profile_, q)); }

  const SceneObject* nearest_pickable(const Pose& tip) const {
    const SceneObject* best = nullptr;
    double best_d = 0.0;
    for (const auto& o : scene_.objects) {
      if (o.attached) continue;
      const double d = distance(tip, o.top_center());
      if (d > kPickRadius) continue;
      if (!best || d < best_d || (d == best_d && o.id < best->id)) {
        best = &o;
        best_d = d;
      }
    }
    return best;
  }

  void start_command(std::size_t index, double now, std::vector<SimEvent>& events) {
    state_.current_command = index;
    events.push_back({now, CommandStarted{index}});
    const auto* m = std::get_if<Move>(&program_.commands[index]);
    if (!m) return;

    const JointState goal = inverse_kinematics(profile_, m->target());
    const double duration = move_duration(profile_, state_.joints, goal);
    const auto n = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(duration * kWaypointRate)));

    ActiveMove mv;
    mv.command_index = index;
    mv.trajectory = plan_trajectory(profile_, state_.joints, goal, n);
    mv.anchor_clock = now;
    mv.lattice = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(duration / kCollisionStep)));
    if (index + 1 < program_.commands.size()) {
      const auto* next = std::get_if<Suction>(&program_.commands[index + 1]);
      if (next && next->enabled) {
        if (const auto* target = nearest_pickable(tip_world_at(goal))) mv.pick_target = target->id;
      }
    }
    events.push_back({now, TrajectoryPlanned{index, mv.trajectory.waypoints, mv.trajectory.duration}});
    move_ = std::move(mv);
  }

  void complete_command(std::size_t index, double now, std::vector<SimEvent>& events) {
    events.push_back({now, CommandFinished{index}});
    if (index + 1 < program_.commands.size()) {
      start_command(index + 1, now, events);
      return;
    }
    events.push_back({now, ProgramFinished{FinishStatus::success}});
    state_.idle = true;
    state_.current_command.reset();
    program_ = Program{};
  }

  /// Tests the untested lattice segments up to parametric position `s`.
  /// Returns true when a collision aborted execution.
  bool sweep_to(double s, std::vector<SimEvent>& events) {
    ActiveMove& mv = *move_;
    const double m = static_cast<double>(mv.lattice);
    while (mv.checked < mv.lattice && static_cast<double>(mv.checked + 1) / m <= s) {
      const double s0 = static_cast<double>(mv.checked) / m;
      const double s1 = static_cast<double>(mv.checked + 1) / m;
      const Segment seg{tip_world_at(mv.trajectory.at(s0)), tip_world_at(mv.trajectory.at(s1))};

      const SceneObject* hit = nullptr;
      Contact first;
      for (const auto& o : scene_.objects) {
        if (o.attached || (mv.pick_target && *mv.pick_target == o.id)) continue;
        const auto c = segment_aabb_contact(seg, o.bounds());
        if (!c) continue;
        if (!hit || c->t < first.t || (c->t == first.t && o.id < hit->id)) {
          hit = &o;
          first = *c;
        }
      }
      if (hit) {
        abort_on_collision(*hit, first, s0 + (s1 - s0) * first.t, events);
        return true;
      }
      ++mv.checked;
    }
    return false;
  }

  void abort_on_collision(const SceneObject& obj, const Contact& contact, double s, std::vector<SimEvent>& events) {
    const std::size_t index = move_->command_index;
    const double at = instant_of_progress(s * move_->trajectory.duration);
    const std::string id = obj.id;
    state_.joints = move_->trajectory.at(s);
    track_held_object();
    move_.reset();
    state_.clock = at;
    state_.idle = true;
    state_.physics.paused = true;
    events.push_back({at, JointStateChanged{state_.joints}});
    events.push_back({at, Collision{id, index, contact.point}});
    events.push_back({at, ProgramFinished{FinishStatus::collision}});
    program_ = Program{};
  }

  void apply_suction(bool enabled, double now, std::vector<SimEvent>& events) {
    if (enabled) {
      state_.suction = true;
      if (state_.held_object) return;
      const Pose tip = tip_world();
      const SceneObject* candidate = nearest_pickable(tip);
      if (!candidate) return;
      SceneObject& obj = *scene_.find(candidate->id);
      obj.attached = true;
      held_offset_ = obj.center - tip;
      state_.held_object = obj.id;
      events.push_back({now, ObjectPicked{obj.id}});
      return;
    }
    if (state_.held_object) {
      SceneObject& obj = *scene_.find(*state_.held_object);
      obj.attached = false;
      obj.center = {obj.center.x, obj.center.y, obj.size.z * 0.5};
      state_.held_object.reset();
      events.push_back({now, ObjectReleased{obj.id, obj.center}});
    }
    state_.suction = false;
  }

  void track_held_object() {
    if (!state_.held_object) return;
    scene_.find(*state_.held_object)->center = tip_world() + held_offset_;
  }

  ArmProfile profile_;
  Scene scene_;
  SimState state_;
  Program program_;
  std::optional<ActiveMove> move_;
  Pose held_offset_;
};

}  // namespace speared
