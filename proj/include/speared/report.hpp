#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "speared/scene.hpp"
#include "speared/serialization.hpp"
#include "speared/sim.hpp"

namespace speared {

inline constexpr int kReportVersion = 1;

inline Json sim_event_to_json(const SimEvent& e) {
  Json j;
  std::visit(
      [&](const auto& ev) {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, JointStateChanged>) {
          j["type"] = "JointStateChanged";
          j["clock"] = e.clock;
          j["joints"] = joints_to_json(ev.joints);
        } else if constexpr (std::is_same_v<T, CommandStarted>) {
          j["type"] = "CommandStarted";
          j["clock"] = e.clock;
          j["index"] = ev.index;
        } else if constexpr (std::is_same_v<T, CommandFinished>) {
          j["type"] = "CommandFinished";
          j["clock"] = e.clock;
          j["index"] = ev.index;
        } else if constexpr (std::is_same_v<T, Collision>) {
          j["type"] = "Collision";
          j["clock"] = e.clock;
          j["object_id"] = ev.object_id;
          j["command_index"] = ev.command_index;
          j["tip_pose"] = pose_to_json(ev.tip_pose);
        } else if constexpr (std::is_same_v<T, ObjectPicked>) {
          j["type"] = "ObjectPicked";
          j["clock"] = e.clock;
          j["id"] = ev.id;
        } else if constexpr (std::is_same_v<T, ObjectReleased>) {
          j["type"] = "ObjectReleased";
          j["clock"] = e.clock;
          j["id"] = ev.id;
          j["rest_pose"] = pose_to_json(ev.rest_pose);
        } else if constexpr (std::is_same_v<T, ProgramFinished>) {
          j["type"] = "ProgramFinished";
          j["clock"] = e.clock;
          j["status"] = std::string(to_string(ev.status));
        } else {
          j["type"] = "TrajectoryPlanned";
          j["clock"] = e.clock;
          j["command_index"] = ev.command_index;
          j["duration"] = ev.duration;
          j["waypoints"] = Json::array();
          for (const auto& q : ev.waypoints) j["waypoints"].push_back(Json::array({q.theta1, q.theta2, q.theta3}));
        }
      },
      e.data);
  return j;
}

inline Json sim_state_to_json(const SimState& s) {
  Json j;
  j["joints"] = joints_to_json(s.joints);
  j["suction"] = s.suction;
  j["held_object"] = s.held_object ? Json(*s.held_object) : Json(nullptr);
  j["physics"]["paused"] = s.physics.paused;
  j["physics"]["speed_factor"] = s.physics.speed_factor;
  j["clock"] = s.clock;
  j["idle"] = s.idle;
  j["current_command"] = s.current_command ? Json(*s.current_command) : Json(nullptr);
  return j;
}

struct RunResult {
  std::vector<SimEvent> events;
  FinishStatus status = FinishStatus::success;
  double completion_clock = 0.0;  ///< instant of ProgramFinished
};

/// Submits `p` and steps with a fixed `dt` until the program finishes.
/// Propagates NotIdle / ValidationFailed from submit_program.
inline RunResult run_program(Simulator& sim, const Program& p, double dt, std::size_t max_steps = 10'000'000) {
  if (!(dt > 0)) throw std::invalid_argument("run_program: dt must be > 0");
  RunResult result;
  result.events = sim.submit_program(p);
  for (std::size_t i = 0; i < max_steps && !sim.state().idle; ++i) {
    if (sim.state().physics.paused) throw std::runtime_error("run_program: simulator is paused");
    auto batch = sim.step(dt);
    result.events.insert(result.events.end(), batch.begin(), batch.end());
  }
  for (const auto& e : result.events) {
    if (const auto* fin = e.as<ProgramFinished>()) {
      result.status = fin->status;
      result.completion_clock = e.clock;
    }
  }
  return result;
}

inline Json make_report(const Program& p, const RunResult& run, const Simulator& sim) {
  Json j;
  j["report_version"] = kReportVersion;
  j["program"] = p.name;
  j["status"] = std::string(to_string(run.status));
  j["completion_clock"] = run.completion_clock;
  j["final_state"] = sim_state_to_json(sim.state());
  j["objects"] = objects_to_json(sim.detect_objects());
  j["events"] = Json::array();
  for (const auto& e : run.events) j["events"].push_back(sim_event_to_json(e));
  return j;
}

inline Json make_validation_report(const Program& p, const std::vector<Diagnostic>& diags) {
  Json j;
  j["report_version"] = kReportVersion;
  j["program"] = p.name;
  j["status"] = "validation_failed";
  j["diagnostics"] = diagnostics_to_json(diags);
  j["events"] = Json::array();
  return j;
}

}  // namespace speared
