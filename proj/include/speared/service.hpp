#pragma once

// Message service: the service/topic endpoints in front of the simulator and
// the shared code store. Not thread-safe; a transport serializes all calls
// into it (see tcp.hpp), which gives every client the same total order.
//
// Services                          Topics
//   service:move_to                   topic:joint_states
//   service:set_suction               topic:idle
//   service:execute                   topic:end_effector
//   service:physics                   topic:detected_objects
//   service:state.joints              topic:trajectory
//   service:state.end_effector        topic:execution
//   service:state.idle                topic:code
//   service:detect_objects
//   service:code.store
//   service:code.load
//   service:translate
//   service:parse_vendor

#include <algorithm>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "speared/code_store.hpp"
#include "speared/envelope.hpp"
#include "speared/report.hpp"
#include "speared/sim.hpp"
#include "speared/vendor.hpp"

namespace speared {

namespace channel {
inline constexpr std::string_view kMoveTo = "service:move_to";
inline constexpr std::string_view kSetSuction = "service:set_suction";
inline constexpr std::string_view kExecute = "service:execute";
inline constexpr std::string_view kPhysics = "service:physics";
inline constexpr std::string_view kStateJoints = "service:state.joints";
inline constexpr std::string_view kStateEndEffector = "service:state.end_effector";
inline constexpr std::string_view kStateIdle = "service:state.idle";
inline constexpr std::string_view kDetectObjects = "service:detect_objects";
inline constexpr std::string_view kCodeStore = "service:code.store";
inline constexpr std::string_view kCodeLoad = "service:code.load";
inline constexpr std::string_view kTranslate = "service:translate";
inline constexpr std::string_view kParseVendor = "service:parse_vendor";

inline constexpr std::string_view kJointStates = "topic:joint_states";
inline constexpr std::string_view kIdle = "topic:idle";
inline constexpr std::string_view kEndEffector = "topic:end_effector";
inline constexpr std::string_view kDetectedObjects = "topic:detected_objects";
inline constexpr std::string_view kTrajectory = "topic:trajectory";
inline constexpr std::string_view kExecution = "topic:execution";
inline constexpr std::string_view kCode = "topic:code";

inline constexpr std::array<std::string_view, 7> kTopics = {kJointStates, kIdle,      kEndEffector, kDetectedObjects,
                                                            kTrajectory,  kExecution, kCode};
}  // namespace channel

/// Outgoing frames of one client. Events respect the capacity; replies and
/// control frames are always queued.
class Outbox {
 public:
  explicit Outbox(std::size_t capacity = 4096) : capacity_(capacity) {}

  bool push(std::string frame) {
    std::lock_guard lock(mu_);
    if (closed_ || frames_.size() >= capacity_) return false;
    frames_.push_back(std::move(frame));
    cv_.notify_one();
    return true;
  }

  void push_control(std::string frame) {
    std::lock_guard lock(mu_);
    if (closed_) return;
    frames_.push_back(std::move(frame));
    cv_.notify_one();
  }

  /// Waits up to `timeout`; nullopt on timeout or when closed and drained.
  std::optional<std::string> pop(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mu_);
    cv_.wait_for(lock, timeout, [&] { return !frames_.empty() || closed_; });
    if (frames_.empty()) return std::nullopt;
    std::string f = std::move(frames_.front());
    frames_.pop_front();
    return f;
  }

  std::vector<std::string> drain() {
    std::lock_guard lock(mu_);
    std::vector<std::string> out(std::make_move_iterator(frames_.begin()), std::make_move_iterator(frames_.end()));
    frames_.clear();
    return out;
  }

  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    cv_.notify_all();
  }

  bool closed() const {
    std::lock_guard lock(mu_);
    return closed_;
  }

 private:
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::string> frames_;
  std::size_t capacity_;
  bool closed_ = false;
};

class MessageService {
 public:
  using ClientId = std::uint64_t;

  explicit MessageService(Simulator sim, const DialectRegistry& registry = DialectRegistry::builtin())
      : sim_(std::move(sim)), registry_(&registry) {
    last_idle_ = sim_.state().idle;
    last_end_effector_ = end_effector_payload();
  }

  ClientId connect(std::shared_ptr<Outbox> outbox) {
    const ClientId id = next_client_++;
    clients_[id] = std::move(outbox);
    return id;
  }

  void disconnect(ClientId client) {
    clients_.erase(client);
    std::erase_if(subs_, [&](const Subscription& s) { return s.client == client; });
  }

  /// Serves one inbound frame. Malformed frames yield an error envelope to
  /// the sender; the client stays connected.
  void receive(ClientId client, std::string_view frame) {
    std::string id;
    std::string chan;
    Envelope env;
    try {
      env = parse_envelope(frame, &id, &chan);
    } catch (const ProtocolError& e) {
      send(client, make_error(id, chan, e));
      return;
    }
    if (env.kind == "call") {
      send(client, handle_call(env, client));
    } else if (env.kind == "subscribe") {
      subscribe(client, env);
    } else {
      send(client, make_error(env.id, env.channel,
                              ProtocolError("bad_payload", "clients may only send 'call' or 'subscribe'")));
    }
  }

  /// Dispatches a call and returns its reply or error envelope. State
  /// changes are published to subscribers before this returns.
  Envelope handle_call(const Envelope& call, ClientId from = 0) {
    try {
      if (call.kind != "call") throw ProtocolError("bad_payload", "expected kind 'call'");
      return {"reply", call.id, call.channel, dispatch(call, from)};
    } catch (const ProtocolError& e) {
      return make_error(call.id, call.channel, e);
    }
  }

  void subscribe(ClientId client, const Envelope& env) {
    const auto& topics = channel::kTopics;
    if (std::find(topics.begin(), topics.end(), env.channel) == topics.end()) {
      send(client, make_error(env.id, env.channel,
                              ProtocolError("unknown_channel", "unknown topic '" + env.channel + "'")));
      return;
    }
    subs_.push_back({client, env.id, env.channel});
    deliver(subs_.back(), topic_snapshot(env.channel));
  }

  /// True while a program is executing and physics is running.
  bool busy() const { return !sim_.state().idle && !sim_.state().physics.paused; }

  void tick(double dt) { publish_sim_events(sim_.step(dt)); }

  const Simulator& simulator() const { return sim_; }
  const CodeStore& code_store() const { return store_; }

 private:
  struct Subscription {
    ClientId client;
    std::string id;
    std::string topic;
  };

  void send(ClientId client, const Envelope& env) {
    auto it = clients_.find(client);
    if (it != clients_.end()) it->second->push_control(to_frame(env));
  }

  /// Returns false when the subscriber overflowed and was dropped.
  bool deliver(const Subscription& sub, const Json& payload) {
    auto it = clients_.find(sub.client);
    if (it == clients_.end()) return false;
    if (it->second->push(to_frame({"event", sub.id, sub.topic, payload}))) return true;
    it->second->push_control(to_frame(make_error(
        sub.id, sub.topic, ProtocolError("overflow", "subscriber queue full; subscription closed"))));
    return false;
  }

  void publish(std::string_view topic, const Json& payload) {
    std::vector<Subscription> dropped;
    for (const auto& sub : subs_) {
      if (sub.topic != topic) continue;
      if (!deliver(sub, payload)) dropped.push_back(sub);
    }
    for (const auto& d : dropped) {
      std::erase_if(subs_, [&](const Subscription& s) { return s.client == d.client && s.id == d.id; });
    }
  }

  // --- topic payloads ------------------------------------------------------

  Json joint_state_payload(double clock, const JointState& q) const {
    Json j;
    j["clock"] = clock;
    j["theta1"] = q.theta1;
    j["theta2"] = q.theta2;
    j["theta3"] = q.theta3;
    return j;
  }

  Json idle_payload() const {
    Json j;
    j["idle"] = sim_.state().idle;
    return j;
  }

  Json end_effector_payload() const {
    const auto& s = sim_.state();
    Json j;
    j["suction"] = s.suction;
    j["held_object"] = s.held_object ? Json(*s.held_object) : Json(nullptr);
    return j;
  }

  Json objects_payload() const {
    Json j;
    j["objects"] = objects_to_json(sim_.detect_objects());
    return j;
  }

  Json trajectory_payload(std::optional<std::size_t> index, const std::vector<JointState>& waypoints,
                          double duration) const {
    Json j;
    j["command_index"] = index ? Json(*index) : Json(nullptr);
    j["duration"] = duration;
    j["waypoints"] = Json::array();
    for (const auto& q : waypoints) j["waypoints"].push_back(Json::array({q.theta1, q.theta2, q.theta3}));
    return j;
  }

  Json code_payload() const {
    const auto& entry = store_.load();
    Json j;
    j["revision"] = entry.revision;
    j["program"] = program_to_json(entry.program);
    j["last_writer"] = entry.last_writer;
    return j;
  }

  Json topic_snapshot(std::string_view topic) const {
    const auto& s = sim_.state();
    if (topic == channel::kJointStates) return joint_state_payload(s.clock, s.joints);
    if (topic == channel::kIdle) return idle_payload();
    if (topic == channel::kEndEffector) return end_effector_payload();
    if (topic == channel::kDetectedObjects) return objects_payload();
    if (topic == channel::kTrajectory) {
      if (const Trajectory* t = sim_.active_trajectory())
        return trajectory_payload(s.current_command, t->waypoints, t->duration);
      return trajectory_payload(std::nullopt, {}, 0.0);
    }
    if (topic == channel::kExecution) {
      Json j;
      j["type"] = "Snapshot";
      j["clock"] = s.clock;
      j["idle"] = s.idle;
      j["current_command"] = s.current_command ? Json(*s.current_command) : Json(nullptr);
      return j;
    }
    return code_payload();
  }

  void publish_sim_events(const std::vector<SimEvent>& events) {
    bool objects_changed = false;
    for (const auto& e : events) {
      if (const auto* js = e.as<JointStateChanged>()) {
        publish(channel::kJointStates, joint_state_payload(e.clock, js->joints));
      } else if (const auto* tp = e.as<TrajectoryPlanned>()) {
        publish(channel::kTrajectory, trajectory_payload(tp->command_index, tp->waypoints, tp->duration));
      } else {
        objects_changed = objects_changed || e.is<ObjectPicked>() || e.is<ObjectReleased>();
        publish(channel::kExecution, sim_event_to_json(e));
      }
    }
    if (sim_.state().idle != last_idle_) {
      last_idle_ = sim_.state().idle;
      publish(channel::kIdle, idle_payload());
    }
    if (Json ee = end_effector_payload(); ee != last_end_effector_) {
      last_end_effector_ = ee;
      publish(channel::kEndEffector, ee);
    }
    if (objects_changed) publish(channel::kDetectedObjects, objects_payload());
  }

  // --- services ------------------------------------------------------------

  static double number_field(const Json& payload, const char* key) {
    auto it = payload.find(key);
    if (it == payload.end() || !it->is_number())
      throw ProtocolError("bad_payload", std::string("field '") + key + "' must be a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw ProtocolError("bad_payload", std::string("field '") + key + "' must be finite");
    return v;
  }

  static std::string string_field(const Json& payload, const char* key) {
    auto it = payload.find(key);
    if (it == payload.end() || !it->is_string())
      throw ProtocolError("bad_payload", std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
  }

  static bool bool_field(const Json& payload, const char* key) {
    auto it = payload.find(key);
    if (it == payload.end() || !it->is_boolean())
      throw ProtocolError("bad_payload", std::string("field '") + key + "' must be a boolean");
    return it->get<bool>();
  }

  static Program program_field(const Json& payload, const char* key) {
    auto it = payload.find(key);
    if (it == payload.end()) throw ProtocolError("bad_payload", std::string("missing field '") + key + "'");
    try {
      return program_from_json(*it);
    } catch (const JsonFormatError& e) {
      throw ProtocolError("bad_payload", std::string("field '") + key + "': " + e.what());
    }
  }

  const VendorDialect& dialect_field(const Json& payload) const {
    const std::string id = string_field(payload, "dialect");
    try {
      return registry_->get(id);
    } catch (const UnknownDialect& e) {
      throw ProtocolError("bad_payload", e.what());
    }
  }

  Json submit(const Program& p) {
    std::vector<SimEvent> events;
    try {
      events = sim_.submit_program(p);
    } catch (const NotIdle& e) {
      throw ProtocolError("not_idle", e.what());
    } catch (const ValidationFailed& e) {
      Json extra;
      extra["diagnostics"] = diagnostics_to_json(e.diagnostics());
      throw ProtocolError("validation_failed", e.what(), extra);
    } catch (const InvalidProgram& e) {
      throw ProtocolError("bad_payload", e.what());
    }
    publish_sim_events(events);
    Json reply;
    reply["accepted"] = true;
    reply["program"] = p.name;
    reply["commands"] = p.size();
    return reply;
  }

  Json dispatch(const Envelope& call, ClientId from) {
    const std::string_view ch = call.channel;
    const Json& in = call.payload;
    const SimState& s = sim_.state();

    if (ch == channel::kStateJoints) return joints_to_json(s.joints);
    if (ch == channel::kStateIdle) {
      Json j = idle_payload();
      j["current_command"] = s.current_command ? Json(*s.current_command) : Json(nullptr);
      return j;
    }
    if (ch == channel::kStateEndEffector) {
      Json j = end_effector_payload();
      j["pose"] = pose_to_json(sim_.tip());
      j["world_pose"] = pose_to_json(sim_.tip_world());
      return j;
    }
    if (ch == channel::kDetectObjects) {
      Json j = objects_payload();
      publish(channel::kDetectedObjects, j);
      return j;
    }
    if (ch == channel::kPhysics) {
      const std::string action = string_field(in, "action");
      PhysicsAction act;
      if (action == "pause") {
        act = Pause{};
      } else if (action == "resume") {
        act = Resume{};
      } else if (action == "set_speed") {
        act = SetSpeed{number_field(in, "factor")};
      } else {
        throw ProtocolError("bad_payload", "unknown physics action '" + action + "'");
      }
      PhysicsState ps;
      try {
        ps = sim_.set_physics(act);
      } catch (const InvalidFactor& e) {
        throw ProtocolError("bad_payload", e.what());
      }
      Json j;
      j["paused"] = ps.paused;
      j["speed_factor"] = ps.speed_factor;
      return j;
    }
    if (ch == channel::kSetSuction) {
      const bool enabled = bool_field(in, "enabled");
      publish_sim_events(sim_.set_suction(enabled));
      return end_effector_payload();
    }
    if (ch == channel::kMoveTo) {
      Pose target{number_field(in, "x"), number_field(in, "y"), number_field(in, "z")};
      if (auto it = in.find("frame"); it != in.end()) {
        if (*it == "world") {
          target = world_to_robot(sim_.scene(), target);
        } else if (*it != "robot") {
          throw ProtocolError("bad_payload", "frame must be 'robot' or 'world'");
        }
      }
      const auto sol = solve_inverse_kinematics(sim_.profile(), target);
      if (!sol.joints) {
        Json extra;
        extra["reason"] = std::string(to_string(sol.reason));
        throw ProtocolError("unreachable", Unreachable(sol.reason, target).what(), extra);
      }
      Program p;
      p.name = "move_to";
      p.commands.emplace_back(Move{target.x, target.y, target.z});
      return submit(p);
    }
    if (ch == channel::kExecute) {
      if (in.contains("use_stored")) {
        if (!bool_field(in, "use_stored")) throw ProtocolError("bad_payload", "use_stored must be true when given");
        return submit(store_.load().program);
      }
      if (in.contains("dialect")) {
        const VendorDialect& d = dialect_field(in);
        const std::string source = string_field(in, "source");
        try {
          return submit(parse_vendor(source, d.id(), std::string(kDefaultProgramName), *registry_));
        } catch (const VendorParseError& e) {
          throw ProtocolError("bad_payload", e.what());
        }
      }
      return submit(program_field(in, "program"));
    }
    if (ch == channel::kCodeLoad) {
      const auto& entry = store_.load();
      Json j;
      j["program"] = program_to_json(entry.program);
      j["revision"] = entry.revision;
      return j;
    }
    if (ch == channel::kCodeStore) {
      Program p = program_field(in, "program");
      auto it = in.find("expected_revision");
      const bool non_negative =
          it != in.end() && (it->is_number_unsigned() || (it->is_number_integer() && it->get<std::int64_t>() >= 0));
      if (!non_negative)
        throw ProtocolError("bad_payload", "field 'expected_revision' must be a non-negative integer");
      std::string writer = "client-" + std::to_string(from);
      if (in.contains("client")) writer = string_field(in, "client");
      const auto result = store_.store(std::move(p), it->get<std::uint64_t>(), std::move(writer));
      if (!result.accepted) {
        Json extra;
        extra["current_revision"] = result.revision;
        extra["program"] = program_to_json(store_.load().program);
        throw ProtocolError("conflict", "stale revision; current revision is " + std::to_string(result.revision),
                            extra);
      }
      publish(channel::kCode, code_payload());
      Json j;
      j["revision"] = result.revision;
      return j;
    }
    if (ch == channel::kTranslate) {
      const Program p = program_field(in, "program");
      const VendorDialect& d = dialect_field(in);
      Json j;
      j["dialect"] = std::string(d.id());
      j["text"] = translate_to_vendor(p, d.id(), *registry_);
      return j;
    }
    if (ch == channel::kParseVendor) {
      const VendorDialect& d = dialect_field(in);
      const std::string text = string_field(in, "text");
      std::string name(kDefaultProgramName);
      if (in.contains("name")) name = string_field(in, "name");
      if (!is_valid_program_name(name)) throw ProtocolError("bad_payload", "invalid program name");
      try {
        Json j;
        j["program"] = program_to_json(parse_vendor(text, d.id(), name, *registry_));
        return j;
      } catch (const VendorParseError& e) {
        Json extra;
        extra["line"] = e.line();
        throw ProtocolError("bad_payload", e.what(), extra);
      }
    }
    throw ProtocolError("unknown_channel", "unknown service '" + call.channel + "'");
  }

  Simulator sim_;
  CodeStore store_;
  const DialectRegistry* registry_;
  std::map<ClientId, std::shared_ptr<Outbox>> clients_;
  std::vector<Subscription> subs_;
  ClientId next_client_ = 1;
  bool last_idle_ = true;
  Json last_end_effector_;
};

}  // namespace speared
