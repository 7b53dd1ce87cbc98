#pragma once

// JSON forms of the domain types. Wire output uses insertion-ordered objects
// so serialized text is stable byte for byte.

#include <json.hpp>

#include <string>
#include <string_view>

#include "speared/dsl.hpp"
#include "speared/kinematics.hpp"

namespace speared {

using Json = nlohmann::ordered_json;

/// Thrown for JSON documents that do not match an interchange schema.
class JsonFormatError : public Error {
 public:
  JsonFormatError(std::string path, std::string reason)
      : Error((path.empty() ? std::string("/") : path) + ": " + reason),
        path_(std::move(path)),
        reason_(std::move(reason)) {}

  const std::string& path() const { return path_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string path_;
  std::string reason_;
};

namespace json_detail {

inline const Json& member(const Json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) throw JsonFormatError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw JsonFormatError(path + "/" + key, "missing field");
  return *it;
}

inline double number(const Json& v, const std::string& path) {
  if (!v.is_number()) throw JsonFormatError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw JsonFormatError(path, "expected a finite number");
  return d;
}

inline double number_at(const Json& obj, const std::string& path, const char* key) {
  return number(member(obj, path, key), path + "/" + key);
}

inline std::string string_at(const Json& obj, const std::string& path, const char* key) {
  const Json& v = member(obj, path, key);
  if (!v.is_string()) throw JsonFormatError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

inline bool bool_at(const Json& obj, const std::string& path, const char* key) {
  const Json& v = member(obj, path, key);
  if (!v.is_boolean()) throw JsonFormatError(path + "/" + key, "expected a boolean");
  return v.get<bool>();
}

inline Pose vec3(const Json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) throw JsonFormatError(path, "expected an array of 3 numbers");
  return {number(v[0], path + "/0"), number(v[1], path + "/1"), number(v[2], path + "/2")};
}

}  // namespace json_detail

// --- Program interchange ---------------------------------------------------

inline Json command_to_json(const Command& c) {
  Json j;
  if (const auto* m = std::get_if<Move>(&c)) {
    j["type"] = "move";
    j["x"] = m->x;
    j["y"] = m->y;
    j["z"] = m->z;
  } else {
    j["type"] = "suction";
    j["enabled"] = std::get<Suction>(c).enabled;
  }
  return j;
}

inline Json program_to_json(const Program& p) {
  Json j;
  j["name"] = p.name;
  j["commands"] = Json::array();
  for (const auto& c : p.commands) j["commands"].push_back(command_to_json(c));
  return j;
}

inline Command command_from_json(const Json& j, const std::string& path) {
  using namespace json_detail;
  const std::string type = string_at(j, path, "type");
  if (type == "move") return Move{number_at(j, path, "x"), number_at(j, path, "y"), number_at(j, path, "z")};
  if (type == "suction") return Suction{bool_at(j, path, "enabled")};
  throw JsonFormatError(path + "/type", "unknown command type '" + type + "'");
}

inline Program program_from_json(const Json& j) {
  using namespace json_detail;
  Program p;
  p.name = string_at(j, "", "name");
  if (!is_valid_program_name(p.name)) throw JsonFormatError("/name", "invalid program name");
  const Json& cmds = member(j, "", "commands");
  if (!cmds.is_array()) throw JsonFormatError("/commands", "expected an array");
  for (std::size_t i = 0; i < cmds.size(); ++i)
    p.commands.push_back(command_from_json(cmds[i], "/commands/" + std::to_string(i)));
  return p;
}

inline Program program_from_json_text(std::string_view text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw JsonFormatError("", "malformed JSON");
  return program_from_json(j);
}

// --- Arm profile -----------------------------------------------------------

inline Json arm_profile_to_json(const ArmProfile& p) {
  Json j;
  j["l1"] = p.l1;
  j["l2"] = p.l2;
  j["base_height"] = p.base_height;
  j["joint_limits"] = Json::array();
  for (const auto& lim : p.joint_limits) j["joint_limits"].push_back(Json::array({lim.min, lim.max}));
  j["max_joint_speed"] = p.max_joint_speed;
  return j;
}

/// Parses `{ "l1", "l2", "base_height", "joint_limits": [[min,max] x3], "max_joint_speed" }`
/// and validates the invariants.
inline ArmProfile arm_profile_from_json(const Json& j) {
  using namespace json_detail;
  ArmProfile p;
  p.l1 = number_at(j, "", "l1");
  p.l2 = number_at(j, "", "l2");
  p.base_height = number_at(j, "", "base_height");
  const Json& limits = member(j, "", "joint_limits");
  if (!limits.is_array() || limits.size() != 3) throw JsonFormatError("/joint_limits", "expected 3 [min,max] pairs");
  for (std::size_t k = 0; k < 3; ++k) {
    const std::string path = "/joint_limits/" + std::to_string(k);
    const Json& pair = limits[k];
    if (!pair.is_array() || pair.size() != 2) throw JsonFormatError(path, "expected [min,max]");
    p.joint_limits[k] = {number(pair[0], path + "/0"), number(pair[1], path + "/1")};
  }
  p.max_joint_speed = number_at(j, "", "max_joint_speed");
  p.validate();
  return p;
}

inline ArmProfile arm_profile_from_json_text(std::string_view text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw JsonFormatError("", "malformed JSON");
  return arm_profile_from_json(j);
}

inline Json joints_to_json(const JointState& q) {
  Json j;
  j["theta1"] = q.theta1;
  j["theta2"] = q.theta2;
  j["theta3"] = q.theta3;
  return j;
}

inline Json pose_to_json(const Pose& p) {
  Json j;
  j["x"] = p.x;
  j["y"] = p.y;
  j["z"] = p.z;
  return j;
}

inline Json diagnostic_to_json(const Diagnostic& d) {
  Json j;
  j["command_index"] = d.command_index;
  j["severity"] = std::string(to_string(d.severity));
  j["code"] = d.code;
  j["message"] = d.message;
  return j;
}

inline Json diagnostics_to_json(const std::vector<Diagnostic>& diags) {
  Json arr = Json::array();
  for (const auto& d : diags) arr.push_back(diagnostic_to_json(d));
  return arr;
}

}  // namespace speared
