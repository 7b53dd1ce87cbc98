#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "speared/collision.hpp"
#include "speared/kinematics.hpp"
#include "speared/serialization.hpp"

namespace speared {

struct SceneObject {
  std::string id;
  Pose center;  ///< world frame, mm
  Pose size;    ///< sx, sy, sz
  std::string color;
  bool attached = false;  ///< held by the suction cup

  Aabb bounds() const { return Aabb::from_center_size(center, size); }
  Pose top_center() const { return {center.x, center.y, center.z + size.z * 0.5}; }

  friend bool operator==(const SceneObject&, const SceneObject&) = default;
};

/// Placement of the robot base frame in the world frame.
struct RobotBase {
  Pose translation;
  double yaw = 0.0;  ///< degrees about world z

  friend bool operator==(const RobotBase&, const RobotBase&) = default;
};

struct Scene {
  RobotBase robot_base;
  std::vector<SceneObject> objects;

  SceneObject* find(std::string_view id) {
    for (auto& o : objects)
      if (o.id == id) return &o;
    return nullptr;
  }
  const SceneObject* find(std::string_view id) const { return const_cast<Scene*>(this)->find(id); }

  friend bool operator==(const Scene&, const Scene&) = default;
};

namespace scene_detail {

/// sin/cos of an angle in degrees, exact at multiples of 90.
inline std::pair<double, double> sin_cos_deg(double deg) {
  const double quarter = deg / 90.0;
  if (quarter == std::floor(quarter) && std::abs(quarter) < 1e15) {
    const long long k = ((static_cast<long long>(quarter) % 4) + 4) % 4;
    static constexpr double kSin[4] = {0.0, 1.0, 0.0, -1.0};
    static constexpr double kCos[4] = {1.0, 0.0, -1.0, 0.0};
    return {kSin[k], kCos[k]};
  }
  const double rad = deg_to_rad(deg);
  return {std::sin(rad), std::cos(rad)};
}

}  // namespace scene_detail

/// Subtract the base translation, then rotate by -yaw about z.
inline Pose world_to_robot(const Scene& scene, const Pose& world) {
  const auto [s, c] = scene_detail::sin_cos_deg(scene.robot_base.yaw);
  const Pose d = world - scene.robot_base.translation;
  return {c * d.x + s * d.y, -s * d.x + c * d.y, d.z};
}

inline Pose robot_to_world(const Scene& scene, const Pose& robot) {
  const auto [s, c] = scene_detail::sin_cos_deg(scene.robot_base.yaw);
  return Pose{c * robot.x - s * robot.y, s * robot.x + c * robot.y, robot.z} + scene.robot_base.translation;
}

// --- JSON ------------------------------------------------------------------
//
// {"robot_base":{"translation":[x,y,z],"yaw":deg},
//  "objects":[{"id":str,"center":[x,y,z],"size":[sx,sy,sz],"color":str}]}

inline Scene scene_from_json(const Json& j) {
  using namespace json_detail;
  Scene scene;
  try {
    const Json& base = member(j, "", "robot_base");
    scene.robot_base.translation = vec3(member(base, "/robot_base", "translation"), "/robot_base/translation");
    scene.robot_base.yaw = number_at(base, "/robot_base", "yaw");

    const Json& objects = member(j, "", "objects");
    if (!objects.is_array()) throw JsonFormatError("/objects", "expected an array");
    for (std::size_t i = 0; i < objects.size(); ++i) {
      const std::string path = "/objects/" + std::to_string(i);
      const Json& o = objects[i];
      SceneObject obj;
      obj.id = string_at(o, path, "id");
      if (obj.id.empty()) throw JsonFormatError(path + "/id", "must not be empty");
      obj.center = vec3(member(o, path, "center"), path + "/center");
      obj.size = vec3(member(o, path, "size"), path + "/size");
      if (!(obj.size.x > 0 && obj.size.y > 0 && obj.size.z > 0))
        throw JsonFormatError(path + "/size", "components must be > 0");
      obj.color = string_at(o, path, "color");
      scene.objects.push_back(std::move(obj));
    }
  } catch (const JsonFormatError& e) {
    throw SceneFormatError(e.path(), e.reason());
  }

  std::set<std::string> seen;
  for (const auto& o : scene.objects)
    if (!seen.insert(o.id).second) throw DuplicateObjectId(o.id);
  return scene;
}

inline Scene load_scene(std::string_view text) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) throw SceneFormatError("", "malformed JSON");
  return scene_from_json(j);
}

inline Scene load_scene_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SceneFormatError("", "cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return load_scene(buf.str());
}

inline Json object_to_json(const SceneObject& o) {
  Json j;
  j["id"] = o.id;
  j["center"] = Json::array({o.center.x, o.center.y, o.center.z});
  j["size"] = Json::array({o.size.x, o.size.y, o.size.z});
  j["color"] = o.color;
  j["attached"] = o.attached;
  return j;
}

inline Json objects_to_json(const std::vector<SceneObject>& objects) {
  Json arr = Json::array();
  for (const auto& o : objects) arr.push_back(object_to_json(o));
  return arr;
}

inline Json scene_to_json(const Scene& scene) {
  Json j;
  j["robot_base"]["translation"] = Json::array(
      {scene.robot_base.translation.x, scene.robot_base.translation.y, scene.robot_base.translation.z});
  j["robot_base"]["yaw"] = scene.robot_base.yaw;
  j["objects"] = Json::array();
  for (const auto& o : scene.objects) {
    Json oj = object_to_json(o);
    oj.erase("attached");
    j["objects"].push_back(std::move(oj));
  }
  return j;
}

}  // namespace speared
