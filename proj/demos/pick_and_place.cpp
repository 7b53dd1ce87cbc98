// Runs the pick-and-place program against the yellow-cube scene and prints
// the discrete events plus the cube's final resting place.

#include <fstream>
#include <iostream>
#include <sstream>

#include "speared/speared.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main() {
  using namespace speared;
  const std::string data = SPEARED_DATA_DIR;

  const Scene scene = load_scene_file(data + "/scenes/yellow_cube.json");
  const Program program = parse_program(read_file(data + "/programs/pick_place.rbt"), "pick_place");

  Simulator sim(default_arm_profile(), scene);
  const RunResult run = run_program(sim, program, 0.01);

  for (const auto& e : run.events) {
    if (e.is<JointStateChanged>() || e.is<TrajectoryPlanned>()) continue;
    std::cout << sim_event_to_json(e).dump() << '\n';
  }
  for (const auto& obj : sim.detect_objects()) {
    std::cout << obj.id << " rests at (" << obj.center.x << ", " << obj.center.y << ", " << obj.center.z << ")\n";
  }
  std::cout << "vendor code (dobot-script):\n" << translate_to_vendor(program, "dobot-script") << '\n';
  return run.status == FinishStatus::success ? 0 : 3;
}
