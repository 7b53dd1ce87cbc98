// speared: headless entry points.
//
//   speared serve     [--scene F] [--profile F] [--port N] [--speed X]
//   speared run       --program F [--scene F] [--profile F] [--speed X] [--dt S] [--report F] [--json]
//   speared validate  --program F [--profile F] [--json]
//   speared translate --program F --dialect D [--json]
//
// Exit codes: 0 ok, 1 validation errors (validate) or bind failure (serve),
// 2 usage / unreadable input, 3 collision (run), 4 validation failure (run).

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "speared/speared.hpp"
#include "speared/tcp.hpp"

namespace {

using namespace speared;

constexpr int kExitOk = 0;
constexpr int kExitDiagnostics = 1;
constexpr int kExitBind = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCollision = 3;
constexpr int kExitValidation = 4;

/// Thrown for unreadable or malformed inputs; maps to exit 2.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string program_name_for(const std::string& path) {
  const std::string stem = std::filesystem::path(path).stem().string();
  return is_valid_program_name(stem) ? stem : std::string(kDefaultProgramName);
}

/// .json interchange, .dobot / .gco vendor text, anything else DSL text.
Program load_program(const std::string& path) {
  const std::string text = read_file(path);
  const std::string ext = std::filesystem::path(path).extension().string();
  try {
    if (ext == ".json") return program_from_json_text(text);
    if (ext == ".dobot") return parse_vendor(text, "dobot-script", program_name_for(path));
    if (ext == ".gco") return parse_vendor(text, "gcode-like", program_name_for(path));
    return parse_program(text, program_name_for(path));
  } catch (const Error& e) {
    throw InputError(path + ": " + e.what());
  }
}

ArmProfile load_profile(const std::string& path) {
  if (path.empty()) return default_arm_profile();
  try {
    return arm_profile_from_json_text(read_file(path));
  } catch (const Error& e) {
    throw InputError(path + ": " + e.what());
  }
}

Scene load_scene_or_empty(const std::string& path) {
  if (path.empty()) return Scene{};
  try {
    return load_scene(read_file(path));
  } catch (const Error& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_output(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

struct Options {
  std::string scene;
  std::string program;
  std::string profile;
  std::string dialect;
  std::string report;
  int port = 0;
  double speed = 1.0;
  double dt = 0.01;
  int tick_ms = 10;
  bool json = false;
};

int cmd_run(const Options& o) {
  const Program program = load_program(o.program);
  Simulator sim(load_profile(o.profile), load_scene_or_empty(o.scene));
  sim.set_physics(SetSpeed{o.speed});

  RunResult run;
  try {
    run = run_program(sim, program, o.dt);
  } catch (const ValidationFailed& e) {
    for (const auto& d : e.diagnostics()) std::cerr << format_diagnostic(d) << '\n';
    const std::string report = make_validation_report(program, e.diagnostics()).dump(2) + "\n";
    if (!o.report.empty()) write_output(o.report, report);
    if (o.json) std::cout << report;
    return kExitValidation;
  }

  const std::string report = make_report(program, run, sim).dump(2) + "\n";
  if (!o.report.empty()) write_output(o.report, report);
  if (o.json) {
    std::cout << report;
  } else {
    for (const auto& e : run.events) {
      if (e.is<JointStateChanged>() || e.is<TrajectoryPlanned>()) continue;
      std::cout << sim_event_to_json(e).dump() << '\n';
    }
    std::cout << "status: " << to_string(run.status) << " at t=" << run.completion_clock << " s\n";
  }
  return run.status == FinishStatus::collision ? kExitCollision : kExitOk;
}

int cmd_validate(const Options& o) {
  const Program program = load_program(o.program);
  const auto diags = validate_program(program, load_profile(o.profile));
  if (o.json) {
    std::cout << diagnostics_to_json(diags).dump(2) << '\n';
  } else {
    for (const auto& d : diags) std::cout << format_diagnostic(d) << '\n';
  }
  return has_errors(diags) ? kExitDiagnostics : kExitOk;
}

int cmd_translate(const Options& o) {
  const Program program = load_program(o.program);
  std::string text;
  if (o.dialect == "dsl") {
    text = serialize_program(program);
  } else {
    try {
      text = translate_to_vendor(program, o.dialect);
    } catch (const UnknownDialect& e) {
      throw InputError(e.what());
    }
  }
  if (o.json) {
    Json j;
    j["dialect"] = o.dialect;
    j["text"] = text;
    std::cout << j.dump() << '\n';
  } else {
    std::cout << text;
  }
  return kExitOk;
}

volatile std::sig_atomic_t g_stop = 0;

int cmd_serve(const Options& o) {
  Simulator sim(load_profile(o.profile), load_scene_or_empty(o.scene));
  sim.set_physics(SetSpeed{o.speed});
  MessageService service(std::move(sim));

  ServerOptions opts;
  opts.port = static_cast<std::uint16_t>(o.port);
  opts.tick_dt = o.dt;
  opts.tick_period = std::chrono::milliseconds(o.tick_ms);
  Server server(service, opts);
  std::signal(SIGINT, [](int) { g_stop = 1; });
  std::signal(SIGTERM, [](int) { g_stop = 1; });
  try {
    server.start();
  } catch (const BindError& e) {
    std::cerr << "speared serve: " << e.what() << '\n';
    return kExitBind;
  }
  std::cerr << "speared: listening on port " << server.port() << std::endl;
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return kExitOk;
}

int default_port() {
  const char* env = std::getenv(kPortEnvVar);
  if (!env) return kDefaultPort;
  try {
    return std::stoi(env);
  } catch (const std::exception&) {
    return 0;  // rejected by the range check
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robot programming workbench: simulator, message service and program tools"};
  app.require_subcommand(1);
  Options o;
  o.port = default_port();

  auto positive = CLI::PositiveNumber;

  auto* serve = app.add_subcommand("serve", "Serve the message service over TCP");
  serve->add_option("--scene", o.scene, "Scene JSON file")->check(CLI::ExistingFile);
  serve->add_option("--profile", o.profile, "Arm profile JSON file")->check(CLI::ExistingFile);
  serve->add_option("--port", o.port, "TCP port (env SPEARED_PORT, default 9870)");
  serve->add_option("--speed", o.speed, "Initial physics speed factor")->check(positive);
  serve->add_option("--dt", o.dt, "Simulated seconds per tick")->check(positive);
  serve->add_option("--tick-ms", o.tick_ms, "Wall milliseconds between ticks")->check(CLI::Range(1, 10000));

  auto* run = app.add_subcommand("run", "Execute a program headlessly and emit an execution report");
  run->add_option("--program", o.program, "Program file (.rbt, .json, .dobot, .gco)")->required()->check(CLI::ExistingFile);
  run->add_option("--scene", o.scene, "Scene JSON file")->check(CLI::ExistingFile);
  run->add_option("--profile", o.profile, "Arm profile JSON file")->check(CLI::ExistingFile);
  run->add_option("--speed", o.speed, "Physics speed factor")->check(positive);
  run->add_option("--dt", o.dt, "Step size in seconds")->check(positive);
  run->add_option("--report", o.report, "Write the JSON report to this file");
  run->add_flag("--json", o.json, "Print the JSON report to stdout");

  auto* validate = app.add_subcommand("validate", "Check a program against the arm's reachability");
  validate->add_option("--program", o.program, "Program file")->required()->check(CLI::ExistingFile);
  validate->add_option("--profile", o.profile, "Arm profile JSON file")->check(CLI::ExistingFile);
  validate->add_flag("--json", o.json, "Print diagnostics as JSON");

  auto* translate = app.add_subcommand("translate", "Translate a program to vendor code");
  translate->add_option("--program", o.program, "Program file")->required()->check(CLI::ExistingFile);
  translate->add_option("--dialect", o.dialect, "dobot-script | gcode-like | dsl")->required();
  translate->add_flag("--json", o.json, "Wrap the output in JSON");

  try {
    app.parse(argc, argv);
    if (serve->parsed() && (o.port < 1 || o.port > 65535)) throw CLI::ValidationError("--port", "must be in [1, 65535]");
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (serve->parsed()) return cmd_serve(o);
    if (run->parsed()) return cmd_run(o);
    if (validate->parsed()) return cmd_validate(o);
    return cmd_translate(o);
  } catch (const InputError& e) {
    std::cerr << "speared: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "speared: " << e.what() << '\n';
    return kExitUsage;
  }
}
