#pragma once

// Translation between Program and vendor-specific robot code.
//
//   dobot-script   PTP <x>,<y>,<z>      SUCK <0|1>
//   gcode-like     G0 X<x> Y<y> Z<z>    M10 (suction on) / M11 (suction off)
//
// Coordinates cross this boundary on the 1e-3 mm grid.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "speared/dsl.hpp"
#include "speared/number_format.hpp"

namespace speared {

/// Thrown by VendorDialect::parse_line; parse_vendor adds the line number.
class VendorLineError : public Error {
 public:
  using Error::Error;
};

class VendorDialect {
 public:
  virtual ~VendorDialect() = default;

  virtual std::string_view id() const = 0;
  virtual std::string format_command(const Command& c) const = 0;
  /// `line` is trimmed and non-empty.
  virtual Command parse_line(std::string_view line) const = 0;
};

namespace vendor_detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double coordinate(std::string_view token, std::string_view what) {
  const auto v = parse_decimal(trim(token));
  if (!v) throw VendorLineError("invalid " + std::string(what) + " '" + std::string(token) + "'");
  return quantize_millis(*v);
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

}  // namespace vendor_detail

class DobotScript final : public VendorDialect {
 public:
  std::string_view id() const override { return "dobot-script"; }

  std::string format_command(const Command& c) const override {
    if (const auto* m = std::get_if<Move>(&c))
      return "PTP " + format_millis(m->x) + "," + format_millis(m->y) + "," + format_millis(m->z);
    return std::get<Suction>(c).enabled ? "SUCK 1" : "SUCK 0";
  }

  Command parse_line(std::string_view line) const override {
    using namespace vendor_detail;
    const std::size_t sp = line.find_first_of(" \t");
    const std::string_view op = line.substr(0, sp);
    const std::string_view args = sp == std::string_view::npos ? std::string_view{} : trim(line.substr(sp));
    if (op == "PTP") {
      std::vector<std::string_view> parts;
      std::size_t start = 0;
      while (true) {
        const std::size_t comma = args.find(',', start);
        parts.push_back(args.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
      }
      if (parts.size() != 3) throw VendorLineError("PTP expects 3 comma-separated coordinates");
      return Move{coordinate(parts[0], "x"), coordinate(parts[1], "y"), coordinate(parts[2], "z")};
    }
    if (op == "SUCK") {
      if (args == "1") return Suction{true};
      if (args == "0") return Suction{false};
      throw VendorLineError("SUCK expects 0 or 1");
    }
    throw VendorLineError("unsupported instruction '" + std::string(op) + "'");
  }
};

class GcodeLike final : public VendorDialect {
 public:
  std::string_view id() const override { return "gcode-like"; }

  std::string format_command(const Command& c) const override {
    if (const auto* m = std::get_if<Move>(&c))
      return "G0 X" + format_millis(m->x) + " Y" + format_millis(m->y) + " Z" + format_millis(m->z);
    return std::get<Suction>(c).enabled ? "M10" : "M11";
  }

  Command parse_line(std::string_view line) const override {
    using namespace vendor_detail;
    const auto words = split_ws(line);
    const std::string_view op = words.front();
    if (op == "M10" || op == "M11") {
      if (words.size() != 1) throw VendorLineError(std::string(op) + " takes no arguments");
      return Suction{op == "M10"};
    }
    if (op != "G0") throw VendorLineError("unsupported opcode '" + std::string(op) + "'");

    std::optional<double> axes[3];
    for (std::size_t i = 1; i < words.size(); ++i) {
      const std::string_view w = words[i];
      const char axis = w.front();
      const std::size_t k = axis == 'X' ? 0 : axis == 'Y' ? 1 : axis == 'Z' ? 2 : 3;
      if (k == 3) throw VendorLineError("unsupported word '" + std::string(w) + "'");
      if (axes[k]) throw VendorLineError(std::string("repeated axis ") + axis);
      axes[k] = coordinate(w.substr(1), std::string(1, axis));
    }
    if (!axes[0] || !axes[1] || !axes[2]) throw VendorLineError("G0 requires X, Y and Z");
    return Move{*axes[0], *axes[1], *axes[2]};
  }
};

/// Dialects by id. builtin() holds dobot-script and gcode-like; add() extends.
class DialectRegistry {
 public:
  static const DialectRegistry& builtin() {
    static const DialectRegistry registry = [] {
      DialectRegistry r;
      r.add(std::make_shared<DobotScript>());
      r.add(std::make_shared<GcodeLike>());
      return r;
    }();
    return registry;
  }

  void add(std::shared_ptr<const VendorDialect> dialect) {
    const std::string key(dialect->id());
    dialects_[key] = std::move(dialect);
  }

  const VendorDialect& get(std::string_view id) const {
    auto it = dialects_.find(std::string(id));
    if (it == dialects_.end()) throw UnknownDialect(id);
    return *it->second;
  }

  bool contains(std::string_view id) const { return dialects_.count(std::string(id)) != 0; }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& [key, _] : dialects_) out.push_back(key);
    return out;
  }

 private:
  std::map<std::string, std::shared_ptr<const VendorDialect>> dialects_;
};

/// One line per command, no trailing newline.
inline std::string translate_to_vendor(const Program& p, std::string_view dialect,
                                       const DialectRegistry& registry = DialectRegistry::builtin()) {
  const VendorDialect& d = registry.get(dialect);
  std::string out;
  for (std::size_t i = 0; i < p.commands.size(); ++i) {
    if (i) out += '\n';
    out += d.format_command(p.commands[i]);
  }
  return out;
}

/// Blank lines are skipped; any other unrecognized line is an error.
inline Program parse_vendor(std::string_view text, std::string_view dialect,
                            std::string name = std::string(kDefaultProgramName),
                            const DialectRegistry& registry = DialectRegistry::builtin()) {
  const VendorDialect& d = registry.get(dialect);
  Program p;
  p.name = std::move(name);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    const std::string_view line = vendor_detail::trim(text.substr(pos, eol - pos));
    ++line_no;
    pos = eol + 1;
    if (line.empty()) continue;
    try {
      p.commands.push_back(d.parse_line(line));
    } catch (const VendorLineError& e) {
      throw VendorParseError(line_no, e.what());
    }
  }
  return p;
}

}  // namespace speared
