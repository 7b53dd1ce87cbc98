#pragma once

// Vendor-independent robot program: commands, text grammar, edits and
// validation against an arm profile.
//
// Grammar (one command per line, keywords case-insensitive):
//
//   move <x> <y> <z>      coordinates in the robot base frame, mm
//   suction on|off
//   # comment             anywhere on a line

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "speared/error.hpp"
#include "speared/kinematics.hpp"
#include "speared/number_format.hpp"

namespace speared {

struct Move {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Pose target() const { return {x, y, z}; }
  friend bool operator==(const Move&, const Move&) = default;
};

struct Suction {
  bool enabled = false;
  friend bool operator==(const Suction&, const Suction&) = default;
};

using Command = std::variant<Move, Suction>;

inline constexpr std::size_t kMaxProgramNameLength = 64;
inline constexpr std::string_view kDefaultProgramName = "main";

inline bool is_valid_program_name(std::string_view name) {
  if (name.empty() || name.size() > kMaxProgramNameLength) return false;
  return std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) != 0 || c == '_' || c == '-';
  });
}

struct Program {
  std::string name{kDefaultProgramName};
  std::vector<Command> commands;

  std::size_t size() const { return commands.size(); }
  bool empty() const { return commands.empty(); }

  friend bool operator==(const Program&, const Program&) = default;
};

/// Checks the Program invariants (name syntax, finite coordinates).
inline void check_program(const Program& p) {
  if (!is_valid_program_name(p.name))
    throw InvalidProgram("name must be 1-64 characters of [A-Za-z0-9_-], got '" + p.name + "'");
  for (std::size_t i = 0; i < p.commands.size(); ++i) {
    if (const auto* m = std::get_if<Move>(&p.commands[i]); m && !m->target().is_finite())
      throw InvalidProgram("move at index " + std::to_string(i) + " has non-finite coordinates");
  }
}

// ---------------------------------------------------------------------------
// Text form

namespace detail {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

inline bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char l, char r) {
           return std::tolower(static_cast<unsigned char>(l)) == std::tolower(static_cast<unsigned char>(r));
         });
}

inline std::vector<Token> tokenize_line(std::string_view line) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == '#') break;
    if (line[i] == ' ' || line[i] == '\t') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '#') ++i;
    tokens.push_back({line.substr(start, i - start), start + 1});
  }
  return tokens;
}

/// Column just past the last token, where a missing token was expected.
inline std::size_t end_column(const std::vector<Token>& tokens) {
  const Token& last = tokens.back();
  return last.column + last.text.size();
}

}  // namespace detail

inline Program parse_program(std::string_view text, std::string name = std::string(kDefaultProgramName)) {
  static constexpr const char* kOrdinal[] = {"first coordinate", "second coordinate", "third coordinate"};

  Program program;
  program.name = std::move(name);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    const auto tokens = detail::tokenize_line(line);
    if (tokens.empty()) {
      if (eol == text.size()) break;
      continue;
    }

    const auto& keyword = tokens.front();
    if (detail::iequals(keyword.text, "move")) {
      double xyz[3];
      for (std::size_t k = 0; k < 3; ++k) {
        if (tokens.size() <= k + 1) throw ParseError(line_no, detail::end_column(tokens), kOrdinal[k]);
        const auto value = parse_decimal(tokens[k + 1].text);
        if (!value) throw ParseError(line_no, tokens[k + 1].column, std::string(kOrdinal[k]) + " (finite decimal)");
        xyz[k] = *value;
      }
      if (tokens.size() > 4) throw ParseError(line_no, tokens[4].column, "end of line");
      program.commands.emplace_back(Move{xyz[0], xyz[1], xyz[2]});
    } else if (detail::iequals(keyword.text, "suction")) {
      if (tokens.size() < 2) throw ParseError(line_no, detail::end_column(tokens), "'on' or 'off'");
      bool enabled = false;
      if (detail::iequals(tokens[1].text, "on")) {
        enabled = true;
      } else if (!detail::iequals(tokens[1].text, "off")) {
        throw ParseError(line_no, tokens[1].column, "'on' or 'off'");
      }
      if (tokens.size() > 2) throw ParseError(line_no, tokens[2].column, "end of line");
      program.commands.emplace_back(Suction{enabled});
    } else {
      throw ParseError(line_no, keyword.column, "'move' or 'suction'");
    }
    if (eol == text.size()) break;
  }
  return program;
}

inline std::string serialize_command(const Command& c) {
  if (const auto* m = std::get_if<Move>(&c))
    return "move " + format_shortest(m->x) + " " + format_shortest(m->y) + " " + format_shortest(m->z);
  return std::get<Suction>(c).enabled ? "suction on" : "suction off";
}

/// Canonical text: lowercase keywords, one command per line, no trailing newline.
inline std::string serialize_program(const Program& p) {
  std::string out;
  for (std::size_t i = 0; i < p.commands.size(); ++i) {
    if (i) out += '\n';
    out += serialize_command(p.commands[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Editing

struct AddCommand {
  std::size_t index = 0;
  Command command;
};
struct DeleteCommand {
  std::size_t index = 0;
};
struct ModifyCommand {
  std::size_t index = 0;
  Command command;
};
struct ReorderCommand {
  std::size_t from_index = 0;
  std::size_t to_index = 0;
};

using Edit = std::variant<AddCommand, DeleteCommand, ModifyCommand, ReorderCommand>;

/// Returns the edited copy; `p` is untouched. Add accepts index == size.
inline Program apply_edit(const Program& p, const Edit& e) {
  Program out = p;
  auto& cmds = out.commands;
  const std::size_t n = cmds.size();
  auto require = [n](std::size_t index, std::size_t bound) {
    if (index >= bound) throw IndexOutOfBounds(index, n);
  };

  std::visit(
      [&](const auto& edit) {
        using T = std::decay_t<decltype(edit)>;
        if constexpr (std::is_same_v<T, AddCommand>) {
          require(edit.index, n + 1);
          cmds.insert(cmds.begin() + static_cast<std::ptrdiff_t>(edit.index), edit.command);
        } else if constexpr (std::is_same_v<T, DeleteCommand>) {
          require(edit.index, n);
          cmds.erase(cmds.begin() + static_cast<std::ptrdiff_t>(edit.index));
        } else if constexpr (std::is_same_v<T, ModifyCommand>) {
          require(edit.index, n);
          cmds[edit.index] = edit.command;
        } else {
          require(edit.from_index, n);
          require(edit.to_index, n);
          Command moved = std::move(cmds[edit.from_index]);
          cmds.erase(cmds.begin() + static_cast<std::ptrdiff_t>(edit.from_index));
          cmds.insert(cmds.begin() + static_cast<std::ptrdiff_t>(edit.to_index), std::move(moved));
        }
      },
      e);
  return out;
}

// ---------------------------------------------------------------------------
// Validation

enum class Severity { error, warning };

inline std::string_view to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

struct Diagnostic {
  std::size_t command_index = 0;
  Severity severity = Severity::error;
  std::string code;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

/// One line: "@<index> <severity> <code>: <message>".
inline std::string format_diagnostic(const Diagnostic& d) {
  return "@" + std::to_string(d.command_index) + " " + std::string(to_string(d.severity)) + " " + d.code + ": " +
         d.message;
}

inline bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::error; });
}

/// Diagnostics sorted by command index; empty means executable.
inline std::vector<Diagnostic> validate_program(const Program& p, const ArmProfile& profile) {
  std::vector<Diagnostic> out;
  for (std::size_t i = 0; i < p.commands.size(); ++i) {
    const Command& cmd = p.commands[i];
    if (const auto* m = std::get_if<Move>(&cmd)) {
      if (!m->target().is_finite()) {
        out.push_back({i, Severity::error, "unreachable_target", "move target is not finite"});
        continue;
      }
      const auto sol = solve_inverse_kinematics(profile, m->target());
      if (!sol.joints) {
        out.push_back({i, Severity::error, "unreachable_target",
                       "move " + format_shortest(m->x) + " " + format_shortest(m->y) + " " + format_shortest(m->z) +
                           " is unreachable (" + std::string(to_string(sol.reason)) + ")"});
      }
    } else if (i > 0) {
      const auto* prev = std::get_if<Suction>(&p.commands[i - 1]);
      const auto& cur = std::get<Suction>(cmd);
      if (prev && prev->enabled == cur.enabled) {
        out.push_back({i, Severity::warning, "redundant_suction",
                       std::string("suction is already ") + (cur.enabled ? "on" : "off")});
      }
    }
  }
  return out;
}

}  // namespace speared
