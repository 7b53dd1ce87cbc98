#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "speared/pose.hpp"

namespace speared {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidProfile : public Error {
 public:
  explicit InvalidProfile(const std::string& what) : Error("invalid arm profile: " + what) {}
};

enum class UnreachableReason { out_of_envelope, joint_limit };

inline std::string_view to_string(UnreachableReason r) {
  return r == UnreachableReason::out_of_envelope ? "out_of_envelope" : "joint_limit";
}

class Unreachable : public Error {
 public:
  Unreachable(UnreachableReason reason, const Pose& target)
      : Error("target (" + std::to_string(target.x) + ", " + std::to_string(target.y) + ", " +
              std::to_string(target.z) + ") is unreachable: " + std::string(to_string(reason))),
        reason_(reason),
        target_(target) {}

  UnreachableReason reason() const { return reason_; }
  const Pose& target() const { return target_; }

 private:
  UnreachableReason reason_;
  Pose target_;
};

class InvalidWaypointCount : public Error {
 public:
  explicit InvalidWaypointCount(std::size_t n)
      : Error("trajectory needs at least 2 waypoints, got " + std::to_string(n)) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, std::string expected)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": expected " + expected),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string expected_;
};

class IndexOutOfBounds : public Error {
 public:
  IndexOutOfBounds(std::size_t index, std::size_t size)
      : Error("index " + std::to_string(index) + " out of bounds for program of length " + std::to_string(size)) {}
};

class InvalidProgram : public Error {
 public:
  explicit InvalidProgram(const std::string& what) : Error("invalid program: " + what) {}
};

class UnknownDialect : public Error {
 public:
  explicit UnknownDialect(std::string_view id) : Error("unknown vendor dialect '" + std::string(id) + "'") {}
};

class VendorParseError : public Error {
 public:
  VendorParseError(std::size_t line, std::string reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line), reason_(std::move(reason)) {}

  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class SceneFormatError : public Error {
 public:
  SceneFormatError(std::string path, std::string reason)
      : Error("scene " + (path.empty() ? std::string("/") : path) + ": " + reason),
        path_(std::move(path)),
        reason_(std::move(reason)) {}

  /// JSON pointer to the offending element.
  const std::string& path() const { return path_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string path_;
  std::string reason_;
};

class DuplicateObjectId : public Error {
 public:
  explicit DuplicateObjectId(const std::string& id) : Error("duplicate object id '" + id + "'"), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class NotIdle : public Error {
 public:
  NotIdle() : Error("simulator is executing a program") {}
};

class InvalidFactor : public Error {
 public:
  explicit InvalidFactor(double f) : Error("speed factor must be finite and > 0, got " + std::to_string(f)) {}
};

}  // namespace speared
