#pragma once

// Wire envelope: one JSON object per newline-free text frame.
//
//   {"kind": "call"|"reply"|"subscribe"|"event"|"error",
//    "id": "<client correlation id>", "channel": "service:..."|"topic:...",
//    "payload": {...}}

#include <array>
#include <string>
#include <string_view>

#include "speared/serialization.hpp"

namespace speared {

inline constexpr std::array<std::string_view, 5> kEnvelopeKinds = {"call", "reply", "subscribe", "event", "error"};

struct Envelope {
  std::string kind;
  std::string id;
  std::string channel;
  Json payload = Json::object();

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

/// Error raised while serving a frame; becomes an error envelope.
class ProtocolError : public Error {
 public:
  ProtocolError(std::string code, const std::string& message, Json extra = Json::object())
      : Error(message), code_(std::move(code)), extra_(std::move(extra)) {}

  const std::string& code() const { return code_; }
  const Json& extra() const { return extra_; }

 private:
  std::string code_;
  Json extra_;
};

inline std::string to_frame(const Envelope& e) {
  Json j;
  j["kind"] = e.kind;
  j["id"] = e.id;
  j["channel"] = e.channel;
  j["payload"] = e.payload;
  return j.dump();
}

inline Envelope make_error(std::string id, std::string channel, const ProtocolError& err) {
  Json payload;
  payload["code"] = err.code();
  payload["message"] = err.what();
  for (const auto& [k, v] : err.extra().items()) payload[k] = v;
  return {"error", std::move(id), std::move(channel), std::move(payload)};
}

/// Parses and checks one frame. On failure throws ProtocolError("bad_payload")
/// and reports whatever id/channel could be recovered through `id_out` /
/// `channel_out`.
inline Envelope parse_envelope(std::string_view frame, std::string* id_out = nullptr,
                               std::string* channel_out = nullptr) {
  Json j = Json::parse(frame, nullptr, false);
  if (j.is_discarded()) throw ProtocolError("bad_payload", "malformed JSON frame");
  if (!j.is_object()) throw ProtocolError("bad_payload", "frame must be a JSON object");

  auto text_field = [&](const char* key, bool required) -> std::string {
    auto it = j.find(key);
    if (it == j.end()) {
      if (required) throw ProtocolError("bad_payload", std::string("missing field '") + key + "'");
      return {};
    }
    if (!it->is_string()) throw ProtocolError("bad_payload", std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
  };

  Envelope e;
  if (auto it = j.find("id"); it != j.end() && it->is_string() && id_out) *id_out = it->get<std::string>();
  if (auto it = j.find("channel"); it != j.end() && it->is_string() && channel_out)
    *channel_out = it->get<std::string>();
  e.id = text_field("id", true);
  e.channel = text_field("channel", true);
  e.kind = text_field("kind", true);
  bool known = false;
  for (auto k : kEnvelopeKinds) known = known || k == e.kind;
  if (!known) throw ProtocolError("bad_payload", "unknown kind '" + e.kind + "'");
  if (auto it = j.find("payload"); it != j.end()) {
    if (!it->is_object()) throw ProtocolError("bad_payload", "payload must be an object");
    e.payload = *it;
  }
  return e;
}

}  // namespace speared
