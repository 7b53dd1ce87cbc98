#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace speared {

/// Shortest fixed-notation text that parses back to exactly `v`.
inline std::string format_shortest(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[400];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  if (ec != std::errc{}) return std::to_string(v);
  return {buf, end};
}

/// Rounds to the 1e-3 mm grid used at vendor boundaries.
inline double quantize_millis(double v) {
  const double q = std::round(v * 1000.0) / 1000.0;
  return q == 0.0 ? 0.0 : q;
}

/// Up to three decimals, trailing zeros trimmed ("100", "-1.5", "0.125").
inline std::string format_millis(double v) {
  const long long milli = std::llround(v * 1000.0);
  if (milli == 0) return "0";
  const unsigned long long mag = milli < 0 ? static_cast<unsigned long long>(-milli) : milli;
  std::string out = milli < 0 ? "-" : "";
  out += std::to_string(mag / 1000);
  unsigned long long frac = mag % 1000;
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 3 - digits.size(), '0');
    while (digits.back() == '0') digits.pop_back();
    out += '.';
    out += digits;
  }
  return out;
}

/// Parses a plain decimal: optional sign, digits, optional fraction. No
/// exponent, no inf/nan. Returns nullopt for anything else.
inline std::optional<double> parse_decimal(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '+' || body.front() == '-')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  if (body.empty()) return std::nullopt;
  std::size_t digits = 0;
  std::size_t dots = 0;
  for (char ch : body) {
    if (ch >= '0' && ch <= '9') {
      ++digits;
    } else if (ch == '.') {
      ++dots;
    } else {
      return std::nullopt;
    }
  }
  if (digits == 0 || dots > 1) return std::nullopt;

  double value = 0.0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value, std::chars_format::fixed);
  if (ec != std::errc{} || ptr != body.data() + body.size() || !std::isfinite(value)) return std::nullopt;
  return negative ? -value : value;
}

}  // namespace speared
