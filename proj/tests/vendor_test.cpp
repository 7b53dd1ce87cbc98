#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "speared/number_format.hpp"
#include "speared/vendor.hpp"

namespace speared {
namespace {

Program make(std::vector<Command> cmds) { return Program{"main", std::move(cmds)}; }

/// Program with every coordinate snapped to the 1e-3 mm grid.
Program quantized(Program p) {
  for (auto& c : p.commands)
    if (auto* m = std::get_if<Move>(&c)) *m = Move{quantize_millis(m->x), quantize_millis(m->y), quantize_millis(m->z)};
  return p;
}

TEST(TranslateToVendor, DobotExample) {
  EXPECT_EQ(translate_to_vendor(make({Move{200, 0, 50}, Suction{true}}), "dobot-script"), "PTP 200,0,50\nSUCK 1");
}

TEST(TranslateToVendor, GcodeExample) {
  EXPECT_EQ(translate_to_vendor(make({Move{200, 0, 50}, Suction{true}}), "gcode-like"), "G0 X200 Y0 Z50\nM10");
  EXPECT_EQ(translate_to_vendor(make({Suction{false}}), "gcode-like"), "M11");
}

TEST(TranslateToVendor, UnknownDialect) {
  EXPECT_THROW(translate_to_vendor(make({}), "kuka-krl"), UnknownDialect);
  EXPECT_THROW(parse_vendor("", "kuka-krl"), UnknownDialect);
}

TEST(TranslateToVendor, QuantizesToMicrons) {
  EXPECT_EQ(translate_to_vendor(make({Move{1.23456, -0.0004, 2.0005}}), "dobot-script"), "PTP 1.235,0,2.001");
}

TEST(TranslateToVendor, OneLinePerCommand) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    const Program p = testing::random_program(rng, false);
    for (const char* d : {"dobot-script", "gcode-like"}) {
      const std::string text = translate_to_vendor(p, d);
      const std::size_t lines = text.empty() ? 0 : static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')) + 1;
      EXPECT_EQ(lines, p.size());
    }
  }
}

TEST(ParseVendor, AcceptsWhitespaceAndBlankLines) {
  EXPECT_EQ(parse_vendor("  PTP 1, 2 ,3\r\n\nSUCK 0\n", "dobot-script"), make({Move{1, 2, 3}, Suction{false}}));
  EXPECT_EQ(parse_vendor("G0 Z3 X1 Y2\nM10", "gcode-like"), make({Move{1, 2, 3}, Suction{true}}));
}

TEST(ParseVendor, ReportsOffendingLine) {
  auto line_of = [](std::string_view text, std::string_view dialect) -> std::size_t {
    try {
      parse_vendor(text, dialect);
    } catch (const VendorParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("PTP 1,2,3\nMOVJ 1,2,3", "dobot-script"), 2u);
  EXPECT_EQ(line_of("PTP 1,2", "dobot-script"), 1u);
  EXPECT_EQ(line_of("SUCK 2", "dobot-script"), 1u);
  EXPECT_EQ(line_of("\n\nPTP a,2,3", "dobot-script"), 3u);
  EXPECT_EQ(line_of("G0 X1 Y2", "gcode-like"), 1u);
  EXPECT_EQ(line_of("G0 X1 Y2 Z3\nG1 X1 Y2 Z3", "gcode-like"), 2u);
  EXPECT_EQ(line_of("G0 X1 X2 Y2 Z3", "gcode-like"), 1u);
  EXPECT_EQ(line_of("M10 X1", "gcode-like"), 1u);
  EXPECT_EQ(line_of("G0 X1e2 Y2 Z3", "gcode-like"), 1u);
}

TEST(VendorRoundTrip, BothDialectsOnQuantizedPrograms) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 1000; ++i) {
    const Program p = testing::random_program(rng, true);
    for (const char* d : {"dobot-script", "gcode-like"})
      EXPECT_EQ(parse_vendor(translate_to_vendor(p, d), d, p.name), p) << d << " #" << i;
  }
}

TEST(VendorRoundTrip, UnquantizedProgramsLandOnTheGrid) {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 300; ++i) {
    const Program p = testing::random_program(rng, false);
    for (const char* d : {"dobot-script", "gcode-like"})
      EXPECT_EQ(parse_vendor(translate_to_vendor(p, d), d, p.name), quantized(p));
  }
}

TEST(VendorRoundTrip, CrossDialectAgreement) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 300; ++i) {
    const Program p = testing::random_program(rng, false);
    EXPECT_EQ(parse_vendor(translate_to_vendor(p, "dobot-script"), "dobot-script", p.name),
              parse_vendor(translate_to_vendor(p, "gcode-like"), "gcode-like", p.name));
  }
}

class UpperDsl final : public VendorDialect {
 public:
  std::string_view id() const override { return "upper"; }
  std::string format_command(const Command& c) const override {
    if (const auto* m = std::get_if<Move>(&c)) return "MOVE " + format_millis(m->x);
    return "SUCTION";
  }
  Command parse_line(std::string_view line) const override {
    if (line == "SUCTION") return Suction{true};
    throw VendorLineError("nope");
  }
};

TEST(DialectRegistry, ExtensibleWithoutTouchingBuiltins) {
  DialectRegistry r = DialectRegistry::builtin();
  r.add(std::make_shared<UpperDsl>());
  EXPECT_TRUE(r.contains("upper"));
  EXPECT_FALSE(DialectRegistry::builtin().contains("upper"));
  EXPECT_EQ(translate_to_vendor(make({Suction{true}}), "upper", r), "SUCTION");
  EXPECT_EQ((DialectRegistry::builtin().ids()), (std::vector<std::string>{"dobot-script", "gcode-like"}));
}

TEST(NumberFormat, ShortestAndMillis) {
  EXPECT_EQ(format_shortest(0.1), "0.1");
  EXPECT_EQ(format_shortest(-0.0), "0");
  EXPECT_EQ(format_shortest(1e-7), "0.0000001");
  EXPECT_EQ(format_millis(-0.0004), "0");
  EXPECT_EQ(format_millis(12.3456), "12.346");
  EXPECT_EQ(quantize_millis(0.0015), 0.002);
}

}  // namespace
}  // namespace speared
