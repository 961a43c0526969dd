#include <gtest/gtest.h>

#include "reference_constants.hpp"
#include "test_util.hpp"
#include "xipow/error.hpp"
#include "xipow/numeric.hpp"

using namespace xipow;
using xipow::testing::decimal;

TEST(Numeric, ParseAndPrintRationals) {
  EXPECT_EQ(parse_rat("3/6"), Rat(1, 2));
  EXPECT_EQ(parse_rat("-7"), Rat(-7));
  EXPECT_EQ(to_string(parse_rat("-4/6")), "-2/3");
  EXPECT_EQ(to_string(Rat(5)), "5");
  EXPECT_THROW(parse_rat("1/0"), Error);
  EXPECT_THROW(parse_rat("abc"), Error);
}

TEST(Numeric, FloorCeil) {
  EXPECT_EQ(floor_rat(Rat(-3, 2)), -2);
  EXPECT_EQ(ceil_rat(Rat(-3, 2)), -1);
  EXPECT_EQ(floor_rat(Rat(4)), 4);
  EXPECT_EQ(ceil_rat(Rat(7, 3)), 3);
}

TEST(Numeric, Logs) {
  EXPECT_EQ(ceil_log2(Rat(1)), 0);
  EXPECT_EQ(ceil_log2(Rat(5)), 3);
  EXPECT_EQ(ceil_log2(Rat(1, 3)), -1);
  EXPECT_EQ(floor_log2(Rat(5)), 2);
  EXPECT_EQ(floor_log2(Rat(1, 3)), -2);
  EXPECT_EQ(bit_length(Int(8)), 4u);
  EXPECT_EQ(bit_length(Int(0)), 0u);
}

TEST(Numeric, GridRounding) {
  Rat x(5, 7);
  for (int b : {0, 3, 10, 40}) {
    EXPECT_LE(abs_rat(round_to_grid(x, b) - x), pow2(-b - 1));
    EXPECT_LE(floor_to_grid(x, b), x);
    EXPECT_GE(ceil_to_grid(x, b), x);
  }
}

TEST(Numeric, LnEnclosureContainsReference) {
  auto [lo, hi] = ln_enclosure(Rat(2), 60);
  Rat ref = decimal(ref::kLn2);
  EXPECT_LE(lo, ref);
  EXPECT_GE(hi, ref);
  EXPECT_LE(hi - lo, pow2(-60));
  auto [l3, h3] = ln_enclosure(Rat(1, 3), 30);
  EXPECT_LE(l3, -decimal(ref::kLn3));
  EXPECT_GE(h3, -decimal(ref::kLn3));
  EXPECT_EQ(ceil_ln(Rat(1)), 0);
  EXPECT_EQ(ceil_ln(Rat(3)), 2);
  EXPECT_EQ(ceil_ln(Rat(1, 3)), -1);
}

TEST(Numeric, RootBounds) {
  Rat s = decimal(ref::kSqrt2);
  Rat lo = root_lower(Rat(2), 2, 40), hi = root_upper(Rat(2), 2, 40);
  EXPECT_LE(lo, s);
  EXPECT_GE(hi, s);
  EXPECT_LE(hi - lo, pow2(-39));
  EXPECT_EQ(root_upper(Rat(8), 3, 10) >= 2, true);
  EXPECT_EQ(root_lower(Rat(8), 3, 10) <= 2, true);
}
