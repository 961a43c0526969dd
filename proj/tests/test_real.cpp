#include <gtest/gtest.h>

#include <chrono>

#include "reference_constants.hpp"
#include "test_util.hpp"
#include "xipow/algebraic.hpp"
#include "xipow/error.hpp"
#include "xipow/real.hpp"

using namespace xipow;
using xipow::testing::decimal;
using xipow::testing::reference_slack;

namespace {

void expect_contract(const MachinePtr& m, const char* reference, std::initializer_list<int> accuracies) {
  Rat ref = decimal(reference);
  for (int n : accuracies) {
    Rat v = approx(m, n);
    EXPECT_LE(abs_rat(v - ref), pow2(-n) + reference_slack(reference)) << m->tag() << " at n=" << n;
  }
}

MachinePtr sqrt2() { return algebraic_machine(canonicalize(UniPoly({-2, 0, 1}), 0, 2)); }

}  // namespace

TEST(Machine, ConstantIsExact) {
  auto m = constant_machine(Rat(7, 3));
  EXPECT_EQ(approx(m, 0), Rat(7, 3));
  EXPECT_EQ(approx(m, 100), Rat(7, 3));
  EXPECT_EQ(m->tag(), "constant");
}

TEST(Machine, AlgebraicSqrt2) {
  auto m = sqrt2();
  expect_contract(m, ref::kSqrt2, {0, 1, 4, 10, 32, 64, 128});
  EXPECT_EQ(m->tag(), "algebraic");
}

TEST(Machine, AlgebraicPointForm) { EXPECT_EQ(approx(algebraic_machine(from_rational(Rat(3, 2))), 20), Rat(3, 2)); }

TEST(Machine, PiDigits) {
  auto m = pi_machine();
  expect_contract(m, ref::kPi, {0, 1, 2, 5, 20, 64, 100});
  Rat v = approx(m, 20);
  EXPECT_LE(abs_rat(v - decimal(ref::kPi)), pow2(-20));
}

TEST(Machine, ExpOfOne) { expect_contract(exp_machine(constant_machine(1)), ref::kE, {0, 4, 8, 16, 32, 64}); }

TEST(Machine, ExpOfMinusOne) {
  expect_contract(exp_machine(constant_machine(-1)), ref::kInvE, {0, 4, 8, 16, 32, 64});
}

TEST(Machine, ExpOfPi) { expect_contract(exp_machine(pi_machine()), ref::kEPi, {0, 4, 8, 16, 32, 64}); }

TEST(Machine, LnOfTwo) { expect_contract(ln_machine(constant_machine(2)), ref::kLn2, {0, 4, 8, 16, 32, 64}); }

TEST(Machine, LnOfOneIsZero) { EXPECT_EQ(approx(ln_machine(constant_machine(1)), 30), 0); }

TEST(Machine, LnOfThirdIsNegative) {
  Rat v = approx(ln_machine(constant_machine(Rat(1, 3))), 30);
  EXPECT_LE(abs_rat(v + decimal(ref::kLn3)), pow2(-30));
}

TEST(Machine, ReciprocalOfLn2) {
  expect_contract(reciprocal(ln_machine(constant_machine(2))), ref::kInvLn2, {0, 4, 8, 16, 32, 64});
}

TEST(Machine, ProductOfSqrts) {
  auto s3 = algebraic_machine(canonicalize(UniPoly({-3, 0, 1}), 1, 2));
  auto m = product(sqrt2(), s3);
  Rat six_root = decimal(ref::kSqrt2) * decimal(ref::kSqrt3);
  for (int n : {0, 8, 30, 64}) EXPECT_LE(abs_rat(approx(m, n) - six_root), pow2(-n) + pow2(-150));
}

TEST(Machine, RoundedHasGridValues) {
  auto m = rounded(pi_machine());
  for (int n : {0, 3, 17}) {
    Rat v = approx(m, n);
    Rat scaled = v * pow2(n + 1);
    EXPECT_EQ(scaled.get_den(), 1);
    EXPECT_LE(abs_rat(v - decimal(ref::kPi)), pow2(-n));
  }
}

TEST(Machine, NegativeAccuracyTreatedAsZero) {
  auto m = pi_machine();
  EXPECT_EQ(m->approx(-5), m->approx(0));
}

TEST(Machine, AccuracyCapIsEnforced) {
  auto m = pi_machine();
  EXPECT_THROW(approx(m, 5000), Error);
  try {
    approx(m, 100, 50);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ResourceLimit);
  }
}

TEST(Machine, MemoizedValuesAreStable) {
  auto m = exp_machine(pi_machine());
  EXPECT_EQ(approx(m, 40), approx(m, 40));
}

TEST(Machine, CriterionOneBudget) {
  auto start = std::chrono::steady_clock::now();
  auto e = exp_machine(constant_machine(1));
  for (int n : {0, 4, 8, 16, 32, 64}) approx(e, n);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  EXPECT_LT(ms.count(), 30000);
}
