#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mpfr_util.hpp"
#include "reference_constants.hpp"
#include "test_util.hpp"
#include "xipow/barrier.hpp"
#include "xipow/error.hpp"
#include "xipow/sign.hpp"

using namespace xipow;
using xipow::testing::Big;
using xipow::testing::decimal;

namespace {

AlgebraicNumber sqrt2() { return canonicalize(UniPoly({-2, 0, 1}), 1, 2); }

RawBase raw_of(BaseKind k) {
  RawBase r;
  r.kind = k;
  return r;
}

}  // namespace

TEST(AlgebraicBarrier, Examples) {
  auto b2 = algebraic_barrier(from_rational(2));
  EXPECT_EQ(b2.c, 3);
  EXPECT_EQ(b2.k, 1u);
  auto bs = algebraic_barrier(sqrt2());
  EXPECT_EQ(bs.c, 4);
  EXPECT_EQ(bs.k, 1u);
  EXPECT_EQ(bs.provenance, BarrierProvenance::AlgebraicDerived);
}

TEST(AlgebraicBarrier, DominatesExplicitBoundForBaseTwo) {
  // deg q (ln(d+1) + ln h) + d (ln(deg q + 1) + ln height q) with q = x - 2.
  for (int d = 1; d <= 10; ++d)
    for (double h : {1.0, 10.0, 100.0}) {
      double bound = std::log(d + 1.0) + std::log(h) + d * std::log(4.0);
      EXPECT_GE(3.0 * (d + std::ceil(std::log(h))), bound) << d << " " << h;
    }
}

TEST(AlgebraicBarrier, HoldsOnRandomPolynomials) {
  auto base = base_algebraic(sqrt2());
  ASSERT_TRUE(base.barrier);
  Big xi(800);
  mpfr_sqrt_ui(xi.get(), 2, MPFR_RNDN);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<long> coef(-50, 50), deg(1, 8);
  int tested = 0;
  while (tested < 200) {
    std::vector<Int> c;
    int d = deg(rng);
    for (int i = 0; i <= d; ++i) c.push_back(coef(rng));
    if (c.back() == 0) c.back() = 1;
    UniPoly p(c);
    UniPoly g = gcd(p, UniPoly({-2, 0, 1}));
    if (g.degree() >= 1 && sturm_count(g, 1, 2) >= 1) continue;
    double lhs = xipow::testing::ln_abs(xipow::testing::eval(p, xi));
    double sigma = base.barrier->sigma(p.degree(), p.height()).get_d();
    EXPECT_GE(lhs, -sigma + 1e-9);
    ++tested;
  }
}

TEST(CatalogBarrier, ExplicitRows) {
  auto pi = catalog_barrier(BaseKind::Pi, {});
  EXPECT_EQ(pi.c, pow2_int(41));
  EXPECT_EQ(pi.k, 4u);
  EXPECT_EQ(pi.provenance, BarrierProvenance::Table);
  auto epi = catalog_barrier(BaseKind::EPowPi, {});
  EXPECT_EQ(epi.c, pow2_int(61));
  EXPECT_EQ(epi.k, 5u);
}

TEST(CatalogBarrier, MissingConstant) {
  try {
    catalog_barrier(BaseKind::EPowEta, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingConstant);
  }
  auto ln = catalog_barrier(BaseKind::LnAlpha, {{"c_alpha", Int(1000)}});
  EXPECT_EQ(ln.c, 1000);
  EXPECT_EQ(ln.k, 4u);
}

TEST(CatalogBarrier, DominatesTableOnGrid) {
  const std::map<BaseKind, const char*> names{{BaseKind::EPowEta, "c_eta"},
                                              {BaseKind::AlphaPowEta, "c_alpha_eta"},
                                              {BaseKind::LnAlpha, "c_alpha"},
                                              {BaseKind::LnRatio, "c_alpha_beta"}};
  std::map<std::string, Int> consts{{"c_eta", Int(7)}, {"c_alpha_eta", Int(7)}, {"c_alpha", Int(1000)},
                                    {"c_alpha_beta", Int(7)}};
  for (BaseKind k : {BaseKind::Pi, BaseKind::EPowPi, BaseKind::EPowEta, BaseKind::AlphaPowEta, BaseKind::LnAlpha,
                     BaseKind::LnRatio}) {
    RootBarrier b = catalog_barrier(k, consts);
    double c = names.count(k) ? consts.at(names.at(k)).get_d() : 0.0;
    for (int d = 1; d <= 20; ++d)
      for (long h : {16L, 1000L, 1000000L}) {
        double table = table_measure(k, c, d, static_cast<double>(h));
        double sigma = b.sigma(d, Int(h)).get_d();
        EXPECT_GE(sigma, table) << base_kind_name(k) << " d=" << d << " h=" << h;
      }
  }
}

TEST(ClassifyBase, PiIsTranscendentalWithTableBarrier) {
  auto b = classify_base(raw_of(BaseKind::Pi));
  EXPECT_TRUE(b.transcendental);
  ASSERT_TRUE(b.barrier);
  EXPECT_EQ(b.barrier->c, pow2_int(41));
  EXPECT_EQ(b.barrier->k, 4u);
  EXPECT_LE(abs_rat(approx(b.machine, 40) - decimal(ref::kPi)), pow2(-40));
}

TEST(ClassifyBase, AlphaPowRationalEtaIsAlgebraic) {
  RawBase r = raw_of(BaseKind::AlphaPowEta);
  r.alpha = from_rational(2);
  r.eta = from_rational(Rat(3, 2));
  auto b = classify_base(r);
  EXPECT_EQ(b.kind, BaseKind::Algebraic);
  EXPECT_FALSE(b.transcendental);
  ASSERT_TRUE(b.barrier);
  EXPECT_EQ(b.barrier->k, 1u);
  Rat two_32 = decimal(ref::kSqrt2) * 2;
  EXPECT_LE(abs_rat(approx(b.machine, 30) - two_32), pow2(-30) + pow2(-100));
}

TEST(ClassifyBase, LnRatioDependentIsRational) {
  RawBase r = raw_of(BaseKind::LnRatio);
  r.alpha = from_rational(8);
  r.beta = from_rational(2);
  auto b = classify_base(r);
  EXPECT_EQ(b.kind, BaseKind::Natural);
  EXPECT_EQ(*b.natural, 3);
}

TEST(ClassifyBase, LnRatioIndependentIsTranscendental) {
  RawBase r = raw_of(BaseKind::LnRatio);
  r.alpha = from_rational(3);
  r.beta = from_rational(2);
  r.dependence_bound = 8;
  auto b = classify_base(r);
  EXPECT_TRUE(b.transcendental);
  EXPECT_FALSE(b.barrier.has_value());
  EXPECT_FALSE(b.barrier_note.empty());
  Rat ref = decimal(ref::kLn3) / decimal(ref::kLn2);
  EXPECT_LE(abs_rat(approx(b.machine, 30) - ref), pow2(-30) + pow2(-100));
}

TEST(ClassifyBase, MachineContracts) {
  RawBase ln2 = raw_of(BaseKind::LnAlpha);
  ln2.alpha = from_rational(2);
  auto b1 = classify_base(ln2);
  auto b2 = classify_base(raw_of(BaseKind::EPowPi));
  RawBase s = raw_of(BaseKind::AlphaPowEta);
  s.alpha = from_rational(2);
  s.eta = from_rational(Rat(1, 2));
  auto b3 = classify_base(s);
  for (int n : {0, 8, 32, 64}) {
    EXPECT_LE(abs_rat(approx(b1.machine, n) - decimal(ref::kLn2)), pow2(-n) + pow2(-150));
    EXPECT_LE(abs_rat(approx(b2.machine, n) - decimal(ref::kEPi)), pow2(-n) + pow2(-140));
    EXPECT_LE(abs_rat(approx(b3.machine, n) - decimal(ref::kSqrt2)), pow2(-n) + pow2(-150));
  }
}

TEST(ClassifyBase, EPowEtaAndOverrides) {
  RawBase r = raw_of(BaseKind::EPowEta);
  r.eta = from_rational(0);
  EXPECT_EQ(*classify_base(r).natural, 1);
  r.eta = from_rational(1);
  auto e = classify_base(r);
  EXPECT_TRUE(e.transcendental);
  EXPECT_FALSE(e.barrier);
  EXPECT_LE(abs_rat(approx(e.machine, 40) - decimal(ref::kE)), pow2(-40));
  r.table_constants["c_eta"] = 99;
  EXPECT_EQ(classify_base(r).barrier->c, 99);
  r.barrier_override = RootBarrier{Int(5), 2, BarrierProvenance::AlgebraicDerived, true};
  auto o = classify_base(r);
  EXPECT_EQ(o.barrier->provenance, BarrierProvenance::UserConfig);
  EXPECT_EQ(o.barrier->c, 5);
}

TEST(ClassifyBase, InvalidBases) {
  auto expect_invalid = [](const RawBase& r) {
    try {
      classify_base(r);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidBase);
    }
  };
  RawBase a = raw_of(BaseKind::Algebraic);
  a.alpha = canonicalize(UniPoly({-2, 0, 1}), -2, -1);
  expect_invalid(a);
  RawBase l = raw_of(BaseKind::LnRatio);
  l.alpha = from_rational(2);
  l.beta = from_rational(1);
  expect_invalid(l);
  RawBase p = raw_of(BaseKind::AlphaPowEta);
  p.alpha = from_rational(-3);
  p.eta = from_rational(Rat(1, 2));
  expect_invalid(p);
  RawBase n = raw_of(BaseKind::Natural);
  n.n = 0;
  expect_invalid(n);
}

TEST(BaseJson, ParsesAllKinds) {
  auto j = nlohmann::json::parse(R"({"kind":"algebraic","poly":[-2,0,1],"lo":"1","hi":"2"})");
  auto b = classify_base(raw_base_from_json(j));
  EXPECT_EQ(b.kind, BaseKind::Algebraic);
  auto n = classify_base(raw_base_from_json(nlohmann::json::parse(R"({"kind":"natural","n":2})")));
  EXPECT_EQ(*n.natural, 2);
  auto r = raw_base_from_json(nlohmann::json::parse(
      R"({"kind":"ln_alpha","alpha":"3","table_constants":{"c_alpha":"12"},"barrier":{"c":4,"k":3}})"));
  EXPECT_EQ(r.table_constants.at("c_alpha"), 12);
  ASSERT_TRUE(r.barrier_override);
  EXPECT_EQ(r.barrier_override->k, 3u);
  auto out = base_to_json(classify_base(r));
  EXPECT_EQ(out["barrier"]["provenance"], "user-config");
  EXPECT_THROW(raw_base_from_json(nlohmann::json::parse(R"({"kind":"bogus"})")), Error);
}

TEST(ReciprocalBase, HalfBecomesTwo) {
  auto half = base_rational(Rat(1, 2));
  auto two = reciprocal_base(half);
  EXPECT_EQ(two.kind, BaseKind::Natural);
  EXPECT_EQ(*two.natural, 2);
}
