#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "xipow/error.hpp"
#include "xipow/qe.hpp"

using namespace xipow;

namespace {

SignOracle two() { return SignOracle(base_natural(2)); }

int sign_at(const LaurentPoly& p, const std::map<Var, Rat>& at) { return sgn(p.eval(at)); }

bool eval_at(const Formula& f, const std::map<Var, Rat>& at) {
  return eval_formula(f, [&](const LaurentPoly& p) { return sign_at(p, at); });
}

// Decides (exists v) f at rational parameters by checking every cell of the v-line.
bool exists_brute(const Formula& f, const Var& v, std::map<Var, Rat> at) {
  std::vector<Rat> roots;
  for (const auto& p : atom_polys(f)) {
    auto cs = p.coeffs_in(v);
    at[v] = 0;
    Rat a = cs.count(1) ? cs.at(1).eval(at) : Rat(0);
    Rat b = cs.count(0) ? cs.at(0).eval(at) : Rat(0);
    if (a != 0) roots.push_back(-b / a);
  }
  std::sort(roots.begin(), roots.end());
  std::vector<Rat> cand;
  if (roots.empty()) {
    cand.push_back(0);
  } else {
    cand.push_back(roots.front() - 1);
    cand.push_back(roots.back() + 1);
    for (std::size_t i = 0; i < roots.size(); ++i) {
      cand.push_back(roots[i]);
      if (i + 1 < roots.size()) cand.push_back((roots[i] + roots[i + 1]) / 2);
    }
  }
  for (const auto& c : cand) {
    at[v] = c;
    if (eval_at(f, at)) return true;
  }
  return false;
}

Formula random_linear(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coef(-4, 4), natoms(1, 4), pick(0, 5);
  auto atom = [&] {
    LaurentPoly p = LaurentPoly(coef(rng)) + LaurentPoly::var("a").scaled(coef(rng)) +
                    LaurentPoly::var("b").scaled(coef(rng));
    switch (pick(rng)) {
      case 0: p += LaurentPoly::var("v") * LaurentPoly::var("a"); break;
      case 1: p += LaurentPoly::var("v").scaled(coef(rng)) * LaurentPoly::xi(); break;
      default: p += LaurentPoly::var("v").scaled(coef(rng));
    }
    return rng() % 3 == 0 ? f_eq(p) : f_lt(p);
  };
  std::vector<Formula> clauses;
  int n = natoms(rng);
  for (int i = 0; i < n; ++i) {
    if (rng() % 4 == 0)
      clauses.push_back(f_or({atom(), atom()}));
    else
      clauses.push_back(atom());
  }
  return f_and(std::move(clauses));
}

}  // namespace

TEST(Qe, EngineParsing) {
  EXPECT_EQ(QeEngine::parse("builtin").kind, QeEngine::Kind::Builtin);
  QeEngine e = QeEngine::parse("exec:redlog --qe");
  EXPECT_EQ(e.kind, QeEngine::Kind::External);
  EXPECT_EQ(e.command, "redlog --qe");
  EXPECT_THROW(QeEngine::parse("mathematica"), Error);
}

TEST(Qe, SimpleInterval) {
  // exists v (a < v < b)  <=>  a < b
  Formula f = parse_formula("(and (< a v) (< v b))");
  Formula g = qe_builtin(f, {"v"});
  EXPECT_FALSE(free_vars(g).count("v"));
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b)
      EXPECT_EQ(eval_at(g, {{"a", a}, {"b", b}, {kXi, 2}}), a < b) << a << " " << b;
}

TEST(Qe, RangeConstraintExample) {
  // exists v (v = 1 and u v > 3 and v in {0} or +-[1, xi))  <=>  u > 3
  Formula f = parse_formula(
      "(and (= v 1) (> (* u v) 3) (or (= v 0) (and (<= 1 v) (< v xi)) (and (<= 1 (- v)) (< (- v) xi))))");
  Formula g = qe_builtin(f, {"v"});
  for (int u = -2; u <= 8; ++u) EXPECT_EQ(eval_at(g, {{"u", u}, {kXi, 2}}), u > 3) << u;
}

TEST(Qe, RejectsNonlinear) {
  EXPECT_THROW(
      {
        try {
          qe_builtin(parse_formula("(< (* v v) 2)"), {"v"});
        } catch (const Error& e) {
          EXPECT_EQ(e.kind(), ErrorKind::QeUnsupported);
          throw;
        }
      },
      Error);
}

TEST(Qe, IntegerEquationSubstitutesAnyDegree) {
  // v = 1 fixes v, so the square is harmless.
  Formula g = qe_builtin(parse_formula("(and (= (- v 1) 0) (= (* u u v v) 4))"), {"v"});
  for (int u = -3; u <= 3; ++u) EXPECT_EQ(eval_at(g, {{"u", u}, {kXi, 2}}), u * u == 4) << u;
}

TEST(Qe, VirtualSubstitutionEquivalence) {
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> val(-6, 6), den(1, 3);
  for (int i = 0; i < 100; ++i) {
    Formula f = random_linear(rng);
    Formula g = qe_builtin(f, {"v"});
    ASSERT_FALSE(free_vars(g).count("v"));
    for (int k = 0; k < 50; ++k) {
      std::map<Var, Rat> at{{"a", Rat(val(rng), den(rng))}, {"b", Rat(val(rng), den(rng))}, {kXi, 2}};
      for (auto& [_, r] : at) r.canonicalize();
      ASSERT_EQ(eval_at(g, at), exists_brute(f, "v", at))
          << to_sexpr(f) << " at a=" << at["a"] << " b=" << at["b"];
    }
  }
}

TEST(Qe, SampleReconstructsWitness) {
  std::mt19937_64 rng(7);
  SignOracle o = two();
  int checked = 0;
  for (int i = 0; i < 60; ++i) {
    Formula f = random_linear(rng);
    for (int a = -2; a <= 2; ++a) {
      Formula fa = subst_value(f, "a", RealValue::of(a), o);
      fa = subst_value(fa, "b", RealValue::of(1), o);
      QeTrace trace;
      Formula g = qe_builtin(fa, {"v"}, &trace);
      bool sat = holds_with(g, {}, o);
      auto s = qe_sample(trace, {}, o);
      if (!sat) continue;
      ASSERT_TRUE(s.has_value()) << to_sexpr(fa);
      EXPECT_TRUE(holds_with(fa, *s, o)) << to_sexpr(fa);
      ++checked;
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(Qe, SampleOverXi) {
  // 1 <= v < xi and 2 v > xi + 1 at xi = 2: v in (3/2, 2).
  SignOracle o = two();
  QeTrace trace;
  Formula f = parse_formula("(and (<= 1 v) (< v xi) (> (* 2 v) (+ xi 1)))");
  Formula g = qe_builtin(f, {"v"}, &trace);
  EXPECT_TRUE(holds_with(g, {}, o));
  auto s = qe_sample(trace, {}, o);
  ASSERT_TRUE(s);
  EXPECT_TRUE(holds_with(f, *s, o));
}

TEST(Qe, FoldConstants) {
  SignOracle o = two();
  Formula f = parse_formula("(and (< 1 2) (< (- xi 3) 0) (= (* 4 x) 8))");
  Formula g = fold_constants(f, &o);
  EXPECT_EQ(to_sexpr(g), to_sexpr(fold_constants(parse_formula("(= (- x 2) 0)"))));
  EXPECT_EQ(fold_constants(parse_formula("(< 2 1)"))->kind, Kind::False);
}

TEST(Qe, RequestRoundTrip) {
  Formula f = parse_formula("(and (< a v) (< v b))");
  nlohmann::json req = qe_request(f, {"v"});
  nlohmann::json resp = qe_serve(req);
  Formula g = formula_from_json(resp.at("formula"));
  EXPECT_EQ(to_sexpr(g), to_sexpr(qe_builtin(f, {"v"})));
}

TEST(Qe, DelegateProtocol) {
  // A stand-in engine that ignores its request and answers a fixed formula.
  std::string path = ::testing::TempDir() + "xipow_qe_answer.json";
  {
    std::ofstream os(path);
    os << nlohmann::json{{"formula", formula_to_json(parse_formula("(< a b)"))}}.dump();
  }
  Formula g = qe_eliminate(parse_formula("(and (< a v) (< v b))"), {"v"}, QeEngine::parse("exec:cat " + path));
  EXPECT_EQ(to_sexpr(g), to_sexpr(parse_formula("(< a b)")));
}

TEST(Qe, DelegateFailure) {
  try {
    qe_eliminate(parse_formula("(< v 0)"), {"v"}, QeEngine::parse("exec:false"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DelegateFailure);
  }
  try {
    qe_eliminate(parse_formula("(< v 0)"), {"v"}, QeEngine::parse("exec:echo not-json"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DelegateFailure);
  }
}

TEST(Qe, SubstValueClearsDenominators) {
  SignOracle o = two();
  // v = -1/xi in v + 1 < 0: -1/2 + 1 > 0, so false.
  Formula f = subst_value(parse_formula("(< (+ v 1) 0)"), "v", RealValue{LaurentPoly(-1), LaurentPoly::xi()}, o);
  EXPECT_FALSE(holds_with(f, {}, o));
  // Negative denominator flips the relation.
  Formula h = subst_value(parse_formula("(< v 0)"), "v", RealValue{LaurentPoly(1), LaurentPoly(-3)}, o);
  EXPECT_TRUE(holds_with(h, {}, o));
}
