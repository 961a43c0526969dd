#include <gtest/gtest.h>

#include <random>

#include "xipow/algebraic.hpp"
#include "xipow/error.hpp"
#include "xipow/rsolver.hpp"

using namespace xipow;

namespace {

Verdict run(const std::string& s, const BaseDescriptor& b) { return solve(parse_formula(s), b); }

// Value of a witness entry at the concrete base.
Rat value_at(const RealValue& r, const Rat& xi) {
  std::map<Var, Rat> at{{kXi, xi}};
  return r.num.eval(at) / r.den.eval(at);
}

Rat pow_rat(const Rat& b, std::int64_t e) {
  Rat r = 1;
  for (std::int64_t i = 0; i < std::abs(e); ++i) r *= b;
  return e >= 0 ? r : 1 / r;
}

bool eval_at(const Formula& f, const std::map<Var, Rat>& at) {
  return eval_formula(f, [&](const LaurentPoly& p) { return sgn(p.eval(at)); });
}

// exists z f at fixed values of the other variables, f linear in z.
bool exists_linear(const Formula& f, const Var& z, std::map<Var, Rat> at) {
  std::vector<Rat> roots;
  at[z] = 0;
  for (const auto& p : atom_polys(f)) {
    auto cs = p.coeffs_in(z);
    Rat a = cs.count(1) ? cs.at(1).eval(at) : Rat(0);
    Rat b = cs.count(0) ? cs.at(0).eval(at) : Rat(0);
    if (a != 0) roots.push_back(-b / a);
  }
  std::sort(roots.begin(), roots.end());
  std::vector<Rat> cand{0};
  if (!roots.empty()) {
    cand = {roots.front() - 1, roots.back() + 1};
    for (std::size_t i = 0; i < roots.size(); ++i) {
      cand.push_back(roots[i]);
      if (i + 1 < roots.size()) cand.push_back((roots[i] + roots[i + 1]) / 2);
    }
  }
  for (const auto& c : cand) {
    at[z] = c;
    if (eval_at(f, at)) return true;
  }
  return false;
}

// Formula over a power variable x (degree <= 3) and a real variable z (linear).
Formula random_mixed(std::mt19937_64& rng, bool with_z) {
  std::uniform_int_distribution<int> coef(-9, 9), deg(0, 3), natoms(1, 3);
  auto poly_x = [&] {
    LaurentPoly p;
    int terms = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < terms; ++i) {
      LaurentPoly t = LaurentPoly(coef(rng)) * LaurentPoly::var("x").pow(deg(rng));
      if (rng() % 4 == 0) t = t * LaurentPoly::xi();
      p += t;
    }
    return p;
  };
  std::vector<Formula> parts{f_pow(LaurentPoly::var("x"))};
  int n = natoms(rng);
  for (int i = 0; i < n; ++i) {
    LaurentPoly p = poly_x();
    if (with_z && rng() % 2 == 0) p += LaurentPoly::var("z") * (rng() % 2 ? LaurentPoly(coef(rng)) : LaurentPoly::var("x"));
    parts.push_back(rng() % 4 == 0 ? f_eq(p) : f_lt(p));
  }
  if (rng() % 3 == 0) parts[1] = f_or({parts[1], f_lt(poly_x())});
  return f_and(std::move(parts));
}

bool brute(const Formula& m, bool with_z) {
  for (std::int64_t e = -40; e <= 40; ++e) {
    std::map<Var, Rat> at{{kXi, 2}, {"x", pow_rat(2, e)}};
    Formula body = m->args.size() > 1 ? f_and(std::vector<Formula>(m->args.begin() + 1, m->args.end())) : f_true();
    if (with_z ? exists_linear(body, "z", at) : eval_at(body, at)) return true;
  }
  return false;
}

}  // namespace

TEST(RSolver, NamedBaseTwoInterval) {
  Verdict v = run("(exists (x) (and (pow x) (< 3 x) (< x 5)))", base_natural(2));
  ASSERT_TRUE(v.sat);
  EXPECT_TRUE(v.verified);
  EXPECT_EQ(*v.witness.at("x").exponent, 2);
  EXPECT_EQ(value_at(*v.witness.at("x").value, 2), 4);
}

TEST(RSolver, NamedBaseTwoSquareRootUnsat) {
  EXPECT_FALSE(run("(exists (x) (and (pow x) (= (* x x) 2)))", base_natural(2)).sat);
}

TEST(RSolver, NamedBaseTwoSum) {
  Verdict v = run("(exists (x y) (and (pow x) (pow y) (= (+ x y) 12)))", base_natural(2));
  ASSERT_TRUE(v.sat);
  EXPECT_TRUE(v.verified);
  std::set<Rat> vals{value_at(*v.witness.at("x").value, 2), value_at(*v.witness.at("y").value, 2)};
  EXPECT_EQ(vals, (std::set<Rat>{4, 8}));
}

TEST(RSolver, NamedBasePi) {
  Verdict v = run("(exists (x) (and (pow x) (< 3 x) (< x 4)))", base_pi());
  ASSERT_TRUE(v.sat);
  EXPECT_TRUE(v.verified);
  EXPECT_EQ(*v.witness.at("x").exponent, 1);
  EXPECT_EQ(v.witness.at("x").value->to_sexpr(), "xi");
}

TEST(RSolver, NamedSmallBase) {
  Verdict v = run("(exists (x) (and (pow x) (< 2 x) (< x 5)))", base_rational(Rat(1, 2)));
  ASSERT_TRUE(v.sat);
  EXPECT_TRUE(v.verified);
  EXPECT_EQ(v.stats.at("mode"), "reciprocal_base");
  EXPECT_EQ(*v.witness.at("x").exponent, -2);
  EXPECT_EQ(value_at(*v.witness.at("x").value, Rat(1, 2)), 4);
}

TEST(RSolver, BaseOneIsPureReals) {
  Verdict v = run("(exists (x y) (and (pow x) (< y x) (< 0 y)))", base_natural(1));
  ASSERT_TRUE(v.sat);
  EXPECT_TRUE(v.verified);
  EXPECT_EQ(v.stats.at("mode"), "pure_reals");
  EXPECT_EQ(value_at(*v.witness.at("x").value, 1), 1);
  EXPECT_FALSE(run("(exists (x) (and (pow x) (< 2 x)))", base_natural(1)).sat);
}

TEST(RSolver, NotPowerBetweenPowers) {
  Verdict v = run("(exists (x) (and (not (pow x)) (< 3 x) (< x 5)))", base_natural(2));
  ASSERT_TRUE(v.sat);
  EXPECT_TRUE(v.verified);
  Rat x = value_at(*v.witness.at("x").value, 2);
  EXPECT_TRUE(3 < x && x < 5 && x != 4);
  EXPECT_FALSE(run("(exists (x) (and (not (pow x)) (= x 4)))", base_natural(2)).sat);
  EXPECT_TRUE(run("(exists (x) (and (not (pow x)) (= x 3)))", base_natural(2)).sat);
}

TEST(RSolver, PowOfExpression) {
  // x + 1 a power of 2 with 2 < x < 4: x = 3.
  Verdict v = run("(exists (x) (and (pow (+ x 1)) (< 2 x) (< x 4)))", base_natural(2));
  ASSERT_TRUE(v.sat);
  EXPECT_TRUE(v.verified);
  EXPECT_EQ(value_at(*v.witness.at("x").value, 2), 3);
  EXPECT_EQ(v.witness.size(), 1u);
}

TEST(RSolver, UniversalRejected) {
  try {
    run("(not (exists (x) (< x 0)))", base_natural(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UniversalQuantifier);
  }
  try {
    run("(forall (x) (< x 0))", base_natural(2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UniversalQuantifier);
  }
}

TEST(RSolver, NormalizePushesNegation) {
  NormalForm n = normalize(parse_formula("(not (or (< x 0) (= y 1)))"));
  EXPECT_EQ(to_sexpr(n.matrix), to_sexpr(parse_formula("(and (or (= x 0) (< (- x) 0)) (or (< (- y 1) 0) (< (- 1 y) 0)))")));
  EXPECT_EQ(n.vars, (std::vector<Var>{"x", "y"}));
  EXPECT_TRUE(n.internal.empty());
}

TEST(RSolver, NormalizeNamesPowArguments) {
  NormalForm n = normalize(parse_formula("(pow (+ x 1))"));
  ASSERT_EQ(n.internal.size(), 1u);
  Var y = *n.internal.begin();
  EXPECT_NE(y.find('@'), std::string::npos);
  EXPECT_EQ(to_sexpr(n.matrix), to_sexpr(f_and({f_eq(LaurentPoly::var(y) - LaurentPoly::var("x") - 1), f_pow(y)})));
}

TEST(RSolver, NormalizeRenamesShadowedBinders) {
  Formula f = normalize_formula(parse_formula("(and (< x 0) (exists (x) (< 0 x)))"));
  ASSERT_EQ(f->kind, Kind::Exists);
  EXPECT_EQ(f->vars.size(), 2u);
}

TEST(RSolver, PreprocessBase) {
  Formula m = parse_formula("(and (pow x) (< x xi))");
  PreparedBase one = preprocess_base(m, base_natural(1));
  EXPECT_TRUE(one.pure_reals);
  EXPECT_EQ(to_sexpr(one.phi), to_sexpr(parse_formula("(and (= x 1) (< x xi))")));
  PreparedBase half = preprocess_base(m, base_rational(Rat(1, 2)));
  EXPECT_TRUE(half.flipped);
  EXPECT_EQ(compare(*half.base.value, 2), 0);
  EXPECT_EQ(to_sexpr(half.phi), to_sexpr(parse_formula("(and (pow x) (< (- (* x xi) 1) 0))")));
  PreparedBase three = preprocess_base(m, base_natural(3));
  EXPECT_FALSE(three.flipped || three.pure_reals);
}

TEST(RSolver, RewriteStepOne) {
  Step1 s = rewrite_step1(parse_formula("(and (pow x) (< 3 x))"));
  EXPECT_EQ(s.us, (std::vector<Var>{u_name("x")}));
  EXPECT_EQ(s.vs, (std::vector<Var>{v_name("x")}));
  std::set<Var> fv = free_vars(s.phi);
  EXPECT_EQ(fv, (std::set<Var>{u_name("x"), v_name("x")}));
  // v = 1, u = 4 satisfies; v = 1/2 violates the range constraint.
  std::map<Var, Rat> at{{kXi, 2}, {u_name("x"), 4}, {v_name("x"), 1}};
  EXPECT_TRUE(eval_at(s.phi, at));
  at[v_name("x")] = Rat(1, 2);
  EXPECT_FALSE(eval_at(s.phi, at));
}

TEST(RSolver, EndToEndCorpus) {
  std::mt19937_64 rng(99);
  int sat = 0, unsat = 0;
  for (int i = 0; i < 60; ++i) {
    bool with_z = i % 2 == 1;
    Formula m = random_mixed(rng, with_z);
    std::vector<Var> vars{"x"};
    if (with_z && free_vars(m).count("z")) vars.push_back("z");
    Formula f = f_exists(vars, m);
    Verdict v = solve(f, base_natural(2));
    ASSERT_EQ(v.sat, brute(m, vars.size() == 2)) << to_sexpr(f);
    if (v.sat) {
      EXPECT_TRUE(v.verified) << to_sexpr(f);
      ++sat;
    } else {
      ++unsat;
    }
  }
  EXPECT_GT(sat, 10);
  EXPECT_GT(unsat, 10);
}

TEST(RSolver, VerdictJson) {
  nlohmann::json j = verdict_to_json(run("(exists (x) (and (pow x) (< 3 x) (< x 5)))", base_natural(2)));
  EXPECT_EQ(j.at("status"), "sat");
  EXPECT_EQ(j.at("witness").at("x").at("exponent"), 2);
  EXPECT_EQ(j.at("witness").at("x").at("value"), "(^ xi 2)");
  EXPECT_TRUE(j.at("stats").at("verified").get<bool>());
}

TEST(RSolver, EmitEtrChain) {
  std::string s = emit_etr(parse_formula("(< u 40)"), {{"u", Int(5)}}, base_natural(2));
  EXPECT_NE(s.find("(set-logic QF_NRA)"), std::string::npos);
  EXPECT_NE(s.find("(assert (= (+ (- 2) x0) 0))"), std::string::npos);
  EXPECT_NE(s.find("(assert (= x1 (* x0 x0)))"), std::string::npos);
  EXPECT_NE(s.find("(assert (= x2 (* x1 x1)))"), std::string::npos);
  EXPECT_NE(s.find("(assert (= |u| (* x0 x2)))"), std::string::npos);
  EXPECT_NE(s.find("(assert (< (+ (- 40) |u|) 0))"), std::string::npos);
  EXPECT_NE(s.find("(check-sat)"), std::string::npos);
}

TEST(RSolver, EmitEtrNegativeAndZero) {
  std::string s = emit_etr(parse_formula("(< u w)"), {{"u", Int(-1)}, {"w", Int(0)}}, base_natural(2));
  EXPECT_NE(s.find("(assert (= (* |u| x0) 1))"), std::string::npos);
  EXPECT_NE(s.find("(assert (= |w| 1))"), std::string::npos);
}

TEST(RSolver, EmitEtrNeedsAlgebraicBase) {
  try {
    emit_etr(parse_formula("(< u 4)"), {{"u", Int(1)}}, base_pi());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonAlgebraicBase);
  }
}
