#include <gtest/gtest.h>

#include "xipow/error.hpp"
#include "xipow/formula.hpp"

using namespace xipow;

namespace {

LaurentPoly v(const char* name) { return LaurentPoly::var(name); }

bool eval_at(const Formula& f, const std::map<Var, Rat>& at) {
  return eval_formula(f, [&](const LaurentPoly& p) { return sgn(p.eval(at)); });
}

}  // namespace

TEST(Parse, Polynomials) {
  EXPECT_EQ(parse_poly("(+ (* 3 (^ x 2)) -5)"), v("x") * v("x") * 3 - 5);
  EXPECT_EQ(parse_poly("(- x y)"), v("x") - v("y"));
  EXPECT_EQ(parse_poly("(- x)"), -v("x"));
  EXPECT_EQ(parse_poly("(^ xi -2)"), LaurentPoly::xi(-2));
  EXPECT_THROW(parse_poly("(^ x -1)"), Error);
  EXPECT_THROW(parse_poly("(+ x"), Error);
}

TEST(Parse, FormulaSugar) {
  Formula f = parse_formula("(and (> x 3) (<= x 5) (!= x 4))");
  std::map<Var, Rat> at{{"xi", 2}};
  for (int k = 0; k < 8; ++k) {
    at["x"] = Rat(k);
    EXPECT_EQ(eval_at(f, at), k > 3 && k <= 5 && k != 4) << k;
  }
  Formula g = parse_formula("; comment\n(exists (y) (and (pow y) (= x y)))");
  EXPECT_EQ(g->kind, Kind::Exists);
  EXPECT_EQ(free_vars(g), std::set<Var>{"x"});
  EXPECT_EQ(all_vars(g), (std::set<Var>{"x", "y"}));
  EXPECT_TRUE(has_quantifier(g));
}

TEST(Parse, UniversalRejected) {
  try {
    parse_formula("(forall (x) (< x 0))");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UniversalQuantifier);
  }
}

TEST(Formula, SexprRoundTrip) {
  for (const char* text : {"(and (< (+ x -3) 0) (= (+ (* 2 y) 1) 0))", "(or true (pow x))",
                           "(exists (y z) (and (pow y) (< (- y z) 0)))", "(not (= x 0))"}) {
    Formula f = parse_formula(text);
    Formula g = parse_formula(to_sexpr(f));
    EXPECT_EQ(to_sexpr(f), to_sexpr(g)) << text;
  }
}

TEST(Formula, JsonRoundTrip) {
  Formula f = parse_formula("(exists (y) (and (pow y) (< (- (* xi y) x) 0) (not (= x 1))))");
  nlohmann::json j = formula_to_json(f);
  Formula g = formula_from_json(j);
  EXPECT_EQ(to_sexpr(f), to_sexpr(g));
  EXPECT_EQ(poly_from_json(poly_to_json(v("x") * 3 - 1)), v("x") * 3 - 1);
  EXPECT_THROW(formula_from_json(nlohmann::json::parse(R"({"op":"bogus"})")), Error);
}

TEST(Formula, BuildersCollapse) {
  EXPECT_EQ(f_or({})->kind, Kind::False);
  EXPECT_EQ(f_and({})->kind, Kind::True);
  Formula a = f_lt(v("x"));
  EXPECT_EQ(f_and({a}), a);
  EXPECT_EQ(f_exists({}, a), a);
}

TEST(Formula, SubstituteNormalizesLaurentAtoms) {
  Formula f = f_lt(v("x") - 3);
  Formula g = substitute(f, "x", Monomial::of(kXi, -1));
  auto polys = atom_polys(g);
  ASSERT_EQ(polys.size(), 1u);
  EXPECT_GE(polys[0].min_exp(kXi), 0);
  // 1/xi - 3 < 0 at xi = 2 is true; the normalized atom keeps that.
  EXPECT_TRUE(eval_at(g, {{"xi", 2}}));
  EXPECT_FALSE(eval_at(g, {{"xi", Rat(1, 4)}}));
}

TEST(Formula, SubstitutePolyAndRename) {
  Formula f = f_eq(v("x") * v("x") - 2);
  Formula g = substitute_poly(f, "x", v("y") + 1);
  EXPECT_TRUE(eval_at(g, {{"y", Rat(0)}, {"xi", 2}}) == false);
  EXPECT_EQ(free_vars(rename_var(f, "x", "w")), std::set<Var>{"w"});
}
