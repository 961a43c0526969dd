#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "xipow/poly.hpp"

namespace xipow {

enum class Rel { Lt, Eq };

struct FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

struct FormulaNode {
  enum class Kind { True, False, Atom, Pow, And, Or, Not, Exists };
  Kind kind = Kind::True;
  LaurentPoly poly;        // Atom: poly ~ 0. Pow: the argument.
  Rel rel = Rel::Lt;       // Atom only
  std::vector<Var> vars;   // Exists only
  std::vector<Formula> args;
};

using Kind = FormulaNode::Kind;

Formula f_true();
Formula f_false();
Formula f_bool(bool b);
Formula f_atom(LaurentPoly p, Rel rel);
Formula f_lt(LaurentPoly p);  // p < 0
Formula f_eq(LaurentPoly p);  // p = 0
Formula f_le(const LaurentPoly& p);  // p < 0 or p = 0
Formula f_pow(LaurentPoly arg);
Formula f_pow(const Var& v);
Formula f_and(std::vector<Formula> args);
Formula f_or(std::vector<Formula> args);
Formula f_not(Formula arg);
Formula f_exists(std::vector<Var> vars, Formula body);

// Plain-variable argument of a Pow node, if any.
std::optional<Var> pow_var(const FormulaNode& f);

std::string to_sexpr(const Formula& f);
Formula parse_formula(const std::string& text);
LaurentPoly parse_poly(const std::string& text);

nlohmann::json poly_to_json(const LaurentPoly& p);
LaurentPoly poly_from_json(const nlohmann::json& j);
nlohmann::json formula_to_json(const Formula& f);
Formula formula_from_json(const nlohmann::json& j);

// Free variables, xi excluded.
std::set<Var> free_vars(const Formula& f);
// Every variable occurring anywhere, bound or free, xi excluded.
std::set<Var> all_vars(const Formula& f);
bool has_quantifier(const Formula& f);

// Atom p ~ 0 with negative powers cleared by a positive monomial factor.
LaurentPoly laurent_normalize(const LaurentPoly& p);
Formula laurent_normalize(const Formula& f);

// Replaces x by the monomial m everywhere, then Laurent-normalizes every atom.
Formula substitute(const Formula& f, const Var& x, const Monomial& m);
// Replaces x by an arbitrary polynomial (x must occur with nonnegative powers).
Formula substitute_poly(const Formula& f, const Var& x, const LaurentPoly& q);
Formula rename_var(const Formula& f, const Var& from, const Var& to);

// Rebuilds f bottom-up, replacing atoms and pow nodes through the callbacks.
Formula map_atoms(const Formula& f,
                  const std::function<Formula(const LaurentPoly&, Rel)>& on_atom,
                  const std::function<Formula(const LaurentPoly&)>& on_pow = {});

// Evaluates a quantifier-free formula given a sign for every atom polynomial.
bool eval_formula(const Formula& f, const std::function<int(const LaurentPoly&)>& sign_of,
                  const std::function<bool(const LaurentPoly&)>& pow_holds = {});

// Collects distinct atom polynomials.
std::vector<LaurentPoly> atom_polys(const Formula& f);

}  // namespace xipow
