#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "xipow/qe.hpp"
#include "xipow/xz.hpp"

namespace xipow {

// Negation-free, quantifier-free matrix whose free variables are read existentially.
struct NormalForm {
  Formula matrix;
  std::vector<Var> vars;     // free variables of the matrix
  std::set<Var> internal;    // variables introduced by the rewriting
};

// Errors with UNIVERSAL_QUANTIFIER on a quantifier under negation.
NormalForm normalize(const Formula& f);
// The normal form as a prenex existential formula.
Formula normalize_formula(const Formula& f);

struct PreparedBase {
  Formula phi;
  BaseDescriptor base;
  bool pure_reals = false;  // xi = 1
  bool flipped = false;     // xi < 1, solved over 1/xi
};

PreparedBase preprocess_base(const Formula& matrix, const BaseDescriptor& base);

// Variable names of the x = u * v split.
Var u_name(const Var& x);
Var v_name(const Var& x);

struct Step1 {
  Formula phi;
  std::vector<Var> xs, us, vs;
};

Step1 rewrite_step1(const Formula& matrix);

struct SolveOptions {
  QeEngine engine;
  XzOptions xz;
  SignOptions sign;
};

struct VarWitness {
  std::optional<std::int64_t> exponent;  // power component with respect to the input base
  std::optional<RealValue> v;            // residual factor in {0} or +-[1, xi)
  std::optional<RealValue> value;        // in terms of the input base
};

struct Verdict {
  bool sat = false;
  std::map<Var, VarWitness> witness;
  bool verified = false;
  nlohmann::json stats = nlohmann::json::object();
};

Verdict solve(const Formula& f, const BaseDescriptor& base, const SolveOptions& opts = {});

nlohmann::json verdict_to_json(const Verdict& v);

// SMT-LIB2 (QF_NRA) script asserting psi at u_i = xi^g_i for the algebraic base.
std::string emit_etr(const Formula& psi, const std::map<Var, Int>& exponents, const BaseDescriptor& base);

}  // namespace xipow
