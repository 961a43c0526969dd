#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xipow/formula.hpp"
#include "xipow/sign.hpp"

namespace xipow {

struct QeEngine {
  enum class Kind { Builtin, External };
  Kind kind = Kind::Builtin;
  std::string command;  // External only

  // "builtin" or "exec:CMD".
  static QeEngine parse(const std::string& text);
  std::string describe() const;
};

// Stage k is the formula before eliminating order[k]; the last stage is the result.
struct QeTrace {
  std::vector<Var> order;
  std::vector<Formula> stages;
};

// Optional rewrite applied after every elimination (e.g. folding ground atoms).
using Simplifier = std::function<Formula(const Formula&)>;

// Existential elimination by linear virtual substitution.
// Errors with QE_UNSUPPORTED when some variable occurs with degree above one.
Formula qe_builtin(const Formula& f, const std::vector<Var>& vars, QeTrace* trace = nullptr,
                   const Simplifier& simplify = {});

// Runs an external engine through the JSON request/response protocol.
Formula qe_delegate(const Formula& f, const std::vector<Var>& vars, const std::string& command);

Formula qe_eliminate(const Formula& f, const std::vector<Var>& vars, const QeEngine& engine,
                     QeTrace* trace = nullptr, const Simplifier& simplify = {});

nlohmann::json qe_request(const Formula& f, const std::vector<Var>& vars);
// Answers a request with the builtin engine.
nlohmann::json qe_serve(const nlohmann::json& request);

// Folds atoms with constant polynomials; ground atoms too when an oracle is given.
Formula fold_constants(const Formula& f, const SignOracle* oracle = nullptr);

// Exact real value num/den with num, den ground in xi.
struct RealValue {
  LaurentPoly num;
  LaurentPoly den = LaurentPoly(1);

  static RealValue of(const Rat& r);
  static RealValue xi_pow(std::int64_t e);
  std::string to_sexpr() const;
};

// Substitutes a value for v, clearing denominators with the correct sign.
LaurentPoly subst_value(const LaurentPoly& p, const Var& v, const RealValue& val, const SignOracle& oracle);
Formula subst_value(const Formula& f, const Var& v, const RealValue& val, const SignOracle& oracle);

// Evaluates a quantifier-free formula at exact values; pow_holds decides Pow nodes.
bool holds_with(const Formula& f, const std::map<Var, RealValue>& at, const SignOracle& oracle,
                const std::function<bool(const LaurentPoly&)>& pow_holds = {});

// Values for the eliminated variables, given values for the remaining ones that satisfy the last stage.
std::optional<std::map<Var, RealValue>> qe_sample(const QeTrace& trace, const std::map<Var, RealValue>& params,
                                                  const SignOracle& oracle);

}  // namespace xipow
