#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "xipow/algebraic.hpp"
#include "xipow/erisk.hpp"
#include "xipow/error.hpp"
#include "xipow/rsolver.hpp"

using namespace xipow;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorKind::Io, "cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, what + ": " + e.what());
  }
}

BaseDescriptor load_base(const std::string& path) {
  return classify_base(raw_base_from_json(parse_json(read_file(path), "base JSON")));
}

// An algebraic number given inline as "p/q" or JSON, or as a path to a JSON file.
AlgebraicNumber algebraic_arg(const std::string& s) {
  if (!s.empty() && s[0] == '{') return algebraic_from_json(parse_json(s, "algebraic number"));
  if (std::ifstream(s).good()) return algebraic_from_json(parse_json(read_file(s), "algebraic number"));
  return from_rational(parse_rat(s));
}

void print_error(const Error& e) {
  std::cout << json{{"error", {{"kind", error_kind_name(e.kind())}, {"detail", e.what()}}}}.dump() << "\n";
}

struct Common {
  std::string strategy = "qe";
  std::int64_t max_exponent = 8;
  std::string qe = "builtin";
  std::int64_t accuracy_cap = kDefaultAccuracyCap;
  std::uint64_t branch_budget = 100000;

  void add(CLI::App* cmd) {
    cmd->add_option("--strategy", strategy, "qe or enumerate")->check(CLI::IsMember({"qe", "enumerate"}));
    cmd->add_option("--max-exponent", max_exponent, "exponent bound for enumeration");
    cmd->add_option("--qe", qe, "builtin or exec:CMD");
    cmd->add_option("--accuracy-cap", accuracy_cap, "largest approximation accuracy in bits");
    cmd->add_option("--branch-budget", branch_budget, "branch limit of the power solver");
  }

  SolveOptions solve_options() const {
    SolveOptions o;
    o.engine = QeEngine::parse(qe);
    o.xz.strategy = strategy == "enumerate" ? XzStrategy::Enumerate : XzStrategy::Qe;
    o.xz.enumerate_bound = max_exponent;
    o.xz.branch_budget = branch_budget;
    o.sign.accuracy_cap = accuracy_cap;
    return o;
  }
};

// The existential power formula left after eliminating the residual factors.
Formula power_formula(const Formula& f, const BaseDescriptor& base, const SolveOptions& o, BaseDescriptor* solving) {
  NormalForm nf = normalize(f);
  PreparedBase pb = preprocess_base(nf.matrix, base);
  if (pb.pure_reals) fail(ErrorKind::Precondition, "base 1 has no power structure");
  SignOracle oracle(pb.base, o.sign);
  Step1 s1 = rewrite_step1(pb.phi);
  Simplifier fold = [&](const Formula& g) { return fold_constants(g, &oracle); };
  if (solving) *solving = pb.base;
  return fold_constants(qe_eliminate(s1.phi, s1.vs, o.engine, nullptr, fold), &oracle);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decision procedures for the reals with a power predicate"};
  app.require_subcommand(1);
  Common common;
  std::string base_path, formula_path, poly_text, game_path, b_arg = "e", eta_arg = "1";
  std::int64_t n = 0;
  std::vector<std::string> exponents;

  auto* solve_cmd = app.add_subcommand("solve", "decide an existential formula");
  solve_cmd->add_option("--base", base_path)->required();
  solve_cmd->add_option("--formula", formula_path)->required();
  common.add(solve_cmd);

  auto* sign_cmd = app.add_subcommand("sign", "sign of a univariate integer polynomial at the base");
  sign_cmd->add_option("--base", base_path)->required();
  sign_cmd->add_option("--poly", poly_text)->required();
  common.add(sign_cmd);

  auto* approx_cmd = app.add_subcommand("approx", "rational approximation of the base");
  approx_cmd->add_option("--base", base_path)->required();
  approx_cmd->add_option("-n", n, "accuracy in bits")->required();
  common.add(approx_cmd);

  auto* erisk_cmd = app.add_subcommand("erisk", "entropic risk threshold of a stochastic game");
  erisk_cmd->add_option("--game", game_path)->required();
  erisk_cmd->add_option("--b", b_arg, "e, a rational, or an algebraic number");
  erisk_cmd->add_option("--eta", eta_arg, "risk aversion factor");
  common.add(erisk_cmd);

  auto* bounds_cmd = app.add_subcommand("bounds", "small-witness bound of a formula");
  bounds_cmd->add_option("--base", base_path)->required();
  bounds_cmd->add_option("--formula", formula_path)->required();
  common.add(bounds_cmd);

  auto* etr_cmd = app.add_subcommand("emit-etr", "SMT-LIB2 script for a power formula at fixed exponents");
  etr_cmd->add_option("--base", base_path)->required();
  etr_cmd->add_option("--formula", formula_path)->required();
  etr_cmd->add_option("--exponent", exponents, "u=g, repeatable");
  common.add(etr_cmd);

  auto* qe_cmd = app.add_subcommand("qe-builtin", "answer a quantifier elimination request on standard input");
  qe_cmd->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(Error(ErrorKind::Parse, e.what()));
    return 2;
  }

  try {
    SolveOptions opts = common.solve_options();
    if (*solve_cmd) {
      Verdict v = solve(parse_formula(read_file(formula_path)), load_base(base_path), opts);
      std::cout << verdict_to_json(v).dump() << "\n";
      return v.sat ? 0 : 1;
    }
    if (*sign_cmd) {
      LaurentPoly p = parse_poly(poly_text);
      std::set<Var> vs = p.vars();
      if (vs.size() > 1) fail(ErrorKind::Precondition, "polynomial must be univariate");
      if (p.min_exp(kXi) < 0) fail(ErrorKind::NegativeExponent, "negative exponent");
      UniPoly q = vs.empty() ? p.to_uni_xi() : p.to_uni(*vs.begin());
      int s = sign(q, load_base(base_path), opts.sign);
      std::cout << json{{"sign", s < 0 ? "-" : s > 0 ? "+" : "0"}}.dump() << "\n";
      return 0;
    }
    if (*approx_cmd) {
      if (n < 0) fail(ErrorKind::InvalidParams, "accuracy must be nonnegative");
      Rat r = approx(load_base(base_path).machine, n, opts.sign.accuracy_cap);
      std::cout << json{{"value", to_string(r)}, {"accuracy", n}}.dump() << "\n";
      return 0;
    }
    if (*erisk_cmd) {
      StochasticGame g = game_from_json(parse_json(read_file(game_path), "game JSON"));
      RiskBase b = b_arg == "e" ? RiskBase::e() : RiskBase::algebraic(algebraic_arg(b_arg));
      EriskOptions eo{opts.engine, opts.sign};
      std::cout << json{{"holds", erisk_decide(g, b, algebraic_arg(eta_arg), eo)}}.dump() << "\n";
      return 0;
    }
    if (*bounds_cmd) {
      BaseDescriptor base = load_base(base_path), solving;
      Formula psi = power_formula(parse_formula(read_file(formula_path)), base, opts, &solving);
      if (!solving.barrier) fail(ErrorKind::NoStrategy, "the base has no root barrier");
      WitnessBound wb = witness_bound(psi, *solving.barrier);
      json out{{"U", wb.value ? wb.value->get_str() : "structural"}, {"structural", wb.structural()}};
      if (wb.exponent) out["exponent"] = wb.exponent->get_str();
      std::cout << out.dump() << "\n";
      return 0;
    }
    if (*etr_cmd) {
      BaseDescriptor base = load_base(base_path);
      Formula psi = laurent_normalize(parse_formula(read_file(formula_path)));
      if (has_quantifier(psi)) fail(ErrorKind::Precondition, "emission needs a quantifier-free power formula");
      std::map<Var, Int> exps;
      for (const auto& e : exponents) {
        auto eq = e.find('=');
        if (eq == std::string::npos) fail(ErrorKind::Parse, "exponent must be u=g");
        Rat g = parse_rat(e.substr(eq + 1));
        if (g.get_den() != 1) fail(ErrorKind::Parse, "exponent must be an integer");
        exps[e.substr(0, eq)] = g.get_num();
      }
      if (exps.empty()) {
        if (!base.is_algebraic()) fail(ErrorKind::NonAlgebraicBase, "emission needs an algebraic base");
        SignOracle oracle(base, opts.sign);
        XzVerdict xv = solve_xz(psi, oracle, opts.xz);
        if (!xv.sat) {
          std::cout << "(set-logic QF_NRA)\n(assert false)\n(check-sat)\n";
          return 1;
        }
        for (const auto& [u, g] : xv.witness) exps[u] = Int(static_cast<long>(g));
      }
      std::cout << emit_etr(psi, exps, base);
      return 0;
    }
    if (*qe_cmd) {
      std::stringstream ss;
      ss << std::cin.rdbuf();
      std::cout << qe_serve(parse_json(ss.str(), "qe request")).dump() << "\n";
      return 0;
    }
  } catch (const Error& e) {
    print_error(e);
    return 2;
  } catch (const std::exception& e) {
    print_error(Error(ErrorKind::Parse, e.what()));
    return 2;
  }
  return 2;
}
