#include "xipow/rsolver.hpp"

#include <functional>
#include <sstream>

#include "xipow/error.hpp"

namespace xipow {

// ---------------------------------------------------------------- normalization

namespace {

class Normalizer {
 public:
  explicit Normalizer(const Formula& f) : used_(all_vars(f)) {
    for (const auto& v : free_vars(f)) used_.insert(v);
  }

  Formula run(const Formula& f, bool positive) {
    switch (f->kind) {
      case Kind::True:
      case Kind::False: return positive ? f : f_bool(f->kind == Kind::False);
      case Kind::Atom: {
        if (positive) return f;
        const LaurentPoly& p = f->poly;
        if (f->rel == Rel::Lt) return f_or({f_eq(p), f_lt(-p)});
        return f_or({f_lt(p), f_lt(-p)});
      }
      case Kind::Pow: {
        if (positive) {
          if (pow_var(*f)) return f;
          Var y = fresh();
          return f_and({f_eq(LaurentPoly::var(y) - f->poly), f_pow(y)});
        }
        // Not a power: nonpositive, or strictly between consecutive powers.
        Var y = fresh();
        LaurentPoly x = f->poly, yv = LaurentPoly::var(y);
        return f_or({f_le(x), f_and({f_pow(y), f_lt(yv - x), f_lt(x - LaurentPoly::xi() * yv)})});
      }
      case Kind::Not: return run(f->args[0], !positive);
      case Kind::And:
      case Kind::Or: {
        std::vector<Formula> args;
        for (const auto& a : f->args) args.push_back(run(a, positive));
        bool conj = (f->kind == Kind::And) == positive;
        return conj ? f_and(std::move(args)) : f_or(std::move(args));
      }
      case Kind::Exists: {
        if (!positive) fail(ErrorKind::UniversalQuantifier, "an existential under negation is universal");
        Formula body = f->args[0];
        for (const auto& v : f->vars) {
          if (bound_.count(v) || outer_free_.count(v)) {
            Var w = fresh_like(v);
            body = rename_var(body, v, w);
            bound_.insert(w);
          } else {
            bound_.insert(v);
          }
        }
        return run(body, true);
      }
    }
    return f;
  }

  void set_outer_free(std::set<Var> s) { outer_free_ = std::move(s); }
  const std::set<Var>& internal() const { return internal_; }

 private:
  Var fresh() {
    Var v;
    do v = "y@" + std::to_string(++counter_);
    while (used_.count(v));
    used_.insert(v);
    internal_.insert(v);
    return v;
  }
  Var fresh_like(const Var& base) {
    Var v;
    do v = base + "'" + std::to_string(++counter_);
    while (used_.count(v));
    used_.insert(v);
    return v;
  }

  std::set<Var> used_, bound_, outer_free_, internal_;
  int counter_ = 0;
};

}  // namespace

NormalForm normalize(const Formula& f) {
  Normalizer n(f);
  n.set_outer_free(free_vars(f));
  NormalForm out;
  out.matrix = laurent_normalize(n.run(f, true));
  auto fv = free_vars(out.matrix);
  out.vars.assign(fv.begin(), fv.end());
  out.internal = n.internal();
  return out;
}

Formula normalize_formula(const Formula& f) {
  NormalForm n = normalize(f);
  return f_exists(n.vars, n.matrix);
}

// ---------------------------------------------------------------- base preprocessing

namespace {

int compare_with_one(const BaseDescriptor& base) {
  if (base.is_algebraic()) return compare(*base.value, 1);
  SignOracle o(base);
  return o.sign(LaurentPoly::xi() - 1);
}

LaurentPoly flip_xi(const LaurentPoly& p) { return p.subst_monomial(kXi, Monomial::of(kXi, -1)); }

}  // namespace

PreparedBase preprocess_base(const Formula& matrix, const BaseDescriptor& base) {
  PreparedBase out;
  out.base = base;
  int c = compare_with_one(base);
  if (c == 0) {
    out.pure_reals = true;
    out.phi = map_atoms(
        matrix, [](const LaurentPoly& p, Rel r) { return f_atom(p, r); },
        [](const LaurentPoly& p) { return f_eq(p - 1); });
    return out;
  }
  if (c < 0) {
    out.flipped = true;
    out.base = reciprocal_base(base);
    out.phi = map_atoms(
        matrix, [](const LaurentPoly& p, Rel r) { return f_atom(flip_xi(p).laurent_normalized(), r); },
        [](const LaurentPoly& p) { return f_pow(flip_xi(p)); });
    return out;
  }
  out.phi = matrix;
  return out;
}

// ---------------------------------------------------------------- step 1

Var u_name(const Var& x) { return x + "@u"; }
Var v_name(const Var& x) { return x + "@v"; }

Step1 rewrite_step1(const Formula& matrix) {
  Step1 out;
  auto fv = free_vars(matrix);
  out.xs.assign(fv.begin(), fv.end());
  Formula phi = matrix;
  std::vector<Formula> ranges;
  for (const auto& x : out.xs) {
    Var u = u_name(x), v = v_name(x);
    out.us.push_back(u);
    out.vs.push_back(v);
    LaurentPoly V = LaurentPoly::var(v);
    phi = map_atoms(
        phi, [](const LaurentPoly& p, Rel r) { return f_atom(p, r); },
        [&](const LaurentPoly& p) {
          auto pv = pow_var(*f_pow(p));
          if (pv && *pv == x) return f_eq(V - 1);
          return f_pow(p);
        });
    phi = substitute(phi, x, Monomial::of(u, 1) * Monomial::of(v, 1));
    LaurentPoly xi = LaurentPoly::xi();
    ranges.push_back(f_or({f_eq(V), f_and({f_le(LaurentPoly(1) - V), f_lt(V - xi)}),
                           f_and({f_le(LaurentPoly(1) + V), f_lt(-V - xi)})}));
  }
  if (out.xs.empty()) {
    out.phi = phi;
    return out;
  }
  std::vector<Formula> all{phi};
  all.insert(all.end(), ranges.begin(), ranges.end());
  out.phi = f_and(std::move(all));
  return out;
}

// ---------------------------------------------------------------- solve

namespace {

RealValue flip_value(const RealValue& r) {
  LaurentPoly n = flip_xi(r.num), d = flip_xi(r.den);
  // Clear negative xi powers from both parts alike.
  std::int64_t m = std::min(n.is_zero() ? 0 : n.min_exp(kXi), d.min_exp(kXi));
  if (m < 0) {
    Monomial s = Monomial::of(kXi, -m);
    n = n.times(s);
    d = d.times(s);
  }
  return {n, d};
}

RealValue times_xi(const RealValue& r, std::int64_t e) {
  if (e >= 0) return {r.num.times(e ? Monomial::of(kXi, e) : Monomial()), r.den};
  return {r.num, r.den.times(Monomial::of(kXi, -e))};
}

nlohmann::json xz_stats_json(const XzStats& s) {
  return {{"branches", s.branches},   {"candidates", s.candidates}, {"memo_hits", s.memo_hits},
          {"g_sets", s.g_sets},       {"max_g_size", s.max_g_size}, {"sign_queries", s.sign_queries}};
}

}  // namespace

Verdict solve(const Formula& f, const BaseDescriptor& base, const SolveOptions& opts) {
  Verdict out;
  NormalForm nf = normalize(f);
  PreparedBase pb = preprocess_base(nf.matrix, base);
  SignOracle oracle(pb.base, opts.sign);
  SignOracle input_oracle(base, opts.sign);
  Simplifier fold = [&](const Formula& g) { return fold_constants(g, &oracle); };
  bool builtin = opts.engine.kind == QeEngine::Kind::Builtin;
  out.stats["qe"] = opts.engine.describe();

  std::map<Var, RealValue> values;  // over the solving base
  std::map<Var, RealValue> vs_of;   // residual factors, powers mode only
  if (pb.pure_reals) {
    out.stats["mode"] = "pure_reals";
    QeTrace trace;
    Formula psi = fold_constants(qe_eliminate(pb.phi, nf.vars, opts.engine, &trace, fold), &oracle);
    if (!free_vars(psi).empty()) fail(ErrorKind::Precondition, "QE left free variables");
    out.sat = holds_with(psi, {}, oracle);
    if (out.sat && builtin) {
      if (auto s = qe_sample(trace, {}, oracle)) values = *s;
    }
    if (out.sat)
      for (const auto& x : nf.vars)
        if (!nf.internal.count(x)) {
          VarWitness w;
          if (values.count(x)) w.value = values.at(x);
          out.witness[x] = w;
        }
  } else {
    out.stats["mode"] = pb.flipped ? "reciprocal_base" : "powers";
    Step1 s1 = rewrite_step1(pb.phi);
    QeTrace trace;
    Formula psi = fold_constants(qe_eliminate(s1.phi, s1.vs, opts.engine, &trace, fold), &oracle);
    out.stats["psi_atoms"] = atom_polys(psi).size();
    XzVerdict xv = solve_xz(psi, oracle, opts.xz);
    out.stats["xz"] = xz_stats_json(xv.stats);
    out.sat = xv.sat;
    if (out.sat) {
      std::map<Var, RealValue> params;
      for (const auto& u : s1.us) {
        auto it = xv.witness.find(u);
        params[u] = RealValue::xi_pow(it == xv.witness.end() ? 0 : it->second);
      }
      std::optional<std::map<Var, RealValue>> vs;
      if (builtin) vs = qe_sample(trace, params, oracle);
      for (std::size_t i = 0; i < s1.xs.size(); ++i) {
        const Var& x = s1.xs[i];
        auto it = xv.witness.find(s1.us[i]);
        std::int64_t e = it == xv.witness.end() ? 0 : it->second;
        VarWitness w;
        w.exponent = pb.flipped ? -e : e;
        if (vs && vs->count(s1.vs[i])) {
          const RealValue& v = vs->at(s1.vs[i]);
          values[x] = times_xi(v, e);
          vs_of[x] = v;
          w.v = pb.flipped ? flip_value(v) : v;
        }
        if (!nf.internal.count(x)) out.witness[x] = w;
      }
    }
  }

  if (out.sat && values.size() == nf.vars.size()) {
    std::map<Var, RealValue> input_values;
    for (auto& [x, val] : values) input_values[x] = pb.flipped ? flip_value(val) : val;
    for (auto& [x, w] : out.witness) w.value = input_values.at(x);
    auto pow_holds = [&](const LaurentPoly& p) {
      auto x = pow_var(*f_pow(p));
      if (!x) fail(ErrorKind::Precondition, "power predicate on a non-variable after normalization");
      const RealValue& val = input_values.at(*x);
      if (pb.pure_reals) return input_oracle.sign(val.num - val.den) == 0;
      // x = xi^e * v with v in {0} or +-[1, xi), so x is a power exactly when v = 1.
      const RealValue& v = vs_of.at(*x);
      return oracle.sign(v.num - v.den) == 0;
    };
    out.verified = holds_with(nf.matrix, input_values, input_oracle, pow_holds);
    if (!out.verified) fail(ErrorKind::Precondition, "reconstructed witness fails the input formula");
  }
  return out;
}

nlohmann::json verdict_to_json(const Verdict& v) {
  nlohmann::json w = nlohmann::json::object();
  for (const auto& [x, vw] : v.witness) {
    nlohmann::json e = nlohmann::json::object();
    if (vw.exponent) e["exponent"] = *vw.exponent;
    if (vw.v) e["v"] = vw.v->to_sexpr();
    if (vw.value) e["value"] = vw.value->to_sexpr();
    w[x] = e;
  }
  nlohmann::json out = {{"status", v.sat ? "sat" : "unsat"}};
  if (v.sat) out["witness"] = w;
  nlohmann::json stats = v.stats;
  stats["verified"] = v.verified;
  out["stats"] = stats;
  return out;
}

// ---------------------------------------------------------------- existential-reals emission

namespace {

std::string smt_int(const Int& c) { return c < 0 ? "(- " + Int(-c).get_str() + ")" : c.get_str(); }

std::string smt_rat(const Rat& r) {
  if (r.get_den() == 1) return smt_int(Int(r.get_num()));
  return "(/ " + smt_int(Int(r.get_num())) + " " + Int(r.get_den()).get_str() + ")";
}

std::string smt_sym(const Var& v) {
  if (v == kXi) return "x0";
  return "|" + v + "|";
}

std::string smt_poly(const LaurentPoly& p) {
  if (p.is_zero()) return "0";
  std::vector<std::string> terms;
  for (const auto& [m, c] : p.terms()) {
    std::vector<std::string> f;
    if (c != 1 || m.is_one()) f.push_back(smt_int(c));
    for (const auto& [v, e] : m.exps()) {
      if (e < 0) fail(ErrorKind::NegativeExponent, "negative exponent in emitted polynomial");
      for (std::int64_t i = 0; i < e; ++i) f.push_back(smt_sym(v));
    }
    terms.push_back(f.size() == 1 ? f[0] : "(* " + [&] {
      std::string s;
      for (std::size_t i = 0; i < f.size(); ++i) s += (i ? " " : "") + f[i];
      return s;
    }() + ")");
  }
  if (terms.size() == 1) return terms[0];
  std::string s = "(+";
  for (const auto& t : terms) s += " " + t;
  return s + ")";
}

std::string smt_formula(const Formula& f) {
  switch (f->kind) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Atom: return std::string(f->rel == Rel::Lt ? "(< " : "(= ") + smt_poly(f->poly) + " 0)";
    case Kind::Not: return "(not " + smt_formula(f->args[0]) + ")";
    case Kind::And:
    case Kind::Or: {
      std::string s = f->kind == Kind::And ? "(and" : "(or";
      for (const auto& a : f->args) s += " " + smt_formula(a);
      return s + ")";
    }
    case Kind::Pow:
    case Kind::Exists: fail(ErrorKind::Precondition, "emission needs a quantifier-free formula over power variables");
  }
  return "";
}

std::string product(const std::vector<std::string>& fs) {
  if (fs.empty()) return "1";
  if (fs.size() == 1) return fs[0];
  std::string s = "(*";
  for (const auto& f : fs) s += " " + f;
  return s + ")";
}

}  // namespace

std::string emit_etr(const Formula& psi, const std::map<Var, Int>& exponents, const BaseDescriptor& base) {
  if (!base.is_algebraic()) fail(ErrorKind::NonAlgebraicBase, "emission needs an algebraic base");
  const AlgebraicNumber& a = *base.value;
  Formula body = laurent_normalize(psi);
  std::set<Var> vars = free_vars(body);
  for (const auto& [u, g] : exponents) vars.insert(u);

  std::size_t m = 1;
  for (const auto& [u, g] : exponents) m = std::max(m, bit_length(g));

  std::ostringstream os;
  os << "(set-logic QF_NRA)\n";
  for (std::size_t i = 0; i < m; ++i) os << "(declare-const x" << i << " Real)\n";
  for (const auto& v : vars) os << "(declare-const " << smt_sym(v) << " Real)\n";
  os << "(assert (= " << smt_poly(LaurentPoly::from_uni(a.q, kXi)) << " 0))\n";
  os << "(assert (<= " << smt_rat(a.lo) << " x0))\n";
  os << "(assert (<= x0 " << smt_rat(a.hi) << "))\n";
  for (std::size_t i = 1; i < m; ++i) os << "(assert (= x" << i << " (* x" << i - 1 << " x" << i - 1 << ")))\n";
  for (const auto& [u, g] : exponents) {
    std::vector<std::string> fs;
    Int mag = abs(g);
    for (std::size_t i = 0; i < m; ++i)
      if (mpz_tstbit(mag.get_mpz_t(), i)) fs.push_back("x" + std::to_string(i));
    if (g >= 0) {
      os << "(assert (= " << smt_sym(u) << " " << product(fs) << "))\n";
    } else {
      fs.insert(fs.begin(), smt_sym(u));
      os << "(assert (= " << product(fs) << " 1))\n";
    }
  }
  os << "(assert " << smt_formula(body) << ")\n";
  os << "(check-sat)\n";
  return os.str();
}

}  // namespace xipow
