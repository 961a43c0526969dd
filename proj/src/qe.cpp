#include "xipow/qe.hpp"

#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "xipow/error.hpp"

namespace xipow {

// ---------------------------------------------------------------- engine descriptor

QeEngine QeEngine::parse(const std::string& text) {
  QeEngine e;
  if (text == "builtin") return e;
  if (text.rfind("exec:", 0) == 0 && text.size() > 5) {
    e.kind = Kind::External;
    e.command = text.substr(5);
    return e;
  }
  fail(ErrorKind::Parse, "QE engine must be 'builtin' or 'exec:CMD', got '" + text + "'");
}

std::string QeEngine::describe() const { return kind == Kind::Builtin ? "builtin" : "exec:" + command; }

// ---------------------------------------------------------------- folding

namespace {

LaurentPoly primitive(const LaurentPoly& p) {
  if (p.is_zero()) return p;
  Int g = p.content();
  if (g == 1) return p;
  LaurentPoly r;
  for (const auto& [m, c] : p.terms()) r += LaurentPoly::term(c / g, m);
  return r;
}

bool truth(int s, Rel rel) { return rel == Rel::Lt ? s < 0 : s == 0; }

}  // namespace

Formula fold_constants(const Formula& f, const SignOracle* oracle) {
  switch (f->kind) {
    case Kind::True:
    case Kind::False:
    case Kind::Pow: return f;
    case Kind::Atom: {
      if (auto c = f->poly.constant_value()) return f_bool(truth(sgn(*c), f->rel));
      if (f->poly.is_zero()) return f_bool(truth(0, f->rel));
      if (oracle && f->poly.is_ground()) return f_bool(truth(oracle->sign(f->poly), f->rel));
      return f_atom(primitive(f->poly), f->rel);
    }
    case Kind::Not: {
      Formula a = fold_constants(f->args[0], oracle);
      if (a->kind == Kind::True) return f_false();
      if (a->kind == Kind::False) return f_true();
      return f_not(a);
    }
    case Kind::Exists: return f_exists(f->vars, fold_constants(f->args[0], oracle));
    case Kind::And:
    case Kind::Or: {
      bool is_and = f->kind == Kind::And;
      Kind absorbing = is_and ? Kind::False : Kind::True;
      Kind neutral = is_and ? Kind::True : Kind::False;
      std::vector<Formula> args;
      std::set<std::string> seen;
      std::function<void(const Formula&)> add = [&](const Formula& g) {
        if (g->kind == f->kind) {
          for (const auto& a : g->args) add(a);
          return;
        }
        if (seen.insert(to_sexpr(g)).second) args.push_back(g);
      };
      for (const auto& a : f->args) {
        Formula s = fold_constants(a, oracle);
        if (s->kind == absorbing) return s;
        if (s->kind == neutral) continue;
        add(s);
      }
      return is_and ? f_and(std::move(args)) : f_or(std::move(args));
    }
  }
  return f;
}

// ---------------------------------------------------------------- virtual substitution

namespace {

struct TestPoint {
  enum class Kind { Point, PlusEps, MinusInf };
  Kind kind = Kind::MinusInf;
  LaurentPoly num, den;  // value -b/a as num/den
};

bool mentions(const Formula& f, const Var& v) {
  if (f->kind == Kind::Atom || f->kind == Kind::Pow) return f->poly.has_var(v);
  for (const auto& a : f->args)
    if (mentions(a, v)) return true;
  return false;
}

void check_linear(const Formula& f, const Var& v) {
  for (const auto& p : atom_polys(f)) {
    if (!p.has_var(v)) continue;
    if (p.max_exp(v) > 1 || p.min_exp(v) < 0)
      fail(ErrorKind::QeUnsupported, "variable " + v + " occurs with degree above one");
  }
  std::function<void(const Formula&)> walk = [&](const Formula& g) {
    if (g->kind == Kind::Pow && g->poly.has_var(v)) fail(ErrorKind::QeUnsupported, "power predicate on " + v);
    if (g->kind == Kind::Exists) fail(ErrorKind::QeUnsupported, "nested quantifier");
    for (const auto& a : g->args) walk(a);
  };
  walk(f);
}

// p = a v + b
std::pair<LaurentPoly, LaurentPoly> linear_parts(const LaurentPoly& p, const Var& v) {
  auto cs = p.coeffs_in(v);
  LaurentPoly a = cs.count(1) ? cs.at(1) : LaurentPoly();
  LaurentPoly b = cs.count(0) ? cs.at(0) : LaurentPoly();
  return {a, b};
}

Formula nonzero(const LaurentPoly& a) {
  if (auto c = a.constant_value()) return f_bool(*c != 0);
  return f_or({f_lt(a), f_lt(-a)});
}

Formula subst_atom(const LaurentPoly& p, Rel rel, const Var& v, const TestPoint& t) {
  if (!p.has_var(v)) return f_atom(p, rel);
  auto [c, d] = linear_parts(p, v);
  using K = TestPoint::Kind;
  if (t.kind == K::MinusInf) {
    if (rel == Rel::Eq) return f_and({f_eq(c), f_eq(d)});
    return f_or({f_lt(-c), f_and({f_eq(c), f_lt(d)})});
  }
  LaurentPoly E = c * t.num + d * t.den;
  if (t.kind == K::Point) return rel == Rel::Eq ? f_eq(E) : f_lt(E * t.den);
  if (rel == Rel::Eq) return f_and({f_eq(c), f_eq(d)});
  return f_or({f_lt(E * t.den), f_and({f_eq(E), f_lt(c)})});
}

Formula subst_point(const Formula& f, const Var& v, const TestPoint& t) {
  return map_atoms(f, [&](const LaurentPoly& p, Rel rel) { return subst_atom(p, rel, v, t); });
}

std::vector<TestPoint> test_points(const Formula& f, const Var& v) {
  std::vector<TestPoint> out;
  std::set<std::tuple<int, std::string, std::string>> seen;
  std::function<void(const Formula&)> walk = [&](const Formula& g) {
    if (g->kind == Kind::Atom && g->poly.has_var(v)) {
      auto [a, b] = linear_parts(g->poly, v);
      if (a.is_zero()) return;
      LaurentPoly num = -b, den = a;
      if (sgn(den.terms().begin()->second) < 0) {
        num = -num;
        den = -den;
      }
      auto kind = g->rel == Rel::Eq ? TestPoint::Kind::Point : TestPoint::Kind::PlusEps;
      if (seen.insert({static_cast<int>(kind), num.to_sexpr(), den.to_sexpr()}).second)
        out.push_back({kind, num, den});
    }
    for (const auto& a : g->args) walk(a);
  };
  walk(f);
  return out;
}

// Equation a v + b = 0 with a nonzero integer a among the top-level conjuncts.
std::optional<TestPoint> gauss_point(const Formula& f, const Var& v) {
  std::vector<Formula> conj = f->kind == Kind::And ? f->args : std::vector<Formula>{f};
  for (const auto& c : conj) {
    if (c->kind != Kind::Atom || c->rel != Rel::Eq || !c->poly.has_var(v)) continue;
    if (c->poly.max_exp(v) != 1 || c->poly.min_exp(v) != 0) continue;
    auto [a, b] = linear_parts(c->poly, v);
    auto k = a.constant_value();
    if (k && *k != 0) return TestPoint{TestPoint::Kind::Point, -b, a};
  }
  return std::nullopt;
}

// Substitutes v = num / den with den a nonzero integer into atoms of any nonnegative degree in v.
Formula subst_exact(const Formula& f, const Var& v, const TestPoint& t) {
  Int a = *t.den.constant_value();
  return map_atoms(
      f,
      [&](const LaurentPoly& p, Rel rel) {
        if (!p.has_var(v)) return f_atom(p, rel);
        if (p.min_exp(v) < 0) fail(ErrorKind::QeUnsupported, "negative power of " + v);
        std::int64_t d = p.max_exp(v);
        LaurentPoly q;
        for (const auto& [i, c] : p.coeffs_in(v)) {
          LaurentPoly term = c * t.num.pow(i);
          Int s = 1;
          for (std::int64_t k = i; k < d; ++k) s *= a;
          q += term.scaled(s);
        }
        // q = a^d p(num / a); flip when a^d < 0.
        if (a < 0 && d % 2 == 1) q = -q;
        return f_atom(q, rel);
      },
      [&](const LaurentPoly& p) {
        if (p.has_var(v)) fail(ErrorKind::QeUnsupported, "power predicate on " + v);
        return f_pow(p);
      });
}

Formula eliminate_one(const Formula& input, const Var& v, const Simplifier& simplify) {
  Formula f = fold_constants(input);
  if (simplify) f = simplify(f);
  if (!mentions(f, v)) return f;
  if (f->kind == Kind::Or) {
    std::vector<Formula> parts;
    for (const auto& a : f->args) parts.push_back(eliminate_one(a, v, simplify));
    return fold_constants(f_or(std::move(parts)));
  }
  auto finish = [&](Formula g) {
    g = fold_constants(g);
    return simplify ? simplify(g) : g;
  };
  if (auto t = gauss_point(f, v)) return finish(subst_exact(f, v, *t));
  check_linear(f, v);
  std::vector<Formula> parts{subst_point(f, v, TestPoint{})};
  for (const auto& t : test_points(f, v)) parts.push_back(f_and({nonzero(t.den), subst_point(f, v, t)}));
  return finish(f_or(std::move(parts)));
}

}  // namespace

Formula qe_builtin(const Formula& f, const std::vector<Var>& vars, QeTrace* trace, const Simplifier& simplify) {
  Formula cur = f;
  for (const auto& v : vars) {
    if (trace) {
      trace->order.push_back(v);
      trace->stages.push_back(cur);
    }
    cur = eliminate_one(cur, v, simplify);
  }
  cur = fold_constants(cur);
  if (trace) trace->stages.push_back(cur);
  return cur;
}

// ---------------------------------------------------------------- delegate

nlohmann::json qe_request(const Formula& f, const std::vector<Var>& vars) {
  return {{"eliminate", vars}, {"formula", formula_to_json(f)}};
}

nlohmann::json qe_serve(const nlohmann::json& request) {
  std::vector<Var> vars = request.at("eliminate").get<std::vector<Var>>();
  Formula f = formula_from_json(request.at("formula"));
  return {{"formula", formula_to_json(qe_builtin(f, vars))}};
}

namespace {

std::string temp_file(const std::string& tag) {
  std::string pattern = "/tmp/xipow-" + tag + "-XXXXXX";
  std::vector<char> buf(pattern.begin(), pattern.end());
  buf.push_back('\0');
  int fd = mkstemp(buf.data());
  if (fd < 0) fail(ErrorKind::Io, "cannot create a temporary file");
  close(fd);
  return buf.data();
}

}  // namespace

Formula qe_delegate(const Formula& f, const std::vector<Var>& vars, const std::string& command) {
  std::string in = temp_file("req"), out = temp_file("resp");
  {
    std::ofstream os(in);
    os << qe_request(f, vars).dump();
  }
  std::string cmd = command + " < '" + in + "' > '" + out + "'";
  int status = std::system(cmd.c_str());
  std::stringstream body;
  {
    std::ifstream is(out);
    body << is.rdbuf();
  }
  std::remove(in.c_str());
  std::remove(out.c_str());
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0)
    fail(ErrorKind::DelegateFailure, "QE delegate '" + command + "' failed");
  Formula result;
  try {
    result = formula_from_json(nlohmann::json::parse(body.str()).at("formula"));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorKind::DelegateFailure, std::string("malformed delegate response: ") + e.what());
  }
  if (has_quantifier(result)) fail(ErrorKind::DelegateFailure, "delegate returned a quantified formula");
  auto fv = free_vars(result);
  for (const auto& v : vars)
    if (fv.count(v)) fail(ErrorKind::DelegateFailure, "delegate left " + v + " in its answer");
  return result;
}

Formula qe_eliminate(const Formula& f, const std::vector<Var>& vars, const QeEngine& engine, QeTrace* trace,
                     const Simplifier& simplify) {
  if (vars.empty()) return f;
  if (engine.kind == QeEngine::Kind::Builtin) return qe_builtin(f, vars, trace, simplify);
  Formula r = qe_delegate(f, vars, engine.command);
  return simplify ? simplify(r) : r;
}

// ---------------------------------------------------------------- exact values

RealValue RealValue::of(const Rat& r) { return {LaurentPoly(Int(r.get_num())), LaurentPoly(Int(r.get_den()))}; }

RealValue RealValue::xi_pow(std::int64_t e) { return {LaurentPoly::xi(e), LaurentPoly(1)}; }

std::string RealValue::to_sexpr() const {
  if (den == LaurentPoly(1)) return num.to_sexpr();
  return "(/ " + num.to_sexpr() + " " + den.to_sexpr() + ")";
}

LaurentPoly subst_value(const LaurentPoly& p, const Var& v, const RealValue& val, const SignOracle& oracle) {
  if (!p.has_var(v)) return p;
  std::int64_t lo = std::min<std::int64_t>(0, p.min_exp(v));
  std::int64_t hi = std::max<std::int64_t>(0, p.max_exp(v));
  LaurentPoly acc;
  for (const auto& [e, c] : p.coeffs_in(v))
    acc += c * val.num.pow(static_cast<std::uint64_t>(e - lo)) * val.den.pow(static_cast<std::uint64_t>(hi - e));
  int sn = oracle.sign(val.num), sd = oracle.sign(val.den);
  if (sd == 0 || (lo < 0 && sn == 0)) fail(ErrorKind::Precondition, "substituted value is undefined");
  int s = 1;
  if ((-lo) % 2 && sn < 0) s = -s;
  if (hi % 2 && sd < 0) s = -s;
  return s < 0 ? -acc : acc;
}

Formula subst_value(const Formula& f, const Var& v, const RealValue& val, const SignOracle& oracle) {
  return map_atoms(f, [&](const LaurentPoly& p, Rel rel) { return f_atom(subst_value(p, v, val, oracle), rel); });
}

bool holds_with(const Formula& f, const std::map<Var, RealValue>& at, const SignOracle& oracle,
                const std::function<bool(const LaurentPoly&)>& pow_holds) {
  auto sign_of = [&](const LaurentPoly& p) {
    LaurentPoly q = p;
    for (const auto& v : p.vars()) {
      auto it = at.find(v);
      if (it == at.end()) fail(ErrorKind::Precondition, "no value for " + v);
      q = subst_value(q, v, it->second, oracle);
    }
    return oracle.sign(q);
  };
  return eval_formula(f, sign_of, pow_holds);
}

namespace {

constexpr int kSearchSteps = 400;

// A value of v making the univariate (in v) formula true.
std::optional<RealValue> sample_one(const Formula& f, const Var& v, const SignOracle& oracle) {
  auto ok = [&](const RealValue& val) { return holds_with(f, {{v, val}}, oracle); };
  if (!mentions(f, v)) return ok(RealValue::of(0)) ? std::optional<RealValue>(RealValue::of(0)) : std::nullopt;
  auto points = test_points(f, v);
  for (const auto& t : points) {
    if (t.kind != TestPoint::Kind::Point || oracle.sign(t.den) == 0) continue;
    RealValue val{t.num, t.den};
    if (ok(val)) return val;
  }
  for (const auto& t : points) {
    if (t.kind != TestPoint::Kind::PlusEps || oracle.sign(t.den) == 0) continue;
    for (int j = 0; j < kSearchSteps; ++j) {
      Int q = pow2_int(j);
      RealValue val{t.num.scaled(q) + t.den, t.den.scaled(q)};
      if (ok(val)) return val;
    }
  }
  for (int j = 0; j < kSearchSteps; ++j) {
    RealValue val = RealValue::of(-Rat(pow2_int(j)));
    if (ok(val)) return val;
  }
  RealValue zero = RealValue::of(0);
  if (ok(zero)) return zero;
  return std::nullopt;
}

}  // namespace

std::optional<std::map<Var, RealValue>> qe_sample(const QeTrace& trace, const std::map<Var, RealValue>& params,
                                                  const SignOracle& oracle) {
  std::map<Var, RealValue> known = params;
  std::map<Var, RealValue> chosen;
  for (std::size_t k = trace.order.size(); k-- > 0;) {
    const Var& v = trace.order[k];
    Formula f = trace.stages[k];
    for (const auto& x : free_vars(f))
      if (x != v) {
        auto it = known.find(x);
        if (it == known.end()) fail(ErrorKind::Precondition, "no value for " + x);
        f = subst_value(f, x, it->second, oracle);
      }
    auto val = sample_one(f, v, oracle);
    if (!val) return std::nullopt;
    known[v] = *val;
    chosen[v] = *val;
  }
  return chosen;
}

}  // namespace xipow
