#include "xipow/formula.hpp"

#include <cctype>
#include <map>

#include "xipow/error.hpp"

namespace xipow {

namespace {

Formula make(FormulaNode n) { return std::make_shared<const FormulaNode>(std::move(n)); }

}  // namespace

Formula f_true() {
  static const Formula t = make(FormulaNode{Kind::True, {}, Rel::Lt, {}, {}});
  return t;
}

Formula f_false() {
  static const Formula f = make(FormulaNode{Kind::False, {}, Rel::Lt, {}, {}});
  return f;
}

Formula f_bool(bool b) { return b ? f_true() : f_false(); }

Formula f_atom(LaurentPoly p, Rel rel) {
  return make(FormulaNode{Kind::Atom, std::move(p), rel, {}, {}});
}

Formula f_lt(LaurentPoly p) { return f_atom(std::move(p), Rel::Lt); }
Formula f_eq(LaurentPoly p) { return f_atom(std::move(p), Rel::Eq); }
Formula f_le(const LaurentPoly& p) { return f_or({f_lt(p), f_eq(p)}); }

Formula f_pow(LaurentPoly arg) { return make(FormulaNode{Kind::Pow, std::move(arg), Rel::Lt, {}, {}}); }
Formula f_pow(const Var& v) { return f_pow(LaurentPoly::var(v)); }

Formula f_and(std::vector<Formula> args) {
  if (args.empty()) return f_true();
  if (args.size() == 1) return args[0];
  return make(FormulaNode{Kind::And, {}, Rel::Lt, {}, std::move(args)});
}

Formula f_or(std::vector<Formula> args) {
  if (args.empty()) return f_false();
  if (args.size() == 1) return args[0];
  return make(FormulaNode{Kind::Or, {}, Rel::Lt, {}, std::move(args)});
}

Formula f_not(Formula arg) { return make(FormulaNode{Kind::Not, {}, Rel::Lt, {}, {std::move(arg)}}); }

Formula f_exists(std::vector<Var> vars, Formula body) {
  if (vars.empty()) return body;
  return make(FormulaNode{Kind::Exists, {}, Rel::Lt, std::move(vars), {std::move(body)}});
}

std::optional<Var> pow_var(const FormulaNode& f) {
  if (f.kind != Kind::Pow || f.poly.size() != 1) return std::nullopt;
  const auto& [m, c] = *f.poly.terms().begin();
  if (c != 1 || m.exps().size() != 1 || m.exps()[0].second != 1 || m.exps()[0].first == kXi)
    return std::nullopt;
  return m.exps()[0].first;
}

// ---------------------------------------------------------------- printing

std::string to_sexpr(const Formula& f) {
  switch (f->kind) {
    case Kind::True: return "true";
    case Kind::False: return "false";
    case Kind::Atom:
      return std::string(f->rel == Rel::Lt ? "(< " : "(= ") + f->poly.to_sexpr() + " 0)";
    case Kind::Pow: return "(pow " + f->poly.to_sexpr() + ")";
    case Kind::Not: return "(not " + to_sexpr(f->args[0]) + ")";
    case Kind::And:
    case Kind::Or: {
      std::string s = f->kind == Kind::And ? "(and" : "(or";
      for (const auto& a : f->args) s += " " + to_sexpr(a);
      return s + ")";
    }
    case Kind::Exists: {
      std::string s = "(exists (";
      for (std::size_t i = 0; i < f->vars.size(); ++i) s += (i ? " " : "") + f->vars[i];
      return s + ") " + to_sexpr(f->args[0]) + ")";
    }
  }
  return "";
}

// ---------------------------------------------------------------- parsing

namespace {

struct Sexp {
  bool is_list = false;
  std::string atom;
  std::vector<Sexp> items;
};

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}

  Sexp read() {
    skip();
    if (pos_ >= s_.size()) fail(ErrorKind::Parse, "unexpected end of input");
    if (s_[pos_] == ')') fail(ErrorKind::Parse, "unexpected ')' at offset " + std::to_string(pos_));
    if (s_[pos_] == '(') {
      ++pos_;
      Sexp list;
      list.is_list = true;
      for (;;) {
        skip();
        if (pos_ >= s_.size()) fail(ErrorKind::Parse, "unbalanced parentheses");
        if (s_[pos_] == ')') {
          ++pos_;
          return list;
        }
        list.items.push_back(read());
      }
    }
    std::size_t start = pos_;
    while (pos_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[pos_])) &&
           s_[pos_] != '(' && s_[pos_] != ')')
      ++pos_;
    Sexp a;
    a.atom = s_.substr(start, pos_ - start);
    return a;
  }

  void expect_end() {
    skip();
    if (pos_ != s_.size()) fail(ErrorKind::Parse, "trailing input at offset " + std::to_string(pos_));
  }

 private:
  void skip() {
    while (pos_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[pos_]))) {
        ++pos_;
      } else if (s_[pos_] == ';') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

bool is_integer(const std::string& s) {
  std::size_t i = (s.size() > 1 && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (i >= s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '#' || c == '\'' || c == '.'))
      return false;
  return true;
}

LaurentPoly term_of(const Sexp& e);

std::int64_t small_int(const Sexp& e) {
  if (e.is_list || !is_integer(e.atom)) fail(ErrorKind::Parse, "expected an integer exponent");
  try {
    return std::stoll(e.atom);
  } catch (const std::exception&) {
    fail(ErrorKind::Parse, "exponent out of range: " + e.atom);
  }
}

LaurentPoly term_of(const Sexp& e) {
  if (!e.is_list) {
    if (is_integer(e.atom)) {
      std::string digits = e.atom[0] == '+' ? e.atom.substr(1) : e.atom;
      return LaurentPoly(Int(digits));
    }
    if (is_identifier(e.atom)) return LaurentPoly::var(e.atom);
    fail(ErrorKind::Parse, "bad term '" + e.atom + "'");
  }
  if (e.items.empty() || e.items[0].is_list) fail(ErrorKind::Parse, "bad term list");
  const std::string& op = e.items[0].atom;
  std::size_t n = e.items.size();
  if (op == "+") {
    LaurentPoly acc;
    for (std::size_t i = 1; i < n; ++i) acc += term_of(e.items[i]);
    return acc;
  }
  if (op == "*") {
    LaurentPoly acc(1);
    for (std::size_t i = 1; i < n; ++i) acc = acc * term_of(e.items[i]);
    return acc;
  }
  if (op == "-") {
    if (n == 2) return -term_of(e.items[1]);
    if (n < 2) fail(ErrorKind::Parse, "'-' needs arguments");
    LaurentPoly acc = term_of(e.items[1]);
    for (std::size_t i = 2; i < n; ++i) acc = acc - term_of(e.items[i]);
    return acc;
  }
  if (op == "^") {
    if (n != 3) fail(ErrorKind::Parse, "'^' takes two arguments");
    std::int64_t k = small_int(e.items[2]);
    LaurentPoly base = term_of(e.items[1]);
    if (k >= 0) return base.pow(static_cast<std::uint64_t>(k));
    // Negative powers are only meaningful for monomials such as xi.
    if (base.size() != 1 || base.terms().begin()->second != 1)
      fail(ErrorKind::Parse, "negative exponent on a non-monomial");
    const Monomial& m = base.terms().begin()->first;
    for (const auto& [v, ex] : m.exps())
      if (v != kXi) fail(ErrorKind::Parse, "negative exponent allowed on xi only");
    return LaurentPoly::term(1, m.pow(k));
  }
  fail(ErrorKind::Parse, "unknown term operator '" + op + "'");
}

Formula formula_of(const Sexp& e) {
  if (!e.is_list) {
    if (e.atom == "true") return f_true();
    if (e.atom == "false") return f_false();
    fail(ErrorKind::Parse, "bad formula '" + e.atom + "'");
  }
  if (e.items.empty() || e.items[0].is_list) fail(ErrorKind::Parse, "bad formula list");
  const std::string& op = e.items[0].atom;
  std::size_t n = e.items.size();
  auto binary = [&]() {
    if (n != 3) fail(ErrorKind::Parse, "'" + op + "' takes two terms");
    return term_of(e.items[1]) - term_of(e.items[2]);
  };
  if (op == "and" || op == "or") {
    std::vector<Formula> args;
    for (std::size_t i = 1; i < n; ++i) args.push_back(formula_of(e.items[i]));
    if (args.empty()) return op == "and" ? f_true() : f_false();
    if (args.size() == 1) return args[0];
    return op == "and" ? f_and(std::move(args)) : f_or(std::move(args));
  }
  if (op == "not") {
    if (n != 2) fail(ErrorKind::Parse, "'not' takes one argument");
    return f_not(formula_of(e.items[1]));
  }
  if (op == "exists") {
    if (n != 3 || !e.items[1].is_list) fail(ErrorKind::Parse, "expected (exists (vars ...) body)");
    std::vector<Var> vars;
    for (const auto& v : e.items[1].items) {
      if (v.is_list || !is_identifier(v.atom) || v.atom == kXi)
        fail(ErrorKind::Parse, "bad bound variable");
      vars.push_back(v.atom);
    }
    return f_exists(std::move(vars), formula_of(e.items[2]));
  }
  if (op == "forall") fail(ErrorKind::UniversalQuantifier, "universal quantifiers are not supported");
  if (op == "pow") {
    if (n != 2) fail(ErrorKind::Parse, "'pow' takes one argument");
    return f_pow(term_of(e.items[1]));
  }
  if (op == "<") return f_lt(binary());
  if (op == "=") return f_eq(binary());
  if (op == ">") return f_lt(-binary());
  if (op == "<=") return f_le(binary());
  if (op == ">=") return f_le(-binary());
  if (op == "!=") {
    LaurentPoly d = binary();
    return f_or({f_lt(d), f_lt(-d)});
  }
  fail(ErrorKind::Parse, "unknown formula operator '" + op + "'");
}

}  // namespace

Formula parse_formula(const std::string& text) {
  Reader r(text);
  Sexp e = r.read();
  r.expect_end();
  return formula_of(e);
}

LaurentPoly parse_poly(const std::string& text) {
  Reader r(text);
  Sexp e = r.read();
  r.expect_end();
  return term_of(e);
}

// ---------------------------------------------------------------- JSON

nlohmann::json poly_to_json(const LaurentPoly& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [m, c] : p.terms()) {
    nlohmann::json exps = nlohmann::json::object();
    for (const auto& [v, e] : m.exps()) exps[v] = e;
    terms.push_back({{"coeff", c.get_str()}, {"exps", exps}});
  }
  return {{"terms", terms}};
}

LaurentPoly poly_from_json(const nlohmann::json& j) {
  try {
    LaurentPoly p;
    for (const auto& t : j.at("terms")) {
      const auto& cj = t.at("coeff");
      Int c = cj.is_string() ? Int(cj.get<std::string>()) : Int(cj.get<long>());
      Monomial m;
      if (t.contains("exps"))
        for (const auto& [v, e] : t.at("exps").items()) m = m * Monomial::of(v, e.get<std::int64_t>());
      p += LaurentPoly::term(c, m);
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("bad polynomial JSON: ") + e.what());
  } catch (const std::invalid_argument&) {
    fail(ErrorKind::Parse, "bad coefficient in polynomial JSON");
  }
}

nlohmann::json formula_to_json(const Formula& f) {
  switch (f->kind) {
    case Kind::True: return {{"op", "true"}};
    case Kind::False: return {{"op", "false"}};
    case Kind::Atom: return {{"op", f->rel == Rel::Lt ? "lt" : "eq"}, {"poly", poly_to_json(f->poly)}};
    case Kind::Pow: {
      if (auto v = pow_var(*f)) return {{"op", "pow"}, {"var", *v}};
      return {{"op", "pow"}, {"poly", poly_to_json(f->poly)}};
    }
    case Kind::Not: return {{"op", "not"}, {"arg", formula_to_json(f->args[0])}};
    case Kind::And:
    case Kind::Or: {
      nlohmann::json args = nlohmann::json::array();
      for (const auto& a : f->args) args.push_back(formula_to_json(a));
      return {{"op", f->kind == Kind::And ? "and" : "or"}, {"args", args}};
    }
    case Kind::Exists: return {{"op", "exists"}, {"vars", f->vars}, {"body", formula_to_json(f->args[0])}};
  }
  return {};
}

Formula formula_from_json(const nlohmann::json& j) {
  try {
    std::string op = j.at("op").get<std::string>();
    if (op == "true") return f_true();
    if (op == "false") return f_false();
    if (op == "lt") return f_lt(poly_from_json(j.at("poly")));
    if (op == "eq") return f_eq(poly_from_json(j.at("poly")));
    if (op == "pow") {
      if (j.contains("var")) return f_pow(j.at("var").get<std::string>());
      return f_pow(poly_from_json(j.at("poly")));
    }
    if (op == "not") return f_not(formula_from_json(j.at("arg")));
    if (op == "and" || op == "or") {
      std::vector<Formula> args;
      for (const auto& a : j.at("args")) args.push_back(formula_from_json(a));
      if (args.empty()) return op == "and" ? f_true() : f_false();
      return op == "and" ? f_and(std::move(args)) : f_or(std::move(args));
    }
    if (op == "exists")
      return f_exists(j.at("vars").get<std::vector<std::string>>(), formula_from_json(j.at("body")));
    fail(ErrorKind::Parse, "unknown formula op '" + op + "'");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("bad formula JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------- traversal

namespace {

void collect_free(const Formula& f, std::set<Var>& bound, std::set<Var>& out) {
  switch (f->kind) {
    case Kind::Atom:
    case Kind::Pow:
      for (const auto& v : f->poly.vars())
        if (!bound.count(v)) out.insert(v);
      return;
    case Kind::Exists: {
      std::vector<Var> added;
      for (const auto& v : f->vars)
        if (bound.insert(v).second) added.push_back(v);
      collect_free(f->args[0], bound, out);
      for (const auto& v : added) bound.erase(v);
      return;
    }
    default:
      for (const auto& a : f->args) collect_free(a, bound, out);
  }
}

void collect_all(const Formula& f, std::set<Var>& out) {
  if (f->kind == Kind::Atom || f->kind == Kind::Pow) {
    auto vs = f->poly.vars();
    out.insert(vs.begin(), vs.end());
  }
  if (f->kind == Kind::Exists) out.insert(f->vars.begin(), f->vars.end());
  for (const auto& a : f->args) collect_all(a, out);
}

}  // namespace

std::set<Var> free_vars(const Formula& f) {
  std::set<Var> bound, out;
  collect_free(f, bound, out);
  return out;
}

std::set<Var> all_vars(const Formula& f) {
  std::set<Var> out;
  collect_all(f, out);
  return out;
}

bool has_quantifier(const Formula& f) {
  if (f->kind == Kind::Exists) return true;
  for (const auto& a : f->args)
    if (has_quantifier(a)) return true;
  return false;
}

Formula map_atoms(const Formula& f, const std::function<Formula(const LaurentPoly&, Rel)>& on_atom,
                  const std::function<Formula(const LaurentPoly&)>& on_pow) {
  switch (f->kind) {
    case Kind::True:
    case Kind::False: return f;
    case Kind::Atom: return on_atom(f->poly, f->rel);
    case Kind::Pow: return on_pow ? on_pow(f->poly) : f;
    case Kind::Not: return f_not(map_atoms(f->args[0], on_atom, on_pow));
    case Kind::Exists: return f_exists(f->vars, map_atoms(f->args[0], on_atom, on_pow));
    case Kind::And:
    case Kind::Or: {
      std::vector<Formula> args;
      args.reserve(f->args.size());
      for (const auto& a : f->args) args.push_back(map_atoms(a, on_atom, on_pow));
      return f->kind == Kind::And ? f_and(std::move(args)) : f_or(std::move(args));
    }
  }
  return f;
}

LaurentPoly laurent_normalize(const LaurentPoly& p) { return p.laurent_normalized(); }

Formula laurent_normalize(const Formula& f) {
  return map_atoms(f, [](const LaurentPoly& p, Rel r) { return f_atom(p.laurent_normalized(), r); });
}

Formula substitute(const Formula& f, const Var& x, const Monomial& m) {
  return map_atoms(
      f,
      [&](const LaurentPoly& p, Rel r) {
        if (!p.has_var(x)) return f_atom(p, r);
        return f_atom(p.subst_monomial(x, m).laurent_normalized(), r);
      },
      [&](const LaurentPoly& p) { return f_pow(p.has_var(x) ? p.subst_monomial(x, m) : p); });
}

Formula substitute_poly(const Formula& f, const Var& x, const LaurentPoly& q) {
  return map_atoms(
      f,
      [&](const LaurentPoly& p, Rel r) {
        if (!p.has_var(x)) return f_atom(p, r);
        return f_atom(p.subst_poly(x, q).laurent_normalized(), r);
      },
      [&](const LaurentPoly& p) { return f_pow(p.has_var(x) ? p.subst_poly(x, q) : p); });
}

Formula rename_var(const Formula& f, const Var& from, const Var& to) {
  if (f->kind == Kind::Exists) {
    std::vector<Var> vars = f->vars;
    for (auto& v : vars)
      if (v == from) v = to;
    return f_exists(std::move(vars), rename_var(f->args[0], from, to));
  }
  if (f->kind == Kind::And || f->kind == Kind::Or || f->kind == Kind::Not) {
    std::vector<Formula> args;
    for (const auto& a : f->args) args.push_back(rename_var(a, from, to));
    if (f->kind == Kind::Not) return f_not(args[0]);
    return f->kind == Kind::And ? f_and(std::move(args)) : f_or(std::move(args));
  }
  if (f->kind == Kind::Atom) return f_atom(f->poly.rename(from, to), f->rel);
  if (f->kind == Kind::Pow) return f_pow(f->poly.rename(from, to));
  return f;
}

bool eval_formula(const Formula& f, const std::function<int(const LaurentPoly&)>& sign_of,
                  const std::function<bool(const LaurentPoly&)>& pow_holds) {
  switch (f->kind) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::Atom: {
      int s = sign_of(f->poly);
      return f->rel == Rel::Lt ? s < 0 : s == 0;
    }
    case Kind::Pow:
      if (!pow_holds) fail(ErrorKind::Precondition, "pow predicate in ground evaluation");
      return pow_holds(f->poly);
    case Kind::Not: return !eval_formula(f->args[0], sign_of, pow_holds);
    case Kind::And:
      for (const auto& a : f->args)
        if (!eval_formula(a, sign_of, pow_holds)) return false;
      return true;
    case Kind::Or:
      for (const auto& a : f->args)
        if (eval_formula(a, sign_of, pow_holds)) return true;
      return false;
    case Kind::Exists: fail(ErrorKind::Precondition, "quantifier in ground evaluation");
  }
  return false;
}

std::vector<LaurentPoly> atom_polys(const Formula& f) {
  std::vector<LaurentPoly> out;
  std::set<LaurentPoly> seen;
  std::function<void(const Formula&)> walk = [&](const Formula& g) {
    if (g->kind == Kind::Atom && seen.insert(g->poly).second) out.push_back(g->poly);
    for (const auto& a : g->args) walk(a);
  };
  walk(f);
  return out;
}

}  // namespace xipow
