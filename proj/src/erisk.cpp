#include "xipow/erisk.hpp"

#include <numeric>
#include <set>

#include "xipow/barrier.hpp"
#include "xipow/error.hpp"

namespace xipow {

// ---------------------------------------------------------------- game model

std::size_t StochasticGame::index(const std::string& name) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i].name == name) return i;
  fail(ErrorKind::InvalidGame, "unknown state " + name);
}

void validate(const StochasticGame& g) {
  if (g.states.empty()) fail(ErrorKind::InvalidGame, "game has no states");
  std::set<std::string> names;
  for (const auto& s : g.states)
    if (!names.insert(s.name).second) fail(ErrorKind::InvalidGame, "duplicate state " + s.name);
  g.index(g.initial);
  for (const auto& s : g.states) {
    if (s.reward < 0) fail(ErrorKind::InvalidGame, "negative reward at " + s.name);
    if (s.target && *s.target != 0 && *s.target != 1) fail(ErrorKind::InvalidGame, "target value must be 0 or 1");
    if (s.actions.empty() && !s.target) fail(ErrorKind::InvalidGame, "state " + s.name + " has no actions");
    for (const auto& a : s.actions) {
      if (a.dist.empty()) fail(ErrorKind::InvalidGame, "empty distribution at " + s.name);
      Rat total = 0;
      for (const auto& [t, p] : a.dist) {
        g.index(t);
        if (p < 0) fail(ErrorKind::InvalidGame, "negative probability at " + s.name);
        total += p;
      }
      if (total != 1) fail(ErrorKind::InvalidGame, "distribution of " + s.name + "/" + a.name + " sums to " + to_string(total));
    }
  }
}

namespace {

Rat rat_field(const nlohmann::json& j) {
  if (j.is_string()) return parse_rat(j.get<std::string>());
  if (j.is_number_integer()) return Rat(j.get<long>());
  fail(ErrorKind::Parse, "expected a rational as a string or an integer");
}

}  // namespace

StochasticGame game_from_json(const nlohmann::json& j) {
  StochasticGame g;
  try {
    for (const auto& sj : j.at("states")) {
      GameState s;
      s.name = sj.at("name").get<std::string>();
      std::string player = sj.value("player", "max");
      if (player == "max") s.player = Player::Max;
      else if (player == "min") s.player = Player::Min;
      else fail(ErrorKind::InvalidGame, "player must be max or min");
      for (const auto& aj : sj.value("actions", nlohmann::json::array())) {
        GameAction a;
        a.name = aj.value("name", "");
        for (const auto& e : aj.at("dist")) a.dist.emplace_back(e.at(0).get<std::string>(), rat_field(e.at(1)));
        s.actions.push_back(std::move(a));
      }
      s.reward = sj.contains("reward") ? rat_field(sj.at("reward")) : Rat(0);
      if (sj.contains("target") && !sj.at("target").is_null()) s.target = sj.at("target").get<int>();
      g.states.push_back(std::move(s));
    }
    g.initial = j.at("initial").get<std::string>();
    g.threshold = j.contains("threshold") ? rat_field(j.at("threshold")) : Rat(0);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("game JSON: ") + e.what());
  }
  validate(g);
  return g;
}

nlohmann::json game_to_json(const StochasticGame& g) {
  nlohmann::json states = nlohmann::json::array();
  for (const auto& s : g.states) {
    nlohmann::json actions = nlohmann::json::array();
    for (const auto& a : s.actions) {
      nlohmann::json dist = nlohmann::json::array();
      for (const auto& [t, p] : a.dist) dist.push_back({t, to_string(p)});
      actions.push_back({{"name", a.name}, {"dist", dist}});
    }
    states.push_back({{"name", s.name},
                      {"player", s.player == Player::Max ? "max" : "min"},
                      {"actions", actions},
                      {"reward", to_string(s.reward)},
                      {"target", s.target ? nlohmann::json(*s.target) : nlohmann::json(nullptr)}});
  }
  return {{"states", states}, {"initial", g.initial}, {"threshold", to_string(g.threshold)}};
}

// ---------------------------------------------------------------- constraint system

Var state_var(const std::string& name) { return "v[" + name + "]"; }

ConstraintSystem build_constraints(const StochasticGame& g) {
  validate(g);
  ConstraintSystem cs;
  Int d = g.threshold.get_den();
  for (const auto& s : g.states) d = lcm(d, Int(s.reward.get_den()));
  cs.d = d;
  auto scaled = [&](const Rat& e) {
    Rat x = e * Rat(d);
    return to_i64(Int(x.get_num()));
  };

  for (const auto& s : g.states) cs.vars.push_back(state_var(s.name));
  std::vector<Formula> parts;
  LaurentPoly v0 = LaurentPoly::var(state_var(g.initial));
  parts.push_back(laurent_normalize(f_le(v0 - LaurentPoly::xi(scaled(g.threshold)))));
  for (const auto& s : g.states)
    if (s.target) parts.push_back(f_eq(LaurentPoly::var(state_var(s.name)) - LaurentPoly(*s.target)));
  for (const auto& s : g.states) {
    if (s.target) continue;
    LaurentPoly z = LaurentPoly::var(state_var(s.name));
    LaurentPoly w = LaurentPoly::xi(scaled(s.reward));
    // One polynomial per action: L z - xi^r sum L p v(s'), with L clearing the denominators.
    std::vector<LaurentPoly> diffs;
    for (const auto& a : s.actions) {
      Int L = 1;
      for (const auto& [t, p] : a.dist) L = lcm(L, Int(p.get_den()));
      LaurentPoly sum;
      for (const auto& [t, p] : a.dist) {
        Rat c = p * Rat(L);
        sum += LaurentPoly::var(state_var(t)).scaled(Int(c.get_num()));
      }
      diffs.push_back(z.scaled(L) - w * sum);
    }
    if (diffs.size() == 1) {
      parts.push_back(f_eq(diffs[0]));
      continue;
    }
    // z = max(x_i): z >= x_i for all i, and z = x_i for some i (min symmetric).
    std::vector<Formula> some;
    for (const auto& p : diffs) {
      parts.push_back(f_le(s.player == Player::Max ? -p : p));
      some.push_back(f_eq(p));
    }
    parts.push_back(f_or(std::move(some)));
  }
  cs.phi = f_and(std::move(parts));
  return cs;
}

// ---------------------------------------------------------------- decision

namespace {

// The algebraic number k * a.
AlgebraicNumber scale(const AlgebraicNumber& a, const Rat& k) {
  if (auto r = is_rational(a)) return from_rational(*r * k);
  // a is a root of q, so k a is a root of sum c_i num^(n-i) den^i y^i with k = num/den.
  Int num = k.get_num(), den = k.get_den();
  const auto& c = a.q.coeffs();
  int n = a.q.degree();
  std::vector<Int> out(c.size());
  for (int i = 0; i <= n; ++i) out[i] = c[i] * pow_int(num, n - i) * pow_int(den, i);
  Rat lo = a.lo * k, hi = a.hi * k;
  if (lo > hi) std::swap(lo, hi);
  return canonicalize(UniPoly(out), lo, hi);
}

}  // namespace

BaseDescriptor risk_base(const RiskBase& b, const AlgebraicNumber& eta, const Int& d) {
  RawBase raw;
  raw.eta = scale(eta, Rat(-1) / Rat(d));
  if (b.euler) {
    raw.kind = BaseKind::EPowEta;
  } else {
    raw.kind = BaseKind::AlphaPowEta;
    raw.alpha = *b.alpha;
  }
  return classify_base(raw);
}

bool erisk_decide(const StochasticGame& g, const RiskBase& b, const AlgebraicNumber& eta, const EriskOptions& opts) {
  if (compare(eta, Rat(0)) <= 0) fail(ErrorKind::InvalidParams, "eta must be positive");
  if (!b.euler && (!b.alpha || compare(*b.alpha, Rat(1)) <= 0)) fail(ErrorKind::InvalidParams, "base must exceed 1");
  ConstraintSystem cs = build_constraints(g);
  BaseDescriptor xi = risk_base(b, eta, cs.d);
  SignOracle oracle(xi, opts.sign);
  Simplifier fold = [&](const Formula& f) { return fold_constants(f, &oracle); };
  Formula psi = fold_constants(qe_eliminate(cs.phi, cs.vars, opts.engine, nullptr, fold), &oracle);
  if (!free_vars(psi).empty()) fail(ErrorKind::Precondition, "elimination left free variables");
  return holds_with(psi, {}, oracle);
}

}  // namespace xipow
