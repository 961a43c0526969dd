#include "xipow/xz.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "xipow/error.hpp"

namespace xipow {

// ---------------------------------------------------------------- exponent sets

ExponentSet ExponentSet::interval(const Int& L, bool closed_form) {
  ExponentSet s;
  s.L = L;
  s.closed_form = closed_form;
  return s;
}

bool ExponentSet::contains(const Int& g) const {
  if (L) return abs(g) <= *L;
  if (!g.fits_slong_p()) return false;
  return values.count(g.get_si()) > 0;
}

std::size_t ExponentSet::size() const { return values.size(); }

// ---------------------------------------------------------------- helpers

namespace {

Monomial xi_mono(std::int64_t e) { return e == 0 ? Monomial() : Monomial::of(kXi, e); }

std::string poly_key(const std::vector<GTerm>& terms) {
  std::string key;
  for (const auto& t : terms) {
    key += LaurentPoly::term(1, t.mono).to_sexpr();
    key += ':';
    key += t.coeff.to_sexpr();
    key += ';';
  }
  return key;
}

std::int64_t exact_lambda(const LaurentPoly& q, const SignOracle& oracle) { return oracle.lambda_floor(q); }

// (num, den) integer constants with num/den = r > 0.
std::pair<LaurentPoly, LaurentPoly> rat_pair(const Rat& r) {
  return {LaurentPoly(Int(r.get_num())), LaurentPoly(Int(r.get_den()))};
}

std::int64_t min_xi_exp(const std::vector<GTerm>& terms) {
  std::int64_t m = 0;
  for (const auto& t : terms)
    if (!t.coeff.is_zero()) m = std::min(m, t.coeff.min_exp(kXi));
  return m;
}

std::set<std::int64_t> sumset(const std::set<std::int64_t>& a, const std::set<std::int64_t>& b, int sign_b) {
  std::set<std::int64_t> out;
  for (auto x : a)
    for (auto y : b) out.insert(x + sign_b * y);
  return out;
}

}  // namespace

std::vector<GTerm> split_by_monomial(const LaurentPoly& p) {
  std::map<Monomial, LaurentPoly> groups;
  for (const auto& [m, c] : p.terms()) {
    std::int64_t e = m.exp(kXi);
    groups[m.without(kXi)] += LaurentPoly::term(c, xi_mono(e));
  }
  std::vector<GTerm> out;
  for (auto& [m, q] : groups)
    if (!q.is_zero()) out.push_back({q, m});
  return out;
}

std::int64_t ceil_log_xi(const Int& n, const SignOracle& oracle) {
  if (n < 1) fail(ErrorKind::Precondition, "logarithm of a nonpositive integer");
  if (n == 1) return 0;
  std::int64_t z = oracle.lambda_floor(LaurentPoly(n));
  if (oracle.sign(LaurentPoly::xi(z) - LaurentPoly(n)) == 0) return z;
  return z + 1;
}

std::vector<DominantPair> dominant_pair_candidates(const XvPoly& r, const SignOracle& oracle) {
  std::vector<DominantPair> out;
  std::int64_t n = 0;
  for (const auto& [i, p] : r)
    if (!p.is_zero()) n = std::max(n, i);
  if (n == 0) return out;
  std::int64_t g = 1 + ceil_log_xi(Int(static_cast<long>(n)), oracle);
  for (std::int64_t j = 0; j <= n; ++j)
    for (std::int64_t k = j + 1; k <= n; ++k)
      for (std::int64_t s = -g; s <= g; ++s)
        for (int o = 0; o < 2; ++o) out.push_back({j, k, s, o});
  return out;
}

// ---------------------------------------------------------------- G-sets

ExponentSet compute_G(const std::vector<GTerm>& input, const SignOracle& oracle) {
  ExponentSet result;
  // Terms vanishing at xi do not contribute to p.
  std::int64_t shift = -min_xi_exp(input);
  std::vector<LaurentPoly> qs;
  for (const auto& t : input) {
    if (t.coeff.is_zero()) continue;
    LaurentPoly q = shift ? t.coeff.times(xi_mono(shift)) : t.coeff;
    if (oracle.sign(q) != 0) qs.push_back(q);
  }
  if (qs.empty()) return result;

  std::vector<Rat> upper;
  for (const auto& q : qs) upper.push_back(oracle.enclose(q).hi);

  const LaurentPoly xm1 = LaurentPoly::xi() - 1;
  const LaurentPoly xp1 = LaurentPoly::xi() + 1;
  std::set<std::pair<LaurentPoly, std::uint64_t>> seen;
  std::uint64_t full = (qs.size() >= 64) ? ~0ull : ((1ull << qs.size()) - 1);
  if (qs.size() >= 64) fail(ErrorKind::ResourceLimit, "too many monomials for the G-set construction");

  // Q is nonzero at xi; used is the set of terms merged into Q.
  std::function<void(const LaurentPoly&, std::uint64_t)> dfs = [&](const LaurentPoly& Q, std::uint64_t used) {
    if (!seen.insert({Q, used}).second) return;
    if (oracle.sign(Q) > 0) {
      result.values.insert(exact_lambda(Q, oracle));
      std::int64_t lo = exact_lambda(Q * xm1, oracle) - 1;
      std::int64_t hi = exact_lambda(Q * xp1, oracle) - 1;
      for (std::int64_t g = lo; g <= hi; ++g) result.values.insert(g);
    }
    if (used == full) return;
    Rat rest = 0;
    for (std::size_t i = 0; i < qs.size(); ++i)
      if (!(used >> i & 1)) rest += upper[i];
    Rat ratio = rest / oracle.enclose(Q).lo;
    auto [num, den] = rat_pair(ratio);
    // xi^g < xi * rest / |Q|, hence g <= lambda(rest / |Q|) + 1.
    std::int64_t gmax = oracle.lambda_floor(num, den) + 1;
    for (std::size_t i = 0; i < qs.size(); ++i) {
      if (used >> i & 1) continue;
      for (std::int64_t g = 0; g <= gmax; ++g) {
        LaurentPoly next = Q.times(xi_mono(g)) + qs[i];
        if (next.is_zero() || oracle.sign(next) == 0) continue;
        dfs(next, used | (1ull << i));
      }
    }
  };
  for (std::size_t i = 0; i < qs.size(); ++i) dfs(qs[i], 1ull << i);

  if (shift) {
    std::set<std::int64_t> shifted;
    for (auto g : result.values) shifted.insert(g - shift);
    result.values = std::move(shifted);
  }
  return result;
}

Int closed_form_G_L(std::uint64_t n, const Int& c, std::uint64_t k, const Int& D, const Int& H) {
  Int base = pow2_int(to_i64(3 * c)) * D * ceil_ln(Rat(H));
  Int e = 6 * Int(static_cast<unsigned long>(n)) * pow_int(Int(static_cast<unsigned long>(k)), 3 * n);
  return pow_int(base, to_i64(e));
}

Int closed_form_F_L(std::uint64_t n, std::uint64_t M, const Int& c, std::uint64_t k, const Int& D,
                    const Int& H) {
  Int base = pow2_int(to_i64(4 * c)) * D * ceil_ln(Rat(H));
  Int e = 6 * Int(static_cast<unsigned long>(M)) * pow_int(Int(static_cast<unsigned long>(k)), 3 * M);
  return Int(static_cast<unsigned long>(n)) * pow_int(base, to_i64(e));
}

// ---------------------------------------------------------------- F-sets

bool FTuple::operator<(const FTuple& o) const {
  if (j != o.j) return j < o.j;
  if (g != o.g) return g < o.g;
  return mono < o.mono;
}

namespace {

const ExponentSet& cached_G(const std::vector<GTerm>& terms, const SignOracle& oracle, GCache& cache) {
  std::string key = poly_key(terms);
  auto it = cache.sets.find(key);
  if (it != cache.sets.end()) return it->second;
  ExponentSet s = compute_G(terms, oracle);
  ++cache.computed;
  cache.max_size = std::max<std::uint64_t>(cache.max_size, s.size());
  return cache.sets.emplace(key, std::move(s)).first->second;
}

}  // namespace

std::vector<FTuple> compute_F(const XvPoly& r, const SignOracle& oracle, GCache* cache) {
  GCache local;
  GCache& gc = cache ? *cache : local;
  std::int64_t n = 0;
  for (const auto& [i, p] : r)
    if (!p.is_zero()) n = std::max(n, i);
  if (n == 0) return {};

  std::int64_t g = 1 + ceil_log_xi(Int(static_cast<long>(n)), oracle);
  std::set<std::int64_t> st;  // s + t
  for (std::int64_t v = -g - n; v <= g + n; ++v) st.insert(v);

  std::set<FTuple> out;
  for (auto a = r.begin(); a != r.end(); ++a) {
    if (a->second.is_zero()) continue;
    for (auto b = std::next(a); b != r.end(); ++b) {
      if (b->second.is_zero()) continue;
      std::int64_t mu = b->first - a->first;
      for (int o = 0; o < 2; ++o) {
        LaurentPoly num = o == 0 ? -a->second : a->second;
        LaurentPoly den = o == 0 ? b->second : -b->second;
        auto tn = split_by_monomial(num);
        auto td = split_by_monomial(den);
        const ExponentSet& gn = cached_G(tn, oracle, gc);
        if (gn.empty()) continue;
        const ExponentSet& gd = cached_G(td, oracle, gc);
        if (gd.empty()) continue;
        std::set<std::int64_t> exps = sumset(sumset(st, gn.values, 1), gd.values, -1);
        for (const auto& t1 : tn)
          for (const auto& t2 : td) {
            Monomial m = t1.mono * t2.mono.pow(-1);
            for (auto e : exps) out.insert({mu, e, m});
          }
      }
    }
  }
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------- relativisation

std::vector<RelBranch> relativise(const Formula& phi, const Var& u, const SignOracle& oracle, GCache* cache) {
  std::vector<LaurentPoly> Q;
  for (const auto& p : atom_polys(phi)) {
    LaurentPoly q = p.laurent_normalized();
    if (q.has_var(u) && std::find(Q.begin(), Q.end(), q) == Q.end()) Q.push_back(q);
  }
  LaurentPoly um1 = LaurentPoly::var(u) - 1;
  if (std::find(Q.begin(), Q.end(), um1) == Q.end()) Q.push_back(um1);

  std::vector<RelBranch> out;
  std::set<std::tuple<std::int64_t, std::int64_t, Monomial>> seen;
  for (const auto& q : Q) {
    XvPoly r;
    for (auto& [e, c] : q.coeffs_in(u)) r[e] = c;
    for (const auto& t : compute_F(r, oracle, cache))
      for (std::int64_t l = -1; l <= 1; ++l) {
        std::int64_t k = t.j * l + t.g;
        if (seen.insert({t.j, k, t.mono}).second) out.push_back({t.j, k, t.mono, phi});
      }
  }
  return out;
}

namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

std::vector<RemovedBranch> remove_u(const Formula& phi, const Var& u, std::int64_t j, std::int64_t k,
                                    const std::vector<std::pair<Var, std::int64_t>>& ell,
                                    const std::string& suffix) {
  if (j < 1) fail(ErrorKind::Precondition, "remove_u needs j >= 1");
  std::vector<RemovedBranch> out;
  std::size_t n = ell.size();
  std::vector<std::int64_t> r(n, 0);
  while (true) {
    std::int64_t dot = k;
    for (std::size_t i = 0; i < n; ++i) dot += r[i] * ell[i].second;
    if (floor_mod(dot, j) == 0) {
      RemovedBranch b;
      b.r = r;
      b.g = dot / j;
      Formula f = phi;
      Monomial um = xi_mono(b.g);
      for (std::size_t i = 0; i < n; ++i) {
        const Var& y = ell[i].first;
        Var z = j == 1 ? y : y + "@" + suffix;
        b.fresh[y] = z;
        if (j != 1) f = substitute(f, y, Monomial::of(z, j) * xi_mono(r[i]));
        um = um * Monomial::of(z, ell[i].second);
      }
      b.phi = substitute(f, u, um);
      out.push_back(std::move(b));
    }
    std::size_t i = 0;
    while (i < n && ++r[i] == j) r[i++] = 0;
    if (i == n) break;
  }
  return out;
}

// ---------------------------------------------------------------- backpropagation

Assignment undo_step(const TraceStep& step, const Assignment& after) {
  auto value = [&](const Var& v) {
    auto it = after.find(v);
    return it == after.end() ? std::int64_t{0} : it->second;
  };
  Assignment before = after;
  std::int64_t u = step.g;
  for (const auto& [z, l] : step.ell) u += l * value(z);
  for (const auto& [y, zf] : step.f) {
    std::int64_t zv = value(zf.first);
    if (zf.first != y) before.erase(zf.first);
    before[y] = step.j * zv + zf.second;
  }
  before[step.eliminated] = u;
  return before;
}

std::vector<Assignment> backpropagate(const SubstitutionTrace& trace, const Assignment& final) {
  std::vector<Assignment> out(trace.size() + 1);
  out[trace.size()] = final;
  for (std::size_t i = trace.size(); i-- > 0;) out[i] = undo_step(trace[i], out[i + 1]);
  return out;
}

// ---------------------------------------------------------------- evaluation

namespace {

bool atom_truth(int s, Rel rel) { return rel == Rel::Lt ? s < 0 : s == 0; }

}  // namespace

Formula simplify_ground(const Formula& f, const SignOracle& oracle) {
  switch (f->kind) {
    case Kind::True:
    case Kind::False: return f;
    case Kind::Atom: {
      LaurentPoly p = f->poly.reduced();
      if (p.is_ground()) return f_bool(atom_truth(oracle.sign(p), f->rel));
      return f_atom(std::move(p), f->rel);
    }
    case Kind::Not: {
      Formula a = simplify_ground(f->args[0], oracle);
      if (a->kind == Kind::True) return f_false();
      if (a->kind == Kind::False) return f_true();
      return f_not(a);
    }
    case Kind::And:
    case Kind::Or: {
      bool is_and = f->kind == Kind::And;
      std::vector<Formula> args;
      for (const auto& a : f->args) {
        Formula s = simplify_ground(a, oracle);
        if (s->kind == (is_and ? Kind::False : Kind::True)) return s;
        if (s->kind == (is_and ? Kind::True : Kind::False)) continue;
        args.push_back(s);
      }
      return is_and ? f_and(std::move(args)) : f_or(std::move(args));
    }
    case Kind::Pow:
    case Kind::Exists: fail(ErrorKind::Precondition, "expected a quantifier-free formula over power variables");
  }
  return f;
}

bool holds_at(const Formula& f, const Assignment& a, const SignOracle& oracle) {
  auto sign_of = [&](const LaurentPoly& p) {
    LaurentPoly q = p;
    for (const auto& v : p.vars()) {
      auto it = a.find(v);
      if (it == a.end()) fail(ErrorKind::Precondition, "unassigned variable " + v);
      q = q.subst_monomial(v, xi_mono(it->second));
    }
    return oracle.sign(q);
  };
  return eval_formula(f, sign_of);
}

// ---------------------------------------------------------------- solver

namespace {

void check_input(const Formula& f) {
  switch (f->kind) {
    case Kind::Pow:
    case Kind::Exists: fail(ErrorKind::Precondition, "expected a quantifier-free formula over power variables");
    default:
      for (const auto& a : f->args) check_input(a);
  }
}

class QeSolver {
 public:
  QeSolver(const SignOracle& oracle, const XzOptions& opts, XzStats& stats)
      : oracle_(oracle), opts_(opts), stats_(stats) {}

  // Assignment of the free variables of phi, with the trace of the successful branch.
  std::optional<std::pair<Assignment, SubstitutionTrace>> solve(const Formula& input, int depth) {
    Formula phi = simplify_ground(input, oracle_);
    if (phi->kind == Kind::False) return std::nullopt;
    std::set<Var> vars = free_vars(phi);
    if (vars.empty()) {
      ++stats_.candidates;
      if (phi->kind == Kind::True || holds_at(phi, {}, oracle_)) return std::make_pair(Assignment{}, SubstitutionTrace{});
      return std::nullopt;
    }
    std::string key = to_sexpr(phi);
    if (auto it = failed_.find(key); it != failed_.end()) {
      ++stats_.memo_hits;
      return std::nullopt;
    }

    const Var u = *vars.begin();
    for (const auto& br : relativise(phi, u, oracle_, &cache_)) {
      std::vector<std::pair<Var, std::int64_t>> ell;
      for (const auto& [v, e] : br.mono.exps()) ell.push_back({v, e});
      std::string suffix = std::to_string(depth + 1);
      for (auto& rb : remove_u(phi, u, br.j, br.k, ell, suffix)) {
        if (++stats_.branches > opts_.branch_budget)
          fail(ErrorKind::ResourceLimit, "branch budget exceeded");
        auto sub = solve(rb.phi, depth + 1);
        if (!sub) continue;
        TraceStep step;
        step.eliminated = u;
        step.j = br.j;
        step.g = rb.g;
        for (std::size_t i = 0; i < ell.size(); ++i) {
          const Var& z = rb.fresh.at(ell[i].first);
          step.f[ell[i].first] = {z, rb.r[i]};
          step.ell[z] = ell[i].second;
        }
        step.before = phi;
        Assignment a = undo_step(step, sub->first);
        // Variables that vanished along the way may take any value.
        for (const auto& v : vars) a.emplace(v, 0);
        Assignment restricted;
        for (const auto& v : vars) restricted[v] = a.at(v);
        if (!holds_at(phi, restricted, oracle_)) continue;
        SubstitutionTrace trace{step};
        trace.insert(trace.end(), sub->second.begin(), sub->second.end());
        return std::make_pair(restricted, trace);
      }
    }
    failed_.insert(key);
    return std::nullopt;
  }

  const GCache& cache() const { return cache_; }

 private:
  const SignOracle& oracle_;
  const XzOptions& opts_;
  XzStats& stats_;
  GCache cache_;
  std::set<std::string> failed_;
};

XzVerdict enumerate(const Formula& psi, const SignOracle& oracle, const XzOptions& opts) {
  XzVerdict v;
  std::set<Var> vs = free_vars(psi);
  std::vector<Var> vars(vs.begin(), vs.end());
  std::int64_t B = opts.enumerate_bound;
  Int total = pow_int(Int(static_cast<long>(2 * B + 1)), vars.size());
  if (total > Int(static_cast<unsigned long>(opts.candidate_budget)))
    fail(ErrorKind::ResourceLimit, "candidate budget exceeded");
  std::vector<std::int64_t> e(vars.size(), -B);
  while (true) {
    Assignment a;
    for (std::size_t i = 0; i < vars.size(); ++i) a[vars[i]] = e[i];
    ++v.stats.candidates;
    if (holds_at(psi, a, oracle)) {
      v.sat = true;
      v.witness = a;
      return v;
    }
    std::size_t i = 0;
    while (i < vars.size() && ++e[i] > B) e[i++] = -B;
    if (i == vars.size()) break;
  }
  return v;
}

}  // namespace

XzVerdict solve_xz(const Formula& psi, const SignOracle& oracle, const XzOptions& opts) {
  check_input(psi);
  if (oracle.sign(LaurentPoly::xi() - 1) <= 0) fail(ErrorKind::Precondition, "the base must exceed 1");
  const BaseDescriptor& b = oracle.base();
  if (!b.transcendental && !b.barrier && !b.is_algebraic())
    fail(ErrorKind::NoStrategy, "base has neither a transcendence flag nor a root barrier");
  std::uint64_t q0 = oracle.stats().queries;

  XzVerdict v;
  if (opts.strategy == XzStrategy::Enumerate) {
    v = enumerate(psi, oracle, opts);
  } else {
    QeSolver solver(oracle, opts, v.stats);
    auto res = solver.solve(psi, 0);
    if (res) {
      v.sat = true;
      v.witness = res->first;
      v.trace = res->second;
      // Variables removed by simplification are unconstrained.
      for (const auto& x : free_vars(psi)) v.witness.emplace(x, 0);
    }
    v.stats.g_sets = solver.cache().computed;
    v.stats.max_g_size = solver.cache().max_size;
  }
  if (v.sat && !holds_at(psi, v.witness, oracle))
    fail(ErrorKind::Precondition, "witness failed verification");
  v.stats.sign_queries = oracle.stats().queries - q0;
  return v;
}

// ---------------------------------------------------------------- witness bound

std::string WitnessBound::structural() const {
  std::ostringstream os;
  os << "(" << base.get_str() << ")^((" << D.get_str() << ")^" << d_exp;
  if (k != 1) os << " * " << k << "^((" << D.get_str() << ")^" << inner_exp << ")";
  os << ")";
  return os.str();
}

WitnessBound witness_bound(std::uint64_t n, const Int& H, const Int& D, const Int& c, std::uint64_t k,
                           std::uint64_t materialize_bits) {
  WitnessBound w;
  Int h = H < 8 ? Int(8) : H;
  w.base = pow2_int(to_i64(c)) * ceil_ln(Rat(h));
  w.D = D;
  w.d_exp = 32 * n * n;
  w.k = k;
  w.inner_exp = 8 * n;

  double log2D = static_cast<double>(bit_length(D));
  double d_bits = log2D * static_cast<double>(w.d_exp);
  if (d_bits > static_cast<double>(materialize_bits)) return w;
  Int exponent = pow_int(D, w.d_exp);
  if (k != 1) {
    double inner_bits = log2D * static_cast<double>(w.inner_exp);
    if (inner_bits > 62) return w;
    Int inner = pow_int(D, w.inner_exp);
    double k_bits = static_cast<double>(inner.get_d()) * static_cast<double>(bit_length(Int(static_cast<unsigned long>(k))));
    if (k_bits > static_cast<double>(materialize_bits)) return w;
    exponent *= pow_int(Int(static_cast<unsigned long>(k)), inner.get_ui());
  }
  w.exponent = exponent;
  double value_bits = exponent.get_d() * static_cast<double>(bit_length(w.base));
  if (value_bits <= static_cast<double>(materialize_bits)) w.value = pow_int(w.base, exponent.get_ui());
  return w;
}

WitnessBound witness_bound(const Formula& psi, const RootBarrier& barrier, std::uint64_t materialize_bits) {
  Int H = 0;
  std::uint64_t deg = 0;
  for (const auto& p : atom_polys(psi)) {
    PolyMetrics m = poly_metrics(p.laurent_normalized());
    H = std::max(H, m.height);
    deg = std::max(deg, m.degree);
  }
  std::uint64_t n = free_vars(psi).size();
  return witness_bound(n, H, Int(static_cast<unsigned long>(deg + 2)), barrier.c, barrier.k, materialize_bits);
}

}  // namespace xipow
