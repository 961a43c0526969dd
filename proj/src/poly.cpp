#include "xipow/poly.hpp"

#include <algorithm>
#include <sstream>

#include "xipow/error.hpp"

namespace xipow {

// ---------------------------------------------------------------- UniPoly

UniPoly::UniPoly(std::vector<Int> coeffs) : c_(std::move(coeffs)) { trim(); }

void UniPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

UniPoly UniPoly::constant(const Int& c) { return UniPoly(std::vector<Int>{c}); }

UniPoly UniPoly::x_pow(std::uint64_t k) {
  std::vector<Int> c(k + 1, Int(0));
  c[k] = 1;
  return UniPoly(std::move(c));
}

UniPoly UniPoly::linear_root(const Rat& r) {
  return UniPoly(std::vector<Int>{-r.get_num(), r.get_den()});
}

const Int& UniPoly::coeff(int i) const {
  static const Int zero(0);
  if (i < 0 || i > degree()) return zero;
  return c_[static_cast<std::size_t>(i)];
}

Int UniPoly::height() const {
  Int h = 0;
  for (const auto& a : c_) h = std::max(h, Int(abs(a)));
  return h;
}

Int UniPoly::content() const {
  Int g = 0;
  for (const auto& a : c_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), a.get_mpz_t());
  return g;
}

UniPoly UniPoly::operator+(const UniPoly& o) const {
  std::vector<Int> r(std::max(c_.size(), o.c_.size()), Int(0));
  for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
  for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
  return UniPoly(std::move(r));
}

UniPoly UniPoly::operator-() const {
  std::vector<Int> r = c_;
  for (auto& a : r) a = -a;
  return UniPoly(std::move(r));
}

UniPoly UniPoly::operator-(const UniPoly& o) const { return *this + (-o); }

UniPoly UniPoly::operator*(const UniPoly& o) const {
  if (is_zero() || o.is_zero()) return UniPoly();
  std::vector<Int> r(c_.size() + o.c_.size() - 1, Int(0));
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return UniPoly(std::move(r));
}

UniPoly UniPoly::scaled(const Int& k) const {
  std::vector<Int> r = c_;
  for (auto& a : r) a *= k;
  return UniPoly(std::move(r));
}

bool UniPoly::operator<(const UniPoly& o) const {
  if (c_.size() != o.c_.size()) return c_.size() < o.c_.size();
  for (std::size_t i = c_.size(); i-- > 0;)
    if (c_[i] != o.c_[i]) return c_[i] < o.c_[i];
  return false;
}

UniPoly UniPoly::derivative() const {
  if (c_.size() <= 1) return UniPoly();
  std::vector<Int> r(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * Int(static_cast<unsigned long>(i));
  return UniPoly(std::move(r));
}

UniPoly UniPoly::primitive() const {
  if (is_zero()) return *this;
  Int g = content();
  if (lead() < 0) g = -g;
  std::vector<Int> r = c_;
  for (auto& a : r) mpz_divexact(a.get_mpz_t(), a.get_mpz_t(), g.get_mpz_t());
  return UniPoly(std::move(r));
}

UniPoly UniPoly::compose_pow(std::uint64_t n) const {
  if (is_zero()) return *this;
  if (n == 0) {
    Int s = 0;
    for (const auto& a : c_) s += a;
    return UniPoly::constant(s);
  }
  std::vector<Int> r((c_.size() - 1) * n + 1, Int(0));
  for (std::size_t i = 0; i < c_.size(); ++i) r[i * n] = c_[i];
  return UniPoly(std::move(r));
}

UniPoly UniPoly::reversed() const {
  std::vector<Int> r(c_.rbegin(), c_.rend());
  UniPoly p(std::move(r));
  return p;
}

UniPoly UniPoly::negated_arg() const {
  std::vector<Int> r = c_;
  for (std::size_t i = 1; i < r.size(); i += 2) r[i] = -r[i];
  return UniPoly(std::move(r));
}

UniPoly UniPoly::shifted(std::uint64_t k) const {
  if (is_zero()) return *this;
  std::vector<Int> r(k, Int(0));
  r.insert(r.end(), c_.begin(), c_.end());
  return UniPoly(std::move(r));
}

Rat UniPoly::eval(const Rat& x) const {
  Rat acc = 0;
  for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + Rat(c_[i]);
  return acc;
}

int UniPoly::sign_at(const Rat& x) const {
  if (is_zero()) return 0;
  const Int& p = x.get_num();
  const Int& q = x.get_den();
  Int acc = c_.back();
  Int qpow = 1;
  for (std::size_t i = c_.size() - 1; i-- > 0;) {
    qpow *= q;
    acc = acc * p + c_[i] * qpow;
  }
  return sgn(acc);
}

std::string UniPoly::to_string(const std::string& var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = c_.size(); i-- > 0;) {
    if (c_[i] == 0) continue;
    Int a = c_[i];
    if (!first) os << (a < 0 ? " - " : " + ");
    else if (a < 0) os << "-";
    Int m = abs(a);
    if (i == 0 || m != 1) os << m;
    if (i > 0) os << var;
    if (i > 1) os << "^" << i;
    first = false;
  }
  return os.str();
}

namespace {

// Scale a rational vector to integers by a positive factor and remove content.
UniPoly to_int_positive(const std::vector<Rat>& v) {
  Int l = 1;
  for (const auto& a : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a.get_den_mpz_t());
  std::vector<Int> r;
  r.reserve(v.size());
  for (const auto& a : v) r.push_back(a.get_num() * (l / a.get_den()));
  UniPoly p(std::move(r));
  Int g = p.content();
  if (g > 1) {
    std::vector<Int> c = p.coeffs();
    for (auto& a : c) mpz_divexact(a.get_mpz_t(), a.get_mpz_t(), g.get_mpz_t());
    return UniPoly(std::move(c));
  }
  return p;
}

std::pair<std::vector<Rat>, std::vector<Rat>> divmod_q(const UniPoly& a, const UniPoly& b) {
  if (b.is_zero()) fail(ErrorKind::ZeroPoly, "division by zero polynomial");
  std::vector<Rat> r(a.coeffs().begin(), a.coeffs().end());
  int db = b.degree();
  std::vector<Rat> q(std::max(0, a.degree() - db + 1), Rat(0));
  Rat lb(b.lead());
  for (int i = a.degree(); i >= db; --i) {
    Rat f = r[static_cast<std::size_t>(i)] / lb;
    if (f == 0) continue;
    q[static_cast<std::size_t>(i - db)] = f;
    for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(i - db + j)] -= f * Rat(b.coeff(j));
  }
  r.resize(static_cast<std::size_t>(std::max(0, db)));
  return {q, r};
}

int variations(const std::vector<UniPoly>& seq, const Rat& x) {
  int last = 0, count = 0;
  for (const auto& s : seq) {
    int v = s.sign_at(x);
    if (v == 0) continue;
    if (last != 0 && v != last) ++count;
    last = v;
  }
  return count;
}

std::vector<UniPoly> sturm_sequence(const UniPoly& p) {
  std::vector<UniPoly> seq{p, p.derivative()};
  while (!seq.back().is_zero() && seq.back().degree() > 0) {
    UniPoly r = rem_primitive(seq[seq.size() - 2], seq.back());
    if (r.is_zero()) break;
    seq.push_back(-r);
  }
  if (seq.back().is_zero()) seq.pop_back();
  return seq;
}

}  // namespace

UniPoly rem_primitive(const UniPoly& a, const UniPoly& b) {
  return to_int_positive(divmod_q(a, b).second);
}

UniPoly quo_primitive(const UniPoly& a, const UniPoly& b) {
  return to_int_positive(divmod_q(a, b).first);
}

UniPoly gcd(const UniPoly& a, const UniPoly& b) {
  UniPoly x = a.primitive(), y = b.primitive();
  while (!y.is_zero()) {
    UniPoly r = rem_primitive(x, y);
    x = y;
    y = r;
  }
  return x.primitive();
}

UniPoly squarefree_part(const UniPoly& p) {
  if (p.degree() <= 0) return p.primitive();
  UniPoly g = gcd(p, p.derivative());
  if (g.degree() <= 0) return p.primitive();
  return quo_primitive(p, g).primitive();
}

std::uint64_t sturm_count(const UniPoly& q, const Rat& lo, const Rat& hi, bool lo_open,
                          bool hi_open) {
  if (q.is_zero()) fail(ErrorKind::ZeroPoly, "sturm_count of the zero polynomial");
  if (lo > hi) fail(ErrorKind::Precondition, "sturm_count with lo > hi");
  bool lo_root = q.sign_at(lo) == 0;
  bool hi_root = q.sign_at(hi) == 0;
  if (lo == hi) return (!lo_open && !hi_open && lo_root) ? 1 : 0;
  std::uint64_t count = 0;
  if (!lo_open && lo_root) ++count;
  if (!hi_open && hi_root) ++count;
  if (q.degree() <= 0) return count;
  UniPoly g = squarefree_part(q);
  if (lo_root) g = quo_primitive(g, UniPoly::linear_root(lo));
  if (hi_root) g = quo_primitive(g, UniPoly::linear_root(hi));
  if (g.degree() <= 0) return count;
  auto seq = sturm_sequence(g);
  int d = variations(seq, lo) - variations(seq, hi);
  return count + static_cast<std::uint64_t>(d);
}

Int cauchy_root_bound(const UniPoly& p) {
  if (p.degree() <= 0) fail(ErrorKind::ConstantPoly, "root bound of a constant polynomial");
  return p.height() + 1;
}

// ---------------------------------------------------------------- Monomial

Monomial Monomial::of(const Var& v, std::int64_t e) {
  Monomial m;
  if (e != 0) m.e_.emplace_back(v, e);
  return m;
}

std::int64_t Monomial::exp(const Var& v) const {
  for (const auto& [name, e] : e_)
    if (name == v) return e;
  return 0;
}

std::int64_t Monomial::total_degree() const {
  std::int64_t s = 0;
  for (const auto& [name, e] : e_) s += e;
  return s;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  auto i = e_.begin(), j = o.e_.begin();
  while (i != e_.end() || j != o.e_.end()) {
    if (j == o.e_.end() || (i != e_.end() && i->first < j->first)) {
      r.e_.push_back(*i++);
    } else if (i == e_.end() || j->first < i->first) {
      r.e_.push_back(*j++);
    } else {
      std::int64_t s = i->second + j->second;
      if (s != 0) r.e_.emplace_back(i->first, s);
      ++i;
      ++j;
    }
  }
  return r;
}

Monomial Monomial::pow(std::int64_t k) const {
  Monomial r;
  if (k == 0) return r;
  for (const auto& [name, e] : e_) r.e_.emplace_back(name, e * k);
  return r;
}

Monomial Monomial::without(const Var& v) const {
  Monomial r;
  for (const auto& pe : e_)
    if (pe.first != v) r.e_.push_back(pe);
  return r;
}

Monomial Monomial::with(const Var& v, std::int64_t e) const {
  return without(v) * Monomial::of(v, e);
}

// ---------------------------------------------------------------- LaurentPoly

LaurentPoly::LaurentPoly(long c) {
  if (c != 0) t_[Monomial()] = Int(c);
}

LaurentPoly::LaurentPoly(const Int& c) {
  if (c != 0) t_[Monomial()] = c;
}

LaurentPoly LaurentPoly::var(const Var& v, std::int64_t e) {
  LaurentPoly p;
  p.t_[Monomial::of(v, e)] = 1;
  return p;
}

LaurentPoly LaurentPoly::term(const Int& c, const Monomial& m) {
  LaurentPoly p;
  if (c != 0) p.t_[m] = c;
  return p;
}

LaurentPoly LaurentPoly::from_uni(const UniPoly& q, const Var& v) {
  LaurentPoly p;
  for (int i = 0; i <= q.degree(); ++i)
    if (q.coeff(i) != 0) p.t_[Monomial::of(v, i)] = q.coeff(i);
  return p;
}

void LaurentPoly::add_term(const Monomial& m, const Int& c) {
  if (c == 0) return;
  auto it = t_.find(m);
  if (it == t_.end()) {
    t_.emplace(m, c);
  } else {
    it->second += c;
    if (it->second == 0) t_.erase(it);
  }
}

bool LaurentPoly::is_constant() const {
  return t_.empty() || (t_.size() == 1 && t_.begin()->first.is_one());
}

std::optional<Int> LaurentPoly::constant_value() const {
  if (t_.empty()) return Int(0);
  if (is_constant()) return t_.begin()->second;
  return std::nullopt;
}

std::set<Var> LaurentPoly::vars() const {
  std::set<Var> s;
  for (const auto& [m, c] : t_)
    for (const auto& [v, e] : m.exps())
      if (v != kXi) s.insert(v);
  return s;
}

bool LaurentPoly::has_var(const Var& v) const {
  for (const auto& [m, c] : t_)
    if (m.has(v)) return true;
  return false;
}

bool LaurentPoly::is_ground() const {
  for (const auto& [m, c] : t_)
    for (const auto& [v, e] : m.exps())
      if (v != kXi) return false;
  return true;
}

std::int64_t LaurentPoly::max_exp(const Var& v) const {
  std::int64_t r = 0;
  bool first = true;
  for (const auto& [m, c] : t_) {
    std::int64_t e = m.exp(v);
    if (first || e > r) r = e;
    first = false;
  }
  return r;
}

std::int64_t LaurentPoly::min_exp(const Var& v) const {
  std::int64_t r = 0;
  bool first = true;
  for (const auto& [m, c] : t_) {
    std::int64_t e = m.exp(v);
    if (first || e < r) r = e;
    first = false;
  }
  return r;
}

Int LaurentPoly::height() const {
  Int h = 0;
  for (const auto& [m, c] : t_) h = std::max(h, Int(abs(c)));
  return h;
}

Int LaurentPoly::content() const {
  Int g = 0;
  for (const auto& [m, c] : t_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  return g;
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& o) {
  for (const auto& [m, c] : o.t_) add_term(m, c);
  return *this;
}

LaurentPoly LaurentPoly::operator+(const LaurentPoly& o) const {
  LaurentPoly r = *this;
  r += o;
  return r;
}

LaurentPoly LaurentPoly::operator-() const {
  LaurentPoly r = *this;
  for (auto& [m, c] : r.t_) c = -c;
  return r;
}

LaurentPoly LaurentPoly::operator-(const LaurentPoly& o) const { return *this + (-o); }

LaurentPoly LaurentPoly::operator*(const LaurentPoly& o) const {
  LaurentPoly r;
  for (const auto& [m1, c1] : t_)
    for (const auto& [m2, c2] : o.t_) r.add_term(m1 * m2, c1 * c2);
  return r;
}

LaurentPoly LaurentPoly::scaled(const Int& k) const {
  if (k == 0) return LaurentPoly();
  LaurentPoly r = *this;
  for (auto& [m, c] : r.t_) c *= k;
  return r;
}

LaurentPoly LaurentPoly::times(const Monomial& mono) const {
  LaurentPoly r;
  for (const auto& [m, c] : t_) r.t_.emplace(m * mono, c);
  return r;
}

LaurentPoly LaurentPoly::pow(std::uint64_t k) const {
  LaurentPoly r(1), base = *this;
  while (k > 0) {
    if (k & 1) r = r * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return r;
}

namespace {

std::set<Var> all_symbols(const std::map<Monomial, Int>& t) {
  std::set<Var> s;
  for (const auto& [m, c] : t)
    for (const auto& [v, e] : m.exps()) s.insert(v);
  return s;
}

}  // namespace

LaurentPoly LaurentPoly::laurent_normalized() const {
  Monomial shift;
  for (const auto& v : all_symbols(t_)) {
    std::int64_t lo = min_exp(v);
    if (lo < 0) shift = shift * Monomial::of(v, -lo);
  }
  return shift.is_one() ? *this : times(shift);
}

LaurentPoly LaurentPoly::reduced() const {
  if (t_.empty()) return *this;
  Monomial shift;
  for (const auto& v : all_symbols(t_)) {
    std::int64_t lo = min_exp(v);
    if (lo != 0) shift = shift * Monomial::of(v, -lo);
  }
  LaurentPoly r = shift.is_one() ? *this : times(shift);
  Int g = r.content();
  if (g > 1)
    for (auto& [m, c] : r.t_) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
  return r;
}

std::map<std::int64_t, LaurentPoly> LaurentPoly::coeffs_in(const Var& v) const {
  std::map<std::int64_t, LaurentPoly> out;
  for (const auto& [m, c] : t_) out[m.exp(v)].t_.emplace(m.without(v), c);
  return out;
}

LaurentPoly LaurentPoly::subst_monomial(const Var& v, const Monomial& mono) const {
  LaurentPoly r;
  for (const auto& [m, c] : t_) {
    std::int64_t e = m.exp(v);
    if (e == 0) {
      r.add_term(m, c);
    } else {
      r.add_term(m.without(v) * mono.pow(e), c);
    }
  }
  return r;
}

LaurentPoly LaurentPoly::subst_poly(const Var& v, const LaurentPoly& q) const {
  if (!has_var(v)) return *this;
  if (min_exp(v) < 0) fail(ErrorKind::NegativeExponent, "polynomial substitution into a negative power");
  auto cs = coeffs_in(v);
  LaurentPoly r;
  LaurentPoly qp(1);
  std::int64_t cur = 0;
  for (const auto& [e, coef] : cs) {
    while (cur < e) {
      qp = qp * q;
      ++cur;
    }
    r += coef * qp;
  }
  return r;
}

LaurentPoly LaurentPoly::rename(const Var& from, const Var& to) const {
  if (from == to || !has_var(from)) return *this;
  return subst_monomial(from, Monomial::of(to, 1));
}

Rat LaurentPoly::eval(const std::map<Var, Rat>& at) const {
  Rat acc = 0;
  for (const auto& [m, c] : t_) {
    Rat term(c);
    for (const auto& [v, e] : m.exps()) {
      auto it = at.find(v);
      if (it == at.end()) fail(ErrorKind::Precondition, "no value for variable " + v);
      if (e < 0 && it->second == 0) fail(ErrorKind::Precondition, "negative power of zero");
      Rat base = e < 0 ? Rat(1) / it->second : it->second;
      term *= pow_rat(base, static_cast<std::uint64_t>(e < 0 ? -e : e));
    }
    acc += term;
  }
  return acc;
}

UniPoly LaurentPoly::to_uni_xi() const {
  if (!is_ground()) fail(ErrorKind::Precondition, "polynomial is not ground in xi");
  return laurent_normalized().to_uni(kXi);
}

UniPoly LaurentPoly::to_uni(const Var& v) const {
  if (t_.empty()) return UniPoly();
  std::int64_t hi = max_exp(v);
  if (min_exp(v) < 0) fail(ErrorKind::NegativeExponent, "negative exponent in univariate view");
  std::vector<Int> c(static_cast<std::size_t>(hi + 1), Int(0));
  for (const auto& [m, coef] : t_) {
    if (!m.without(v).is_one()) fail(ErrorKind::Precondition, "polynomial is not univariate in " + v);
    c[static_cast<std::size_t>(m.exp(v))] = coef;
  }
  return UniPoly(std::move(c));
}

std::string LaurentPoly::to_sexpr() const {
  if (t_.empty()) return "0";
  std::vector<std::string> parts;
  for (const auto& [m, c] : t_) {
    std::vector<std::string> f;
    if (m.is_one() || c != 1) f.push_back(c.get_str());
    for (const auto& [v, e] : m.exps())
      f.push_back(e == 1 ? v : "(^ " + v + " " + std::to_string(e) + ")");
    parts.push_back(f.size() == 1 ? f[0] : [&] {
      std::string s = "(*";
      for (const auto& x : f) s += " " + x;
      return s + ")";
    }());
  }
  if (parts.size() == 1) return parts[0];
  std::string s = "(+";
  for (const auto& x : parts) s += " " + x;
  return s + ")";
}

PolyMetrics poly_metrics(const LaurentPoly& p) {
  PolyMetrics out;
  std::set<Var> syms;
  for (const auto& [m, c] : p.terms()) {
    std::uint64_t total = 0;
    for (const auto& [v, e] : m.exps()) {
      if (e < 0) fail(ErrorKind::NegativeExponent, "proper Laurent polynomial has no metrics");
      total += static_cast<std::uint64_t>(e);
      auto& d = out.per_var_degree[v];
      d = std::max(d, static_cast<std::uint64_t>(e));
      syms.insert(v);
    }
    out.degree = std::max(out.degree, total);
    out.height = std::max(out.height, Int(abs(c)));
  }
  Int m(static_cast<unsigned long>(p.size()));
  Int logh(static_cast<unsigned long>(ceil_log2(Rat(out.height + 1))));
  out.bit_size = m * (logh + Int(static_cast<unsigned long>(syms.size())) *
                                 Int(static_cast<unsigned long>(out.degree)));
  return out;
}

}  // namespace xipow
