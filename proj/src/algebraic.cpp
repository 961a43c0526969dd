#include "xipow/algebraic.hpp"

#include <algorithm>
#include <numeric>

#include "xipow/error.hpp"

namespace xipow {

namespace {

using RatPoly = std::vector<Rat>;

void trim(RatPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

RatPoly to_rat(const UniPoly& p) {
  RatPoly r;
  for (const auto& c : p.coeffs()) r.emplace_back(c);
  return r;
}

RatPoly mul_mod(const RatPoly& a, const RatPoly& b, const RatPoly& g) {
  if (a.empty() || b.empty()) return {};
  RatPoly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  const int d = static_cast<int>(g.size()) - 1;
  for (int k = static_cast<int>(r.size()) - 1; k >= d; --k) {
    if (r[k] == 0) continue;
    Rat f = r[k] / g[d];
    for (int i = 0; i <= d; ++i) r[k - d + i] -= f * g[i];
  }
  if (static_cast<int>(r.size()) > d) r.resize(d);
  trim(r);
  return r;
}

RatPoly pow_mod_x(std::uint64_t e, const RatPoly& g) {
  RatPoly result{Rat(1)};
  RatPoly base = mul_mod(RatPoly{Rat(0), Rat(1)}, RatPoly{Rat(1)}, g);
  while (e) {
    if (e & 1) result = mul_mod(result, base, g);
    e >>= 1;
    if (e) base = mul_mod(base, base, g);
  }
  return result;
}

// A nonzero null vector of the matrix whose columns are `cols`, if one exists.
std::optional<std::vector<Rat>> null_vector(const std::vector<RatPoly>& cols, std::size_t rows) {
  const std::size_t n = cols.size();
  std::vector<std::vector<Rat>> a(rows, std::vector<Rat>(n));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < cols[j].size(); ++i) a[i][j] = cols[j][i];
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  std::optional<std::size_t> free_col;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) {
      if (!free_col) free_col = c;
      continue;
    }
    std::swap(a[p], a[r]);
    Rat inv = 1 / a[r][c];
    for (auto& v : a[r]) v *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rat f = a[i][c];
      for (std::size_t k = 0; k < n; ++k) a[i][k] -= f * a[r][k];
    }
    pivots.push_back(c);
    ++r;
  }
  if (!free_col) return std::nullopt;
  std::vector<Rat> x(n);
  x[*free_col] = 1;
  for (std::size_t i = 0; i < pivots.size(); ++i) x[pivots[i]] = -a[i][*free_col];
  return x;
}

UniPoly integer_poly(const std::vector<Rat>& c) {
  Int l = 1;
  for (const auto& v : c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
  std::vector<Int> out;
  for (const auto& v : c) out.push_back(Int(v * Rat(l)));
  return UniPoly(out).primitive();
}

// Bisects toward a width <= 2^-L, stopping early on an exact rational root.
AlgebraicNumber bisect_to(const AlgebraicNumber& a, const Rat& width) {
  if (a.is_point()) return a;
  UniPoly g = squarefree_part(a.q);
  Rat lo = a.lo, hi = a.hi;
  int s_lo = g.sign_at(lo);
  if (s_lo == 0) return {a.q, lo, lo};
  if (g.sign_at(hi) == 0) return {a.q, hi, hi};
  while (hi - lo > width) {
    Rat mid = (lo + hi) / 2;
    int s = g.sign_at(mid);
    if (s == 0) return {a.q, mid, mid};
    if (s == s_lo) lo = mid;
    else hi = mid;
  }
  return {a.q, lo, hi};
}

AlgebraicNumber negated(const AlgebraicNumber& a) { return {a.q.negated_arg(), -a.hi, -a.lo}; }

// Positive-value representation with lo > 0.
AlgebraicNumber positive_form(const AlgebraicNumber& a) {
  if (compare(a, Rat(0)) <= 0) fail(ErrorKind::NonpositiveBase, "base must be positive");
  AlgebraicNumber b = a;
  while (b.lo <= 0) {
    Rat w = (b.hi - b.lo) / 2;
    b = bisect_to(b, w);
  }
  return b;
}

// Upper bound on the derivative of x^r over [lo, hi], 0 < lo.
Rat derivative_bound(const Rat& r, const Rat& lo, const Rat& hi) {
  if (r >= 1) {
    Int e = ceil_rat(r - 1);
    return r * pow_rat(std::max(Rat(1), hi), static_cast<std::uint64_t>(to_i64(e)));
  }
  return r * std::max(Rat(1), Rat(1 / lo));
}

std::int64_t separation_bits(const UniPoly& q) {
  // -floor(log2 D) for D = 2^{-d-1} d^{-4d} h^{-2d}.
  const std::int64_t d = q.degree();
  Rat inv_d = pow2(d + 1) * Rat(pow_int(Int(static_cast<long>(d)), 4 * d)) *
              Rat(pow_int(q.height(), 2 * d));
  return ceil_log2(inv_d);
}

}  // namespace

AlgebraicNumber from_rational(const Rat& r) { return {UniPoly::linear_root(r), r, r}; }

AlgebraicNumber canonicalize(const UniPoly& q, const Rat& lo, const Rat& hi) {
  if (q.is_zero() || lo > hi || sturm_count(q, lo, hi) != 1)
    fail(ErrorKind::NotUniqueRoot, "polynomial " + q.to_string() + " does not have exactly one root in [" +
                                       to_string(lo) + ", " + to_string(hi) + "]");
  UniPoly g = squarefree_part(q);
  if (g.sign_at(lo) == 0) return {q, lo, lo};
  if (g.sign_at(hi) == 0) return {q, hi, hi};
  Rat l = lo, h = hi;
  for (;;) {
    Int first = floor_rat(l) + 1;
    Int last = ceil_rat(h) - 1;
    if (first > last) break;
    Int c = floor_rat((l + h) / 2);
    c = std::clamp(c, first, last);
    Rat cr(c);
    if (g.sign_at(cr) == 0) return {q, cr, cr};
    if (sturm_count(g, l, cr, true, true) >= 1) h = cr;
    else l = cr;
  }
  return {q, l, h};
}

bool is_canonical(const AlgebraicNumber& a) {
  if (a.q.is_zero() || a.lo > a.hi) return false;
  if (a.is_point()) return a.q.sign_at(a.lo) == 0;
  if (sturm_count(a.q, a.lo, a.hi) != 1) return false;
  if (a.q.sign_at(a.lo) == 0 || a.q.sign_at(a.hi) == 0) return false;
  return floor_rat(a.lo) + 1 >= ceil_rat(a.hi);
}

std::pair<Rat, Rat> refine(const AlgebraicNumber& a, std::int64_t L) {
  AlgebraicNumber b = bisect_to(a, pow2(-L));
  return {b.lo, b.hi};
}

std::optional<Rat> is_rational(const AlgebraicNumber& a) {
  if (a.is_point()) return a.lo;
  // A rational root p/s in lowest terms has s | lead, so lead * alpha is an integer.
  UniPoly g = squarefree_part(a.q);
  Int lead = abs(g.lead());
  AlgebraicNumber b = bisect_to(a, Rat(1, 2) / Rat(lead));
  if (b.is_point()) return b.lo;
  Int first = ceil_rat(b.lo * Rat(lead));
  Int last = floor_rat(b.hi * Rat(lead));
  for (Int k = first; k <= last; ++k) {
    Rat cand(k, lead);
    cand.canonicalize();
    if (cand >= b.lo && cand <= b.hi && g.sign_at(cand) == 0) return cand;
  }
  return std::nullopt;
}

int compare(const AlgebraicNumber& a, const Rat& r) {
  if (a.is_point()) return sgn(a.lo - r);
  if (r < a.lo) return 1;
  if (r > a.hi) return -1;
  UniPoly g = squarefree_part(a.q);
  if (g.sign_at(r) == 0 && sturm_count(a.q, a.lo, a.hi) == 1) return 0;
  if (r == a.lo) return 1;
  if (r == a.hi) return -1;
  return sturm_count(g, a.lo, r, false, true) >= 1 ? -1 : 1;
}

bool equal(const AlgebraicNumber& a, const AlgebraicNumber& b) {
  Rat lo = std::max(a.lo, b.lo), hi = std::min(a.hi, b.hi);
  if (lo > hi) return false;
  UniPoly g = gcd(a.q, b.q);
  if (g.degree() < 1) return false;
  return sturm_count(g, lo, hi) >= 1;
}

AlgebraicNumber power(const AlgebraicNumber& a, const Rat& r) {
  AlgebraicNumber base = positive_form(a);
  Int m = r.get_num();
  Int n = r.get_den();
  if (m == 0) return {UniPoly(std::vector<Int>{Int(-1), Int(1)}), Rat(1), Rat(1)};
  if (m < 0) {
    base = {base.q.reversed(), 1 / base.hi, 1 / base.lo};
    m = -m;
  }
  const std::uint64_t mu = static_cast<std::uint64_t>(to_i64(m));
  const std::uint64_t nu = static_cast<std::uint64_t>(to_i64(n));
  const Rat rr(m, n);

  if (base.is_point()) {
    Rat v = pow_rat(base.lo, mu);
    if (nu == 1) return from_rational(v);
    UniPoly q = UniPoly::x_pow(nu).scaled(v.get_den()) - UniPoly::constant(v.get_num());
    std::int64_t bits = 8 + std::max<std::int64_t>(0, -floor_log2(v));
    for (;;) {
      Rat lo = root_lower(v, nu, bits), hi = root_upper(v, nu, bits);
      if (lo > 0 && sturm_count(q, lo, hi) == 1) return canonicalize(q, lo, hi);
      bits *= 2;
    }
  }

  // Smallest dependence among x^{m j} mod the squarefree part gives Q(alpha^m) = 0.
  UniPoly g = squarefree_part(base.q);
  RatPoly gr = to_rat(g);
  const std::size_t d = static_cast<std::size_t>(g.degree());
  RatPoly step = pow_mod_x(mu, gr);
  std::vector<RatPoly> cols{RatPoly{Rat(1)}};
  std::optional<std::vector<Rat>> dep;
  while (!dep) {
    cols.push_back(mul_mod(cols.back(), step, gr));
    dep = null_vector(cols, d);
  }
  UniPoly big_q = integer_poly(*dep);
  UniPoly qn = squarefree_part(big_q.compose_pow(nu));

  const std::int64_t sep = separation_bits(qn);
  const Rat target = pow2(-sep);
  AlgebraicNumber cur = base;
  for (std::int64_t extra = 0;; extra += 8) {
    Rat delta = derivative_bound(rr, cur.lo, cur.hi);
    cur = bisect_to(cur, target / (2 * delta) * pow2(-extra));
    if (cur.is_point()) {
      Rat v = pow_rat(cur.lo, mu);
      AlgebraicNumber pt = from_rational(v);
      return power(pt, Rat(1, static_cast<long>(nu)));
    }
    Rat lo = root_lower(pow_rat(cur.lo, mu), nu, sep + 3 + extra);
    Rat hi = root_upper(pow_rat(cur.hi, mu), nu, sep + 3 + extra);
    if (lo > 0 && sturm_count(qn, lo, hi) == 1) return canonicalize(qn, lo, hi);
  }
}

std::optional<std::pair<Int, Int>> mult_dependent(const AlgebraicNumber& a, const AlgebraicNumber& b,
                                                  std::uint64_t bound) {
  for (const auto* x : {&a, &b}) {
    if (compare(*x, Rat(0)) == 0 || compare(*x, Rat(1)) == 0)
      fail(ErrorKind::DegenerateInput, "multiplicative dependence needs values other than 0 and 1");
  }
  const int sa = compare(a, Rat(0)), sb = compare(b, Rat(0));
  AlgebraicNumber pa = positive_form(sa < 0 ? negated(a) : a);
  AlgebraicNumber pb = positive_form(sb < 0 ? negated(b) : b);
  const bool b_unit = equal(pb, from_rational(Rat(1)));
  if (b_unit) return std::make_pair(Int(2), Int(0));  // b = -1
  const bool a_unit = equal(pa, from_rational(Rat(1)));

  // Enclosure of ln|a| / ln|b| used to prune candidate exponents.
  std::optional<std::pair<Rat, Rat>> ratio;
  if (!a_unit) {
    for (std::int64_t bits = 40; bits <= 640 && !ratio; bits *= 2) {
      auto [al, ah] = refine(pa, bits);
      auto [bl, bh] = refine(pb, bits);
      Rat la = ln_enclosure(al, bits).first, ua = ln_enclosure(ah, bits).second;
      Rat lb = ln_enclosure(bl, bits).first, ub = ln_enclosure(bh, bits).second;
      if (sgn(lb) * sgn(ub) <= 0 || sgn(la) * sgn(ua) <= 0) continue;
      Rat c[4] = {la / lb, la / ub, ua / lb, ua / ub};
      ratio = std::make_pair(*std::min_element(c, c + 4), *std::max_element(c, c + 4));
    }
  }

  auto signs_match = [&](const Int& m, const Int& n) {
    int s1 = (sa < 0 && mpz_odd_p(n.get_mpz_t())) ? -1 : 1;
    int s2 = (sb < 0 && mpz_odd_p(m.get_mpz_t())) ? -1 : 1;
    return s1 == s2;
  };
  const Int B(static_cast<unsigned long>(bound));
  for (Int n = 1; n <= B; ++n) {
    std::vector<Int> cands;
    if (a_unit) {
      cands.push_back(Int(0));
    } else if (ratio) {
      Int lo = ceil_rat(ratio->first * Rat(n)), hi = floor_rat(ratio->second * Rat(n));
      for (Int m = std::max(lo, Int(-B)); m <= std::min(hi, B); ++m) cands.push_back(m);
    } else {
      for (Int m = -B; m <= B; ++m) cands.push_back(m);
    }
    std::sort(cands.begin(), cands.end(), [](const Int& x, const Int& y) {
      if (abs(x) != abs(y)) return abs(x) < abs(y);
      return x > y;
    });
    for (const auto& m : cands) {
      if (!signs_match(m, n)) continue;
      if (equal(power(pa, Rat(n)), power(pb, Rat(m)))) return std::make_pair(m, n);
    }
  }
  return std::nullopt;
}

nlohmann::json algebraic_to_json(const AlgebraicNumber& a) {
  nlohmann::json poly = nlohmann::json::array();
  for (const auto& c : a.q.coeffs()) {
    if (c.fits_slong_p()) poly.push_back(c.get_si());
    else poly.push_back(c.get_str());
  }
  return {{"poly", poly}, {"lo", to_string(a.lo)}, {"hi", to_string(a.hi)}};
}

namespace {

Rat rat_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Rat(Int(static_cast<long>(j.get<std::int64_t>())));
  if (j.is_string()) return parse_rat(j.get<std::string>());
  fail(ErrorKind::Parse, "expected a rational, got " + j.dump());
}

}  // namespace

AlgebraicNumber algebraic_from_json(const nlohmann::json& j) {
  if (j.is_string() || j.is_number_integer()) return from_rational(rat_from_json(j));
  if (!j.is_object() || !j.contains("poly") || !j.contains("lo") || !j.contains("hi"))
    fail(ErrorKind::Parse, "algebraic number needs poly, lo and hi: " + j.dump());
  std::vector<Int> coeffs;
  for (const auto& c : j.at("poly")) {
    Rat v = rat_from_json(c);
    if (v.get_den() != 1) fail(ErrorKind::Parse, "polynomial coefficients must be integers");
    coeffs.push_back(v.get_num());
  }
  return {UniPoly(coeffs), rat_from_json(j.at("lo")), rat_from_json(j.at("hi"))};
}

}  // namespace xipow
