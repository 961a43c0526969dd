#include "xipow/numeric.hpp"

#include <limits>

#include "xipow/error.hpp"

namespace xipow {

namespace {

bool all_digits(const std::string& s, std::size_t from) {
  if (from >= s.size()) return false;
  for (std::size_t i = from; i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  return true;
}

// atanh(z) = sum z^(2j+1)/(2j+1); enclosure for 0 <= z <= 1/3 of width <= 2^-bits.
std::pair<Rat, Rat> atanh_enclosure(const Rat& z, std::int64_t bits) {
  Rat sum = 0;
  Rat z2 = z * z;
  Rat term = z;  // z^(2j+1)
  std::int64_t j = 0;
  // tail after index j is at most z^(2j+3) / ((2j+3)(1 - z^2))
  Rat bound = pow2(-(bits + 1));
  for (;; ++j) {
    sum += term / Rat(2 * j + 1);
    term *= z2;
    Rat tail = term / (Rat(2 * j + 3) * (Rat(1) - z2));
    if (tail <= bound) {
      Rat lo = floor_to_grid(sum, bits + 2);
      Rat hi = ceil_to_grid(sum + tail, bits + 2);
      return {lo, hi};
    }
  }
}

std::pair<Rat, Rat> ln_small(const Rat& y, std::int64_t bits) {
  // y in [1, 2]
  Rat z = (y - 1) / (y + 1);
  auto [lo, hi] = atanh_enclosure(z, bits + 1);
  return {lo * 2, hi * 2};
}

}  // namespace

Rat parse_rat(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (c != ' ') s.push_back(c);
  auto slash = s.find('/');
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  std::size_t start = (!num.empty() && (num[0] == '-' || num[0] == '+')) ? 1 : 0;
  if (!all_digits(num, start) || !all_digits(den, 0))
    fail(ErrorKind::Parse, "malformed rational '" + raw + "'");
  Int n(num[0] == '+' ? num.substr(1) : num);
  Int d(den);
  if (d == 0) fail(ErrorKind::Parse, "zero denominator in '" + raw + "'");
  Rat r(n, d);
  r.canonicalize();
  return r;
}

std::string to_string(const Rat& r) {
  if (r.get_den() == 1) return r.get_num().get_str();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string to_string(const Int& z) { return z.get_str(); }

Int floor_rat(const Rat& r) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

Int ceil_rat(const Rat& r) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

Rat abs_rat(const Rat& r) { return r < 0 ? Rat(-r) : r; }
int sgn(const Rat& r) { return mpq_sgn(r.get_mpq_t()); }
int sgn(const Int& z) { return mpz_sgn(z.get_mpz_t()); }

std::size_t bit_length(const Int& z) {
  if (z == 0) return 0;
  return mpz_sizeinbase(z.get_mpz_t(), 2);
}

Int pow2_int(std::uint64_t e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
  return r;
}

Rat pow2(std::int64_t e) {
  if (e >= 0) return Rat(pow2_int(static_cast<std::uint64_t>(e)));
  return Rat(Int(1), pow2_int(static_cast<std::uint64_t>(-e)));
}

Int pow_int(const Int& x, std::uint64_t e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), x.get_mpz_t(), e);
  return r;
}

Rat pow_rat(const Rat& x, std::uint64_t e) {
  Rat r(pow_int(x.get_num(), e), pow_int(x.get_den(), e));
  r.canonicalize();
  return r;
}

std::int64_t floor_log2(const Rat& x) {
  if (x <= 0) fail(ErrorKind::Precondition, "floor_log2 of nonpositive value");
  std::int64_t e = static_cast<std::int64_t>(bit_length(x.get_num())) -
                   static_cast<std::int64_t>(bit_length(x.get_den()));
  // 2^(e-1) < x < 2^(e+1)
  while (pow2(e) > x) --e;
  while (pow2(e + 1) <= x) ++e;
  return e;
}

std::int64_t ceil_log2(const Rat& x) {
  std::int64_t e = floor_log2(x);
  return pow2(e) == x ? e : e + 1;
}

Rat round_to_grid(const Rat& x, std::int64_t bits) {
  Rat scaled = x * pow2(bits);
  Int n = floor_rat(scaled + Rat(1, 2));
  if (x < 0) n = -floor_rat(-scaled + Rat(1, 2));
  Rat r = Rat(n) * pow2(-bits);
  r.canonicalize();
  return r;
}

Rat floor_to_grid(const Rat& x, std::int64_t bits) {
  Rat r = Rat(floor_rat(x * pow2(bits))) * pow2(-bits);
  r.canonicalize();
  return r;
}

Rat ceil_to_grid(const Rat& x, std::int64_t bits) {
  Rat r = Rat(ceil_rat(x * pow2(bits))) * pow2(-bits);
  r.canonicalize();
  return r;
}

std::pair<Rat, Rat> ln_enclosure(const Rat& x, std::int64_t bits) {
  if (x <= 0) fail(ErrorKind::Precondition, "ln of nonpositive value");
  if (x == 1) return {Rat(0), Rat(0)};
  std::int64_t e = floor_log2(x);
  Rat y = x * pow2(-e);  // [1, 2)
  std::int64_t ae = e < 0 ? -e : e;
  std::int64_t extra = static_cast<std::int64_t>(bit_length(Int(ae))) + 3;
  std::int64_t t = bits + extra;
  Rat ylo = floor_to_grid(y, t + 2);
  Rat yhi = ceil_to_grid(y, t + 2);
  auto [l1, h1] = ln_small(ylo, t);
  auto [l2, h2] = ln_small(yhi, t);
  (void)h1;
  (void)l2;
  auto [ln2lo, ln2hi] = ln_small(Rat(2), t);
  Rat lo = l1 + (e >= 0 ? Rat(e) * ln2lo : Rat(e) * ln2hi);
  Rat hi = h2 + (e >= 0 ? Rat(e) * ln2hi : Rat(e) * ln2lo);
  return {lo, hi};
}

Int ceil_ln(const Rat& x) {
  if (x <= 0) fail(ErrorKind::Precondition, "ceil_ln of nonpositive value");
  if (x == 1) return 0;
  // ln(x) is irrational for rational x != 1, so refinement terminates.
  for (std::int64_t bits = 16;; bits *= 2) {
    auto [lo, hi] = ln_enclosure(x, bits);
    Int a = ceil_rat(lo), b = ceil_rat(hi);
    if (a == b && Rat(a) != lo) return a;
  }
}

Rat root_lower(const Rat& x, std::uint64_t k, std::int64_t bits) {
  if (x < 0) fail(ErrorKind::Precondition, "root of negative value");
  Int big = floor_rat(x * pow2(bits * static_cast<std::int64_t>(k)));
  Int r;
  mpz_root(r.get_mpz_t(), big.get_mpz_t(), k);
  return Rat(r) * pow2(-bits);
}

Rat root_upper(const Rat& x, std::uint64_t k, std::int64_t bits) {
  Rat lo = root_lower(x, k, bits);
  Rat cand = lo;
  if (pow_rat(cand, k) < x) cand += pow2(-bits);
  return cand;
}

std::int64_t to_i64(const Int& z) {
  if (!mpz_fits_slong_p(z.get_mpz_t()))
    fail(ErrorKind::ResourceLimit, "integer exceeds machine range: " + z.get_str());
  return mpz_get_si(z.get_mpz_t());
}

}  // namespace xipow
