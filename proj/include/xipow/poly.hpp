#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "xipow/numeric.hpp"

namespace xipow {

using Var = std::string;

// The distinguished base symbol.
inline const Var kXi = "xi";

// Dense univariate integer polynomial, coefficients in ascending degree order.
class UniPoly {
 public:
  UniPoly() = default;
  explicit UniPoly(std::vector<Int> coeffs);
  static UniPoly constant(const Int& c);
  static UniPoly x_pow(std::uint64_t k);
  // den*x - num
  static UniPoly linear_root(const Rat& r);

  const std::vector<Int>& coeffs() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c_.empty(); }
  const Int& coeff(int i) const;
  const Int& lead() const { return c_.back(); }
  Int height() const;
  Int content() const;

  UniPoly operator+(const UniPoly& o) const;
  UniPoly operator-(const UniPoly& o) const;
  UniPoly operator*(const UniPoly& o) const;
  UniPoly operator-() const;
  UniPoly scaled(const Int& k) const;
  bool operator==(const UniPoly& o) const { return c_ == o.c_; }
  bool operator<(const UniPoly& o) const;

  UniPoly derivative() const;
  UniPoly primitive() const;  // content removed, leading coefficient positive
  UniPoly compose_pow(std::uint64_t n) const;  // q(x^n)
  UniPoly reversed() const;                     // x^d q(1/x)
  UniPoly negated_arg() const;                  // q(-x)
  UniPoly shifted(std::uint64_t k) const;       // x^k q(x)

  Rat eval(const Rat& x) const;
  int sign_at(const Rat& x) const;

  std::string to_string(const std::string& var = "x") const;

 private:
  void trim();
  std::vector<Int> c_;
};

// Rational-coefficient remainder made primitive with a positive scale factor.
UniPoly rem_primitive(const UniPoly& a, const UniPoly& b);
// Exact quotient over Q scaled to a primitive integer polynomial (positive scale).
UniPoly quo_primitive(const UniPoly& a, const UniPoly& b);
UniPoly gcd(const UniPoly& a, const UniPoly& b);
UniPoly squarefree_part(const UniPoly& p);

// Distinct real roots in the interval with the given endpoint openness.
std::uint64_t sturm_count(const UniPoly& q, const Rat& lo, const Rat& hi,
                          bool lo_open = false, bool hi_open = false);
// height(p) + 1
Int cauchy_root_bound(const UniPoly& p);

class Monomial {
 public:
  Monomial() = default;
  static Monomial of(const Var& v, std::int64_t e);

  std::int64_t exp(const Var& v) const;
  const std::vector<std::pair<Var, std::int64_t>>& exps() const { return e_; }
  bool is_one() const { return e_.empty(); }
  bool has(const Var& v) const { return exp(v) != 0; }
  std::int64_t total_degree() const;

  Monomial operator*(const Monomial& o) const;
  Monomial pow(std::int64_t k) const;
  Monomial without(const Var& v) const;
  Monomial with(const Var& v, std::int64_t e) const;

  bool operator<(const Monomial& o) const { return e_ < o.e_; }
  bool operator==(const Monomial& o) const { return e_ == o.e_; }

 private:
  std::vector<std::pair<Var, std::int64_t>> e_;  // sorted by name, nonzero
};

struct PolyMetrics {
  std::uint64_t degree = 0;
  Int height = 0;
  Int bit_size = 0;
  std::map<Var, std::uint64_t> per_var_degree;
};

// Multivariate Laurent polynomial over named variables and xi.
class LaurentPoly {
 public:
  LaurentPoly() = default;
  LaurentPoly(long c);  // NOLINT: implicit constant
  explicit LaurentPoly(const Int& c);
  static LaurentPoly var(const Var& v, std::int64_t e = 1);
  static LaurentPoly xi(std::int64_t e = 1) { return var(kXi, e); }
  static LaurentPoly term(const Int& c, const Monomial& m);
  static LaurentPoly from_uni(const UniPoly& q, const Var& v);

  const std::map<Monomial, Int>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_constant() const;
  std::optional<Int> constant_value() const;
  std::size_t size() const { return t_.size(); }

  std::set<Var> vars() const;  // excludes xi
  bool has_var(const Var& v) const;
  bool is_ground() const;  // no variables other than xi
  std::int64_t max_exp(const Var& v) const;
  std::int64_t min_exp(const Var& v) const;
  Int height() const;
  Int content() const;

  LaurentPoly operator+(const LaurentPoly& o) const;
  LaurentPoly operator-(const LaurentPoly& o) const;
  LaurentPoly operator*(const LaurentPoly& o) const;
  LaurentPoly operator-() const;
  LaurentPoly& operator+=(const LaurentPoly& o);
  LaurentPoly scaled(const Int& k) const;
  LaurentPoly times(const Monomial& m) const;
  LaurentPoly pow(std::uint64_t k) const;
  bool operator==(const LaurentPoly& o) const { return t_ == o.t_; }
  bool operator!=(const LaurentPoly& o) const { return !(t_ == o.t_); }
  bool operator<(const LaurentPoly& o) const { return t_ < o.t_; }

  // Multiply by xi^-d * prod x_i^-d_i for the most negative exponents.
  LaurentPoly laurent_normalized() const;
  // Divides out the monomial gcd and the integer content; keeps the sign.
  LaurentPoly reduced() const;

  // Coefficients with respect to v: exponent -> coefficient polynomial.
  std::map<std::int64_t, LaurentPoly> coeffs_in(const Var& v) const;
  // Replaces v by the monomial c * m (c must be +-1 when v has negative exponents).
  LaurentPoly subst_monomial(const Var& v, const Monomial& m) const;
  // Replaces v by an arbitrary polynomial (v must have nonnegative exponents).
  LaurentPoly subst_poly(const Var& v, const LaurentPoly& q) const;
  LaurentPoly rename(const Var& from, const Var& to) const;

  Rat eval(const std::map<Var, Rat>& at) const;
  // Ground polynomial times xi^-min as a univariate polynomial in xi.
  UniPoly to_uni_xi() const;
  // Univariate polynomial in v (no other variables, nonnegative exponents).
  UniPoly to_uni(const Var& v) const;

  std::string to_sexpr() const;

 private:
  void add_term(const Monomial& m, const Int& c);
  std::map<Monomial, Int> t_;
};

// Errors with NEGATIVE_EXPONENT on proper Laurent input.
PolyMetrics poly_metrics(const LaurentPoly& p);

}  // namespace xipow
