#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "xipow/barrier.hpp"
#include "xipow/poly.hpp"

namespace xipow {

inline constexpr std::int64_t kDefaultLoopCap = 2048;

// Sparse polynomial ((a_1, d_1), ..., (a_k, d_k)) with d_1 > ... > d_k >= 0.
struct Fewnomial {
  std::vector<std::pair<Int, Int>> terms;

  static Fewnomial from_uni(const UniPoly& p);
};

int sign_fewnomial(const Fewnomial& p, const Int& n);

// Algorithm with the root barrier; errors with RESOURCE_LIMIT when the accuracy exceeds cap.
int sign_with_barrier(const UniPoly& p, const BaseDescriptor& base, std::int64_t cap = kDefaultAccuracyCap);

// Convergence loop; never returns zero for a non-constant p.
int sign_transcendental(const UniPoly& p, const BaseDescriptor& base, std::int64_t cap = kDefaultAccuracyCap,
                        std::int64_t loop_cap = kDefaultLoopCap);

// M such that |r| <= K and |r - r*| <= 2^-M give |p(r) - p(r*)| <= 2^-L.
std::int64_t propagation_accuracy(std::int64_t L, const UniPoly& p, const Rat& K);

// Rational enclosure 0 < lo <= |Q(xi)| <= hi for Q(xi) != 0.
struct Enclosure {
  int sign = 0;
  std::int64_t L = 0;
  Rat lo, hi;
};

struct SignStats {
  std::uint64_t queries = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t fewnomial = 0;
  std::uint64_t barrier = 0;
  std::uint64_t loop = 0;
  std::uint64_t exact_zero = 0;
  std::int64_t max_accuracy = 0;
};

struct SignOptions {
  std::int64_t accuracy_cap = kDefaultAccuracyCap;
  std::int64_t loop_cap = kDefaultLoopCap;
};

// Memoizing sign oracle bound to one base.
class SignOracle {
 public:
  explicit SignOracle(BaseDescriptor base, SignOptions opts = {});

  const BaseDescriptor& base() const { return base_; }
  const SignOptions& options() const { return opts_; }

  int sign(const UniPoly& p) const;
  // Ground Laurent polynomial in xi.
  int sign(const LaurentPoly& p) const;
  // Sign of a - b for ground Laurent polynomials.
  int compare(const LaurentPoly& a, const LaurentPoly& b) const { return sign(a - b); }

  // z with xi^z <= num/den < xi^(z+1); num and den positive at xi, xi > 1.
  std::int64_t lambda_floor(const LaurentPoly& num, const LaurentPoly& den = LaurentPoly(1)) const;

  Enclosure enclose(const UniPoly& q) const;
  Enclosure enclose(const LaurentPoly& q) const;

  SignStats stats() const;

 private:
  int compute(const UniPoly& p) const;

  BaseDescriptor base_;
  SignOptions opts_;
  mutable std::mutex mu_;
  mutable std::map<UniPoly, int> memo_;
  mutable std::map<UniPoly, Enclosure> enclosures_;
  mutable SignStats stats_;
};

// One-shot dispatch without memoization.
int sign(const UniPoly& p, const BaseDescriptor& base, SignOptions opts = {});

// Ground Laurent polynomial times the smallest xi power that clears negative exponents.
UniPoly ground_to_uni(const LaurentPoly& p);

}  // namespace xipow
