#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include <json.hpp>

#include "xipow/poly.hpp"

namespace xipow {

// The unique root of q in [lo, hi].
struct AlgebraicNumber {
  UniPoly q;
  Rat lo;
  Rat hi;

  bool is_point() const { return lo == hi; }
};

AlgebraicNumber from_rational(const Rat& r);

// Errors with NOT_UNIQUE_ROOT unless q has exactly one root in [lo, hi].
AlgebraicNumber canonicalize(const UniPoly& q, const Rat& lo, const Rat& hi);
bool is_canonical(const AlgebraicNumber& a);

// Interval of width <= 2^-L isolating the number.
std::pair<Rat, Rat> refine(const AlgebraicNumber& a, std::int64_t L);

std::optional<Rat> is_rational(const AlgebraicNumber& a);

// Sign of (a - r).
int compare(const AlgebraicNumber& a, const Rat& r);
bool equal(const AlgebraicNumber& a, const AlgebraicNumber& b);

// Representation of a^r for a > 0. Errors with NONPOSITIVE_BASE otherwise.
AlgebraicNumber power(const AlgebraicNumber& a, const Rat& r);

// Default search radius for mult_dependent.
inline constexpr std::uint64_t kDefaultDependenceBound = 64;

// (m, n) != (0, 0) with |m|, |n| <= bound and a^n = b^m, smallest by (|n|, |m|).
std::optional<std::pair<Int, Int>> mult_dependent(const AlgebraicNumber& a, const AlgebraicNumber& b,
                                                  std::uint64_t bound);

nlohmann::json algebraic_to_json(const AlgebraicNumber& a);
// Accepts {"poly":[...],"lo":"p/q","hi":"p/q"} or a bare rational string/integer.
AlgebraicNumber algebraic_from_json(const nlohmann::json& j);

}  // namespace xipow
