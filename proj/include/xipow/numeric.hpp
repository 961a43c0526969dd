#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>

namespace xipow {

using Int = mpz_class;
using Rat = mpq_class;

// Parses "p/q", "p" or "-p/q". Throws Error(Parse) on malformed input.
Rat parse_rat(const std::string& s);
std::string to_string(const Rat& r);
std::string to_string(const Int& z);

Int floor_rat(const Rat& r);
Int ceil_rat(const Rat& r);
Rat abs_rat(const Rat& r);
int sgn(const Rat& r);
int sgn(const Int& z);

std::size_t bit_length(const Int& z);  // of |z|; 0 for z == 0

// 2^e for any integer e.
Rat pow2(std::int64_t e);
Int pow2_int(std::uint64_t e);
Rat pow_rat(const Rat& x, std::uint64_t e);
Int pow_int(const Int& x, std::uint64_t e);

// Smallest e with 2^e >= x (x > 0).
std::int64_t ceil_log2(const Rat& x);
// Largest e with 2^e <= x (x > 0).
std::int64_t floor_log2(const Rat& x);

// Nearest multiple of 2^-bits (ties away from zero); error <= 2^-(bits+1).
Rat round_to_grid(const Rat& x, std::int64_t bits);
Rat floor_to_grid(const Rat& x, std::int64_t bits);
Rat ceil_to_grid(const Rat& x, std::int64_t bits);

// Rational enclosure [lo, hi] of ln(x), x > 0, with hi - lo <= 2^-bits.
std::pair<Rat, Rat> ln_enclosure(const Rat& x, std::int64_t bits);
// Exact ceil(ln(x)) for rational x > 0.
Int ceil_ln(const Rat& x);

// Rational upper bound of x^(1/k), within 2^-bits of the true root (x >= 0).
Rat root_upper(const Rat& x, std::uint64_t k, std::int64_t bits);
Rat root_lower(const Rat& x, std::uint64_t k, std::int64_t bits);

std::int64_t to_i64(const Int& z);  // throws ResourceLimit when out of range

}  // namespace xipow
