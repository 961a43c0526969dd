#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xipow/formula.hpp"
#include "xipow/sign.hpp"

namespace xipow {

// Either an explicit finite set of exponents or the interval [-L..L].
struct ExponentSet {
  std::set<std::int64_t> values;
  std::optional<Int> L;
  bool closed_form = false;

  static ExponentSet interval(const Int& L, bool closed_form);
  bool is_interval() const { return L.has_value(); }
  bool empty() const { return !L && values.empty(); }
  bool contains(const Int& g) const;
  std::size_t size() const;  // explicit form only
};

// One term q(xi) * y^e of a polynomial grouped by its y-monomial.
struct GTerm {
  LaurentPoly coeff;  // ground in xi
  Monomial mono;      // xi-free
};

// Splits a polynomial into its y-monomials with ground xi coefficients.
std::vector<GTerm> split_by_monomial(const LaurentPoly& p);

// (j, k, s, orientation): x^(k-j) = xi^s * lambda(num) / lambda(den), where
// orientation 0 means num = -p_j, den = p_k and orientation 1 means num = p_j, den = -p_k.
struct DominantPair {
  std::int64_t j = 0;
  std::int64_t k = 0;
  std::int64_t s = 0;
  int orientation = 0;
};

// p_i indexed by the power of (x*v); missing indices are zero.
using XvPoly = std::map<std::int64_t, LaurentPoly>;

// Smallest a >= 0 with n <= xi^a (n >= 1).
std::int64_t ceil_log_xi(const Int& n, const SignOracle& oracle);

std::vector<DominantPair> dominant_pair_candidates(const XvPoly& r, const SignOracle& oracle);

// Constructive G-set: lambda(p) = xi^g * mono_i whenever p > 0 at a power assignment.
ExponentSet compute_G(const std::vector<GTerm>& terms, const SignOracle& oracle);

// (2^(3c) D ceil(ln H))^(6 n k^(3n)).
Int closed_form_G_L(std::uint64_t n, const Int& c, std::uint64_t k, const Int& D, const Int& H);
// n (2^(4c) D ceil(ln H))^(6 |M| k^(3|M|)).
Int closed_form_F_L(std::uint64_t n, std::uint64_t M, const Int& c, std::uint64_t k, const Int& D,
                    const Int& H);

struct FTuple {
  std::int64_t j = 0;  // power of x
  std::int64_t g = 0;  // power of xi
  Monomial mono;       // y-monomial, possibly with negative exponents
  bool operator<(const FTuple& o) const;
  bool operator==(const FTuple& o) const { return j == o.j && g == o.g && mono == o.mono; }
};

// Memo of G-sets keyed by the grouped polynomial.
struct GCache {
  std::map<std::string, ExponentSet> sets;
  std::uint64_t computed = 0;
  std::uint64_t max_size = 0;
};

std::vector<FTuple> compute_F(const XvPoly& r, const SignOracle& oracle, GCache* cache = nullptr);

// Branch u^j = xi^k * mono of the relativised disjunction.
struct RelBranch {
  std::int64_t j = 1;
  std::int64_t k = 0;
  Monomial mono;
  Formula phi;
};

std::vector<RelBranch> relativise(const Formula& phi, const Var& u, const SignOracle& oracle,
                                  GCache* cache = nullptr);

// One disjunct of the u-elimination.
struct RemovedBranch {
  std::vector<std::int64_t> r;          // residues, aligned with the ell input
  std::int64_t g = 0;                   // (k + ell.r) / j
  std::map<Var, Var> fresh;             // y_i -> z_i
  Formula phi;
};

std::vector<RemovedBranch> remove_u(const Formula& phi, const Var& u, std::int64_t j, std::int64_t k,
                                    const std::vector<std::pair<Var, std::int64_t>>& ell,
                                    const std::string& suffix);

// Integers chosen when eliminating one variable:
// y_i := z_i^j * xi^f_i, then u := xi^g * prod z_i^ell_i.
struct TraceStep {
  Var eliminated;
  std::int64_t j = 1;
  std::int64_t g = 0;
  std::map<Var, std::pair<Var, std::int64_t>> f;  // y_i -> (z_i, f_i)
  std::map<Var, std::int64_t> ell;               // z_i -> ell_i
  Formula before;  // formula the step was applied to
};

using SubstitutionTrace = std::vector<TraceStep>;
using Assignment = std::map<Var, std::int64_t>;

// Exponent assignment of the step's input variables from one of its output variables.
Assignment undo_step(const TraceStep& step, const Assignment& after);
// Assignments for every formula along the trace, innermost last; the first entry solves trace[0].before.
std::vector<Assignment> backpropagate(const SubstitutionTrace& trace, const Assignment& final);

struct XzStats {
  std::uint64_t branches = 0;
  std::uint64_t candidates = 0;
  std::uint64_t memo_hits = 0;
  std::uint64_t g_sets = 0;
  std::uint64_t max_g_size = 0;
  std::uint64_t sign_queries = 0;
};

enum class XzStrategy { Qe, Enumerate };

struct XzOptions {
  XzStrategy strategy = XzStrategy::Qe;
  std::int64_t enumerate_bound = 8;
  std::uint64_t branch_budget = 100000;
  std::uint64_t candidate_budget = 10000000;
};

struct XzVerdict {
  bool sat = false;
  Assignment witness;
  SubstitutionTrace trace;
  XzStats stats;
};

// True when the exponent assignment satisfies the quantifier-free formula.
bool holds_at(const Formula& f, const Assignment& a, const SignOracle& oracle);

// Replaces ground atoms by their truth value and folds constants.
Formula simplify_ground(const Formula& f, const SignOracle& oracle);

XzVerdict solve_xz(const Formula& psi, const SignOracle& oracle, const XzOptions& opts = {});

// U = (2^c ceil(ln H))^(D^(32 n^2) * k^(D^(8n))).
struct WitnessBound {
  Int base;  // 2^c ceil(ln H)
  Int D;
  std::uint64_t d_exp = 0;      // 32 n^2
  std::uint64_t k = 1;
  std::uint64_t inner_exp = 0;  // 8n, so k^(D^inner_exp)
  std::optional<Int> exponent;  // when materialized
  std::optional<Int> value;     // when materialized

  std::string structural() const;
};

inline constexpr std::uint64_t kMaterializeBits = 1u << 20;

WitnessBound witness_bound(std::uint64_t n, const Int& H, const Int& D, const Int& c, std::uint64_t k,
                           std::uint64_t materialize_bits = kMaterializeBits);
WitnessBound witness_bound(const Formula& psi, const RootBarrier& barrier,
                           std::uint64_t materialize_bits = kMaterializeBits);

}  // namespace xipow
