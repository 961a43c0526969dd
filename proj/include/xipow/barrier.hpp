#pragma once

#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "xipow/algebraic.hpp"
#include "xipow/real.hpp"

namespace xipow {

enum class BarrierProvenance { AlgebraicDerived, Table, UserConfig };

// sigma(d, h) = c * (d + ceil(ln h))^k.
struct RootBarrier {
  Int c = 1;
  std::uint64_t k = 1;
  BarrierProvenance provenance = BarrierProvenance::AlgebraicDerived;
  // Table rows assume h >= 16; their sigma is evaluated at h + 15.
  bool shift_height = false;

  Int sigma(std::uint64_t d, const Int& h) const;
};

std::string provenance_name(BarrierProvenance p);

enum class BaseKind { Natural, Rational, Algebraic, Pi, EPowPi, EPowEta, AlphaPowEta, LnAlpha, LnRatio };

std::string base_kind_name(BaseKind k);

// Unclassified base description as given by the user.
struct RawBase {
  BaseKind kind = BaseKind::Natural;
  Int n = 2;                          // natural
  Rat value;                          // rational
  std::optional<AlgebraicNumber> alpha;  // algebraic, alpha_pow_eta, ln_alpha, ln_ratio
  std::optional<AlgebraicNumber> beta;   // ln_ratio
  std::optional<AlgebraicNumber> eta;    // e_pow_eta, alpha_pow_eta
  std::optional<RootBarrier> barrier_override;
  std::map<std::string, Int> table_constants;  // c_eta, c_alpha_eta, c_alpha, c_alpha_beta
  std::uint64_t dependence_bound = kDefaultDependenceBound;
};

struct BaseDescriptor {
  BaseKind kind = BaseKind::Natural;
  std::string label;
  MachinePtr machine;
  std::optional<RootBarrier> barrier;
  bool transcendental = false;
  // Canonical representation when the base is algebraic (natural and rational included).
  std::optional<AlgebraicNumber> value;
  std::optional<Int> natural;
  // Why a table barrier is absent, when it is.
  std::string barrier_note;
  RawBase raw;

  bool is_algebraic() const { return value.has_value(); }
};

RootBarrier algebraic_barrier(const AlgebraicNumber& a);

// Errors with MISSING_CONSTANT when the row needs an unconfigured constant.
RootBarrier catalog_barrier(BaseKind kind, const std::map<std::string, Int>& constants);

// Literal table expression at (d, h), h >= 16, as a floating-point value.
double table_measure(BaseKind kind, double c, double d, double h);

// Errors with INVALID_BASE for nonpositive or otherwise unusable bases.
BaseDescriptor classify_base(const RawBase& raw);

BaseDescriptor base_natural(const Int& n);
BaseDescriptor base_rational(const Rat& r);
BaseDescriptor base_algebraic(const AlgebraicNumber& a);
BaseDescriptor base_pi();
// The base 1/xi, with the same barrier (valid when xi < 1).
BaseDescriptor reciprocal_base(const BaseDescriptor& b);

RawBase raw_base_from_json(const nlohmann::json& j);
nlohmann::json base_to_json(const BaseDescriptor& b);

}  // namespace xipow
