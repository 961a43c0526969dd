#include "xipow/barrier.hpp"

#include <cmath>

#include "xipow/error.hpp"

namespace xipow {

Int RootBarrier::sigma(std::uint64_t d, const Int& h) const {
  Int hh = shift_height ? h + 15 : h;
  if (hh < 1) hh = 1;
  Int x = Int(static_cast<unsigned long>(d)) + ceil_ln(Rat(hh));
  return c * pow_int(x, k);
}

std::string provenance_name(BarrierProvenance p) {
  switch (p) {
    case BarrierProvenance::AlgebraicDerived: return "algebraic-derived";
    case BarrierProvenance::Table: return "table";
    case BarrierProvenance::UserConfig: return "user-config";
  }
  return "unknown";
}

std::string base_kind_name(BaseKind k) {
  switch (k) {
    case BaseKind::Natural: return "natural";
    case BaseKind::Rational: return "rational";
    case BaseKind::Algebraic: return "algebraic";
    case BaseKind::Pi: return "pi";
    case BaseKind::EPowPi: return "e_pow_pi";
    case BaseKind::EPowEta: return "e_pow_eta";
    case BaseKind::AlphaPowEta: return "alpha_pow_eta";
    case BaseKind::LnAlpha: return "ln_alpha";
    case BaseKind::LnRatio: return "ln_ratio";
  }
  return "unknown";
}

RootBarrier algebraic_barrier(const AlgebraicNumber& a) {
  const long d = a.q.degree();
  Int c = Int(d) + ceil_ln(Rat(Int(d + 1) * a.q.height()));
  return {c, 1, BarrierProvenance::AlgebraicDerived, false};
}

namespace {

struct TableRow {
  const char* constant;  // nullptr when the row is explicit
  long c_explicit;       // exponent of 2 for explicit rows
  std::uint64_t k;
};

TableRow table_row(BaseKind kind) {
  switch (kind) {
    case BaseKind::Pi: return {nullptr, 41, 4};
    case BaseKind::EPowPi: return {nullptr, 61, 5};
    case BaseKind::EPowEta: return {"c_eta", 0, 5};
    case BaseKind::AlphaPowEta: return {"c_alpha_eta", 0, 5};
    case BaseKind::LnAlpha: return {"c_alpha", 0, 4};
    case BaseKind::LnRatio: return {"c_alpha_beta", 0, 5};
    default: break;
  }
  fail(ErrorKind::Precondition, "no table row for base kind " + base_kind_name(kind));
}

}  // namespace

RootBarrier catalog_barrier(BaseKind kind, const std::map<std::string, Int>& constants) {
  TableRow row = table_row(kind);
  Int c;
  if (row.constant == nullptr) {
    c = pow2_int(static_cast<std::uint64_t>(row.c_explicit));
  } else {
    auto it = constants.find(row.constant);
    if (it == constants.end())
      fail(ErrorKind::MissingConstant, std::string("table constant ") + row.constant + " is not configured");
    if (it->second < 1) fail(ErrorKind::InvalidParams, std::string("table constant ") + row.constant + " must be >= 1");
    c = it->second;
  }
  return {c, row.k, BarrierProvenance::Table, true};
}

double table_measure(BaseKind kind, double c, double d, double h) {
  const double ld = std::log(d), lh = std::log(h), llh = std::log(std::log(h));
  switch (kind) {
    case BaseKind::Pi: return std::ldexp(1.0, 40) * d * (lh + d * ld) * (1 + ld);
    case BaseKind::EPowPi: return std::ldexp(1.0, 60) * d * d * (lh + ld) * (llh + ld) * (1 + ld);
    case BaseKind::EPowEta: {
      double r = (llh + ld) / (llh + std::log(std::max(1.0, ld)));
      return c * d * d * (lh + ld) * r * r;
    }
    case BaseKind::AlphaPowEta: return c * d * d * d * (lh + ld) * (llh + ld) / ((1 + ld) * (1 + ld));
    case BaseKind::LnAlpha: return c * d * d * (lh + d * ld) / (1 + ld);
    case BaseKind::LnRatio: return c * d * d * d * (lh + d * ld) / ((1 + ld) * (1 + ld));
    default: break;
  }
  fail(ErrorKind::Precondition, "no table row for base kind " + base_kind_name(kind));
}

namespace {

AlgebraicNumber canonical(const AlgebraicNumber& a) { return canonicalize(a.q, a.lo, a.hi); }

const AlgebraicNumber& need(const std::optional<AlgebraicNumber>& a, const char* what) {
  if (!a) fail(ErrorKind::InvalidBase, std::string("base description is missing ") + what);
  return *a;
}

// Natural, rational or algebraic descriptor for a positive algebraic value.
BaseDescriptor from_value(const AlgebraicNumber& a) {
  if (compare(a, Rat(0)) <= 0) fail(ErrorKind::InvalidBase, "base must be positive");
  if (auto r = is_rational(a)) {
    if (r->get_den() == 1) return base_natural(r->get_num());
    return base_rational(*r);
  }
  BaseDescriptor b;
  b.kind = BaseKind::Algebraic;
  b.value = a;
  b.machine = algebraic_machine(a);
  b.barrier = algebraic_barrier(a);
  b.label = "root of " + a.q.to_string() + " in [" + to_string(a.lo) + ", " + to_string(a.hi) + "]";
  return b;
}

BaseDescriptor transcendental(BaseKind kind, MachinePtr m, std::string label, const RawBase& raw) {
  BaseDescriptor b;
  b.kind = kind;
  b.transcendental = true;
  b.machine = rounded(std::move(m));
  b.label = std::move(label);
  try {
    b.barrier = catalog_barrier(kind, raw.table_constants);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::MissingConstant) throw;
    b.barrier_note = e.what();
  }
  return b;
}

}  // namespace

BaseDescriptor base_natural(const Int& n) {
  if (n < 1) fail(ErrorKind::InvalidBase, "natural base must be >= 1");
  BaseDescriptor b;
  b.kind = BaseKind::Natural;
  b.natural = n;
  b.value = from_rational(Rat(n));
  b.machine = constant_machine(Rat(n));
  b.barrier = algebraic_barrier(*b.value);
  b.label = n.get_str();
  return b;
}

BaseDescriptor base_rational(const Rat& r) {
  if (r <= 0) fail(ErrorKind::InvalidBase, "base must be positive");
  if (r.get_den() == 1) return base_natural(r.get_num());
  BaseDescriptor b;
  b.kind = BaseKind::Rational;
  b.value = from_rational(r);
  b.machine = constant_machine(r);
  b.barrier = algebraic_barrier(*b.value);
  b.label = to_string(r);
  return b;
}

BaseDescriptor base_algebraic(const AlgebraicNumber& a) { return from_value(canonical(a)); }

BaseDescriptor base_pi() {
  RawBase raw;
  raw.kind = BaseKind::Pi;
  return classify_base(raw);
}

BaseDescriptor classify_base(const RawBase& raw) {
  BaseDescriptor b;
  switch (raw.kind) {
    case BaseKind::Natural: b = base_natural(raw.n); break;
    case BaseKind::Rational: b = base_rational(raw.value); break;
    case BaseKind::Algebraic: b = base_algebraic(need(raw.alpha, "alpha")); break;
    case BaseKind::Pi: b = transcendental(BaseKind::Pi, pi_machine(), "pi", raw); break;
    case BaseKind::EPowPi: b = transcendental(BaseKind::EPowPi, exp_machine(pi_machine()), "e^pi", raw); break;
    case BaseKind::EPowEta: {
      AlgebraicNumber eta = canonical(need(raw.eta, "eta"));
      if (compare(eta, Rat(0)) == 0) {
        b = base_natural(1);
        break;
      }
      b = transcendental(BaseKind::EPowEta, exp_machine(algebraic_machine(eta)), "e^eta", raw);
      break;
    }
    case BaseKind::AlphaPowEta: {
      AlgebraicNumber alpha = canonical(need(raw.alpha, "alpha"));
      AlgebraicNumber eta = canonical(need(raw.eta, "eta"));
      if (compare(alpha, Rat(0)) <= 0) fail(ErrorKind::InvalidBase, "alpha must be positive");
      if (compare(alpha, Rat(1)) == 0) {
        b = base_natural(1);
        break;
      }
      if (auto r = is_rational(eta)) {
        b = from_value(power(alpha, *r));
        break;
      }
      auto m = exp_machine(product(algebraic_machine(eta), ln_machine(algebraic_machine(alpha))));
      b = transcendental(BaseKind::AlphaPowEta, m, "alpha^eta", raw);
      break;
    }
    case BaseKind::LnAlpha: {
      AlgebraicNumber alpha = canonical(need(raw.alpha, "alpha"));
      if (compare(alpha, Rat(1)) <= 0) fail(ErrorKind::InvalidBase, "ln(alpha) needs alpha > 1");
      b = transcendental(BaseKind::LnAlpha, ln_machine(algebraic_machine(alpha)), "ln(alpha)", raw);
      break;
    }
    case BaseKind::LnRatio: {
      AlgebraicNumber alpha = canonical(need(raw.alpha, "alpha"));
      AlgebraicNumber beta = canonical(need(raw.beta, "beta"));
      if (compare(alpha, Rat(0)) <= 0 || compare(beta, Rat(0)) <= 0)
        fail(ErrorKind::InvalidBase, "ln ratio needs positive alpha and beta");
      if (compare(beta, Rat(1)) == 0) fail(ErrorKind::InvalidBase, "ln ratio needs beta != 1");
      if (compare(alpha, Rat(1)) == 0) fail(ErrorKind::InvalidBase, "ln ratio is zero for alpha = 1");
      // Both logarithms have a definite sign; the ratio must be positive.
      if ((compare(alpha, Rat(1)) > 0) != (compare(beta, Rat(1)) > 0))
        fail(ErrorKind::InvalidBase, "ln ratio must be positive");
      if (auto mn = mult_dependent(alpha, beta, raw.dependence_bound)) {
        // alpha^n = beta^m, so ln alpha / ln beta = m / n.
        Rat r(mn->first, mn->second);
        r.canonicalize();
        b = base_rational(r);
        break;
      }
      auto m = product(ln_machine(algebraic_machine(alpha)), reciprocal(ln_machine(algebraic_machine(beta))));
      b = transcendental(BaseKind::LnRatio, m, "ln(alpha)/ln(beta)", raw);
      break;
    }
  }
  if (raw.barrier_override) {
    b.barrier = *raw.barrier_override;
    b.barrier->provenance = BarrierProvenance::UserConfig;
    b.barrier->shift_height = false;
  }
  b.raw = raw;
  return b;
}

BaseDescriptor reciprocal_base(const BaseDescriptor& b) {
  if (b.value) {
    BaseDescriptor r = from_value(power(*b.value, -1));
    r.raw = b.raw;
    return r;
  }
  BaseDescriptor r = b;
  r.machine = rounded(reciprocal(b.machine));
  r.label = "1/(" + b.label + ")";
  return r;
}

namespace {

std::optional<AlgebraicNumber> opt_alg(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return algebraic_from_json(j.at(key));
}

Int int_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) return Int(static_cast<long>(j.get<std::int64_t>()));
  if (j.is_string()) {
    Rat r = parse_rat(j.get<std::string>());
    if (r.get_den() == 1) return r.get_num();
  }
  fail(ErrorKind::Parse, "expected an integer, got " + j.dump());
}

}  // namespace

RawBase raw_base_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    fail(ErrorKind::Parse, "base needs a string \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  RawBase raw;
  bool found = false;
  for (BaseKind k : {BaseKind::Natural, BaseKind::Rational, BaseKind::Algebraic, BaseKind::Pi, BaseKind::EPowPi,
                     BaseKind::EPowEta, BaseKind::AlphaPowEta, BaseKind::LnAlpha, BaseKind::LnRatio}) {
    if (base_kind_name(k) == kind) {
      raw.kind = k;
      found = true;
    }
  }
  if (!found) fail(ErrorKind::Parse, "unknown base kind: " + kind);
  switch (raw.kind) {
    case BaseKind::Natural:
      if (!j.contains("n")) fail(ErrorKind::Parse, "natural base needs \"n\"");
      raw.n = int_from_json(j.at("n"));
      break;
    case BaseKind::Rational:
      if (!j.contains("value")) fail(ErrorKind::Parse, "rational base needs \"value\"");
      raw.value = j.at("value").is_string() ? parse_rat(j.at("value").get<std::string>())
                                            : Rat(int_from_json(j.at("value")));
      break;
    case BaseKind::Algebraic: raw.alpha = algebraic_from_json(j); break;
    default:
      raw.alpha = opt_alg(j, "alpha");
      raw.beta = opt_alg(j, "beta");
      raw.eta = opt_alg(j, "eta");
      break;
  }
  if (j.contains("barrier")) {
    const auto& bj = j.at("barrier");
    if (!bj.contains("c") || !bj.contains("k")) fail(ErrorKind::Parse, "barrier override needs c and k");
    RootBarrier rb;
    rb.c = int_from_json(bj.at("c"));
    Int k = int_from_json(bj.at("k"));
    if (rb.c < 1 || k < 1) fail(ErrorKind::InvalidParams, "barrier c and k must be >= 1");
    rb.k = static_cast<std::uint64_t>(to_i64(k));
    rb.provenance = BarrierProvenance::UserConfig;
    raw.barrier_override = rb;
  }
  if (j.contains("table_constants")) {
    for (const auto& [key, val] : j.at("table_constants").items()) raw.table_constants[key] = int_from_json(val);
  }
  if (j.contains("dependence_bound")) {
    Int nb = int_from_json(j.at("dependence_bound"));
    if (nb < 1) fail(ErrorKind::InvalidParams, "dependence_bound must be >= 1");
    raw.dependence_bound = static_cast<std::uint64_t>(to_i64(nb));
  }
  return raw;
}

nlohmann::json base_to_json(const BaseDescriptor& b) {
  nlohmann::json j{{"kind", base_kind_name(b.kind)}, {"label", b.label}, {"transcendental", b.transcendental}};
  if (b.value) j["value"] = algebraic_to_json(*b.value);
  if (b.barrier) {
    j["barrier"] = {{"c", b.barrier->c.get_str()},
                    {"k", b.barrier->k},
                    {"provenance", provenance_name(b.barrier->provenance)}};
  } else if (!b.barrier_note.empty()) {
    j["barrier_missing"] = b.barrier_note;
  }
  return j;
}

}  // namespace xipow
