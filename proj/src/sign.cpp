#include "xipow/sign.hpp"

#include <algorithm>

#include "xipow/error.hpp"

namespace xipow {

Fewnomial Fewnomial::from_uni(const UniPoly& p) {
  Fewnomial f;
  const auto& c = p.coeffs();
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
    if (c[i] != 0) f.terms.emplace_back(c[i], Int(i));
  return f;
}

int sign_fewnomial(const Fewnomial& p, const Int& n) {
  if (n < 1) fail(ErrorKind::Precondition, "fewnomial evaluation needs n >= 1");
  if (p.terms.empty()) return 0;
  std::vector<std::pair<Int, Int>> t = p.terms;
  // Running sum of |b_2| + ... + |b_l| for the current tail.
  Int tail = 0;
  for (std::size_t i = 1; i < t.size(); ++i) tail += abs(t[i].first);
  std::size_t head = 0;
  Int b = t[0].first;
  while (head + 1 < t.size()) {
    const Int gap = t[head].second - t[head + 1].second;
    if (b != 0) {
      // Smallest e with n^e > tail; dominance holds once gap >= e.
      bool dominant = false;
      if (n == 1) {
        dominant = abs(b) > tail;
      } else {
        Int e = 0, pw = 1;
        while (pw <= tail) {
          pw *= n;
          ++e;
        }
        if (gap >= e) dominant = true;
        else dominant = abs(b) * pow_int(n, static_cast<std::uint64_t>(gap.get_ui())) > tail;
      }
      if (dominant) return sgn(b);
    }
    ++head;
    if (b != 0) {
      // Collapsing is only reached when gap is below log_n(tail), so the power is small.
      b = b * (n == 1 ? Int(1) : pow_int(n, static_cast<std::uint64_t>(to_i64(gap)))) + t[head].first;
    } else {
      b = t[head].first;
    }
    tail -= abs(t[head].first);
  }
  return sgn(b);
}

std::int64_t propagation_accuracy(std::int64_t L, const UniPoly& p, const Rat& k_bound) {
  return L + ceil_log2(Rat(p.height() + 1)) +
         2 * static_cast<std::int64_t>(std::max(0, p.degree())) * std::max<std::int64_t>(0, ceil_log2(k_bound + 1));
}

namespace {

// |x| bound used by the convergence loop.
Rat abs_bound(const BaseDescriptor& base) { return abs_rat(base.machine->approx(0)) + 1; }

Enclosure run_loop(const UniPoly& p, const BaseDescriptor& base, std::int64_t cap, std::int64_t loop_cap,
                   std::int64_t* max_acc) {
  const Rat k_bound = abs_bound(base);
  for (std::int64_t L = 1; L <= loop_cap; ++L) {
    std::int64_t m = propagation_accuracy(L, p, k_bound);
    if (m > cap)
      fail(ErrorKind::ResourceLimit, "sign loop needs accuracy " + std::to_string(m) + " above cap " +
                                         std::to_string(cap));
    if (max_acc) *max_acc = std::max(*max_acc, m);
    Rat v = p.eval(base.machine->approx(m));
    if (abs_rat(v) > pow2(-L)) return {sgn(v), L, abs_rat(v) - pow2(-L), abs_rat(v) + pow2(-L)};
  }
  fail(ErrorKind::ResourceLimit, "sign loop exceeded L cap " + std::to_string(loop_cap));
}

Int barrier_accuracy(const UniPoly& p, const RootBarrier& b, Int* sigma_out) {
  const std::uint64_t d = static_cast<std::uint64_t>(p.degree());
  const Int h = p.height();
  Int sigma = b.sigma(d, h);
  if (sigma_out) *sigma_out = sigma;
  return 1 + 2 * sigma + 3 * Int(static_cast<unsigned long>(d)) * Int(ceil_log2(Rat(h + 4)));
}

}  // namespace

int sign_with_barrier(const UniPoly& p, const BaseDescriptor& base, std::int64_t cap) {
  if (p.degree() <= 0) return p.is_zero() ? 0 : sgn(p.lead());
  if (!base.barrier) fail(ErrorKind::Precondition, "base " + base.label + " has no root barrier");
  Int sigma;
  Int n = barrier_accuracy(p, *base.barrier, &sigma);
  if (n > cap)
    fail(ErrorKind::ResourceLimit, "barrier path needs accuracy " + n.get_str() + " above cap " + std::to_string(cap));
  const std::int64_t ni = to_i64(n);
  Rat t = base.machine->approx(ni);
  Rat v = p.eval(t);
  if (abs_rat(v) <= pow2(-2 * to_i64(sigma) - 1) && abs_rat(t) < Rat(p.height() + 2)) return 0;
  return sgn(v);
}

int sign_transcendental(const UniPoly& p, const BaseDescriptor& base, std::int64_t cap, std::int64_t loop_cap) {
  if (p.degree() <= 0) return p.is_zero() ? 0 : sgn(p.lead());
  if (!base.transcendental) fail(ErrorKind::Precondition, "base " + base.label + " is not known to be transcendental");
  return run_loop(p, base, cap, loop_cap, nullptr).sign;
}

UniPoly ground_to_uni(const LaurentPoly& p) {
  if (!p.is_ground()) fail(ErrorKind::Precondition, "sign needs a polynomial in xi only: " + p.to_sexpr());
  return p.to_uni_xi();
}

SignOracle::SignOracle(BaseDescriptor base, SignOptions opts) : base_(std::move(base)), opts_(opts) {}

SignStats SignOracle::stats() const {
  std::lock_guard<std::mutex> lock(mu_);
  return stats_;
}

int SignOracle::sign(const LaurentPoly& p) const { return sign(ground_to_uni(p)); }

int SignOracle::sign(const UniPoly& p) const {
  if (p.degree() <= 0) return p.is_zero() ? 0 : sgn(p.lead());
  {
    std::lock_guard<std::mutex> lock(mu_);
    ++stats_.queries;
    auto it = memo_.find(p);
    if (it != memo_.end()) {
      ++stats_.cache_hits;
      return it->second;
    }
  }
  int s = compute(p);
  std::lock_guard<std::mutex> lock(mu_);
  memo_.emplace(p, s);
  return s;
}

int SignOracle::compute(const UniPoly& p) const {
  if (base_.natural) {
    std::lock_guard<std::mutex> lock(mu_);
    ++stats_.fewnomial;
  }
  if (base_.natural) return sign_fewnomial(Fewnomial::from_uni(p), *base_.natural);

  if (base_.barrier) {
    Int n = barrier_accuracy(p, *base_.barrier, nullptr);
    if (n <= opts_.accuracy_cap) {
      std::lock_guard<std::mutex> lock(mu_);
      ++stats_.barrier;
      stats_.max_accuracy = std::max(stats_.max_accuracy, to_i64(n));
    }
    if (n <= opts_.accuracy_cap) return sign_with_barrier(p, base_, opts_.accuracy_cap);
  }
  if (base_.value) {
    // Exact zero test, after which the convergence loop must terminate.
    const AlgebraicNumber& a = *base_.value;
    UniPoly g = gcd(p, a.q);
    bool zero = g.degree() >= 1 && sturm_count(g, a.lo, a.hi) >= 1;
    std::lock_guard<std::mutex> lock(mu_);
    ++stats_.exact_zero;
    if (zero) return 0;
  } else if (!base_.transcendental) {
    fail(ErrorKind::UndecidableBase, "base " + base_.label + " has neither a root barrier nor a transcendence flag");
  }
  std::int64_t acc = 0;
  Enclosure e = run_loop(p, base_, opts_.accuracy_cap, opts_.loop_cap, &acc);
  std::lock_guard<std::mutex> lock(mu_);
  ++stats_.loop;
  stats_.max_accuracy = std::max(stats_.max_accuracy, acc);
  enclosures_.emplace(p, e);
  return e.sign;
}

Enclosure SignOracle::enclose(const LaurentPoly& q) const { return enclose(ground_to_uni(q)); }

Enclosure SignOracle::enclose(const UniPoly& q) const {
  if (q.degree() <= 0) {
    if (q.is_zero()) fail(ErrorKind::Precondition, "enclosure of a polynomial vanishing at the base");
    Rat v = abs_rat(Rat(q.lead()));
    return {sgn(q.lead()), 0, v, v};
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = enclosures_.find(q);
    if (it != enclosures_.end()) return it->second;
  }
  if (sign(q) == 0) fail(ErrorKind::Precondition, "enclosure of a polynomial vanishing at the base");
  std::int64_t acc = 0;
  Enclosure e = run_loop(q, base_, opts_.accuracy_cap, opts_.loop_cap, &acc);
  std::lock_guard<std::mutex> lock(mu_);
  stats_.max_accuracy = std::max(stats_.max_accuracy, acc);
  enclosures_.emplace(q, e);
  return e;
}

std::int64_t SignOracle::lambda_floor(const LaurentPoly& num, const LaurentPoly& den) const {
  if (sign(num) <= 0 || sign(den) <= 0) fail(ErrorKind::Precondition, "lambda needs a positive argument");
  if (sign(LaurentPoly::xi() - 1) <= 0) fail(ErrorKind::Precondition, "lambda needs a base above 1");
  // below(z): xi^z <= num/den.
  auto below = [&](std::int64_t z) { return sign(den * LaurentPoly::xi(z) - num) <= 0; };
  std::int64_t lo, hi;  // below(lo) holds, below(hi) fails
  if (below(0)) {
    lo = 0;
    hi = 1;
    while (below(hi)) {
      lo = hi;
      hi *= 2;
    }
  } else {
    hi = 0;
    lo = -1;
    while (!below(lo)) {
      hi = lo;
      lo *= 2;
    }
  }
  while (hi - lo > 1) {
    std::int64_t mid = lo + (hi - lo) / 2;
    if (below(mid)) lo = mid;
    else hi = mid;
  }
  return lo;
}

int sign(const UniPoly& p, const BaseDescriptor& base, SignOptions opts) {
  SignOracle oracle(base, opts);
  return oracle.sign(p);
}

}  // namespace xipow
