#include "xipow/real.hpp"

#include <algorithm>

#include "xipow/error.hpp"

namespace xipow {

Rat Machine::approx(std::int64_t n) const {
  if (n < 0) n = 0;
  std::lock_guard<std::mutex> lock(mu_);
  auto it = memo_.find(n);
  if (it != memo_.end()) return it->second;
  Rat v = compute(n);
  memo_.emplace(n, v);
  return v;
}

Rat approx(const MachinePtr& m, std::int64_t n, std::int64_t cap) {
  if (n > cap)
    fail(ErrorKind::ResourceLimit, "accuracy " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
  return m->approx(n);
}

namespace {

class ConstantMachine : public Machine {
 public:
  explicit ConstantMachine(Rat v) : Machine("constant"), v_(std::move(v)) {}

 protected:
  Rat compute(std::int64_t) const override { return v_; }

 private:
  Rat v_;
};

class RoundedMachine : public Machine {
 public:
  explicit RoundedMachine(MachinePtr a) : Machine(a->tag()), a_(std::move(a)) {}

 protected:
  Rat compute(std::int64_t n) const override { return round_to_grid(a_->approx(n + 1), n + 1); }

 private:
  MachinePtr a_;
};

class ProductMachine : public Machine {
 public:
  ProductMachine(MachinePtr a, MachinePtr b) : Machine("product"), a_(std::move(a)), b_(std::move(b)) {
    ell_ = ceil_log2(abs_rat(a_->approx(0)) + abs_rat(b_->approx(0)) + 3);
  }

 protected:
  Rat compute(std::int64_t n) const override { return a_->approx(n + ell_) * b_->approx(n + ell_); }

 private:
  MachinePtr a_, b_;
  std::int64_t ell_;
};

class ReciprocalMachine : public Machine {
 public:
  explicit ReciprocalMachine(MachinePtr a) : Machine("reciprocal"), a_(rounded(std::move(a))) {
    // Smallest k >= 2 with 2^-k < |a_k|; loops forever on a zero value.
    for (k_ = 2;; ++k_) {
      ak_ = a_->approx(k_);
      if (abs_rat(ak_) > pow2(-k_)) break;
    }
    ell_ = 2 * (k_ + ceil_log2(Rat(ak_.get_den())));
    floor_ = abs_rat(ak_) - pow2(-k_);
    sign_ = sgn(ak_);
  }

 protected:
  Rat compute(std::int64_t n) const override {
    Rat m = std::max(abs_rat(a_->approx(n + ell_)), floor_);
    return Rat(sign_) / m;
  }

 private:
  MachinePtr a_;
  std::int64_t k_ = 2;
  Rat ak_;
  std::int64_t ell_ = 0;
  Rat floor_;
  int sign_ = 1;
};

class ExpMachine : public Machine {
 public:
  explicit ExpMachine(MachinePtr a) : Machine("exp-of"), a_(std::move(a)) {
    Rat j = abs_rat(a_->approx(0)) + 1;
    cj_ = to_i64(ceil_rat(j));
  }

 protected:
  Rat compute(std::int64_t n) const override {
    std::int64_t m = n + 1 + 8 * cj_ * cj_;
    // |x| <= cj + 1 for every point the series is evaluated at or compared to.
    const std::int64_t x_bound = cj_ + 1;
    while (!tail_ok(m, x_bound, n + 2)) m += m / 2 + 1;
    // t_M is (e^{cj+1} <= 2^{2cj+2})-Lipschitz there, so this N keeps the error <= 2^-(n+2).
    std::int64_t big_n = n + 4 + 2 * cj_;
    Rat x = a_->approx(big_n);

    std::int64_t w = n + 12 + 2 * static_cast<std::int64_t>(bit_length(Int(m))) + 2 * cj_;
    Int one = pow2_int(static_cast<std::uint64_t>(w));
    Int xf = floor_rat(x * Rat(one) + Rat(1, 2));
    Int term = one, sum = one;
    for (std::int64_t j = 1; j <= m; ++j) {
      term = term * xf;
      mpz_tdiv_q(term.get_mpz_t(), term.get_mpz_t(), one.get_mpz_t());
      mpz_tdiv_q_ui(term.get_mpz_t(), term.get_mpz_t(), static_cast<unsigned long>(j));
      if (term == 0) break;
      sum += term;
    }
    return round_to_grid(Rat(sum, one), n + 3);
  }

 private:
  // 2 X^{M+1} / (M+1)! <= 2^-bits, valid as a tail bound once M + 2 >= 2X.
  static bool tail_ok(std::int64_t m, std::int64_t x, std::int64_t bits) {
    if (m + 2 < 2 * x) return false;
    Int fact;
    mpz_fac_ui(fact.get_mpz_t(), static_cast<unsigned long>(m + 1));
    Int lhs = pow_int(Int(static_cast<long>(x)), static_cast<std::uint64_t>(m + 1)) * 2 *
              pow2_int(static_cast<std::uint64_t>(bits));
    return lhs <= fact;
  }

  MachinePtr a_;
  std::int64_t cj_;
};

class LnMachine : public Machine {
 public:
  explicit LnMachine(MachinePtr a) : Machine("ln-of"), a_(std::move(a)) {
    for (k_ = 0;; ++k_) {
      ak_ = a_->approx(k_);
      if (ak_ > pow2(-k_)) break;
      if (k_ > (1 << 20)) fail(ErrorKind::ResourceLimit, "ln of a value that is not provably positive");
    }
    lo_ = ak_ - pow2(-k_);
    hi_ = ak_ + pow2(-k_);
    auto [l1, l2] = ln_enclosure(lo_, 8);
    auto [u1, u2] = ln_enclosure(hi_, 8);
    Rat zmax = std::max({abs_rat(l1), abs_rat(l2), abs_rat(u1), abs_rat(u2)});
    z1_ = ceil_rat(zmax);
    Rat ylo = abs_rat((lo_ - 1) / (lo_ + 1));
    Rat yhi = abs_rat((hi_ - 1) / (hi_ + 1));
    ybound_ = std::max(ylo, yhi);
    z2_ = 1 - ybound_;
    extra_bits_ = std::max<std::int64_t>(0, ceil_log2(Rat(2) / lo_));
  }

 protected:
  Rat compute(std::int64_t n) const override {
    std::int64_t m = to_i64(ceil_rat((Rat(n + 1) + Rat(z1_)) / (2 * z2_)));
    while (!tail_ok(m, n + 3)) m = 2 * m + 1;
    // t_M has derivative <= 1/x, and x >= lo/2 at this accuracy.
    std::int64_t big_n = n + 4 + extra_bits_;
    Rat x = abs_rat(a_->approx(big_n));
    Rat y = (x - 1) / (x + 1);
    if (y == 0) return Rat(0);

    Rat yb = std::max(ybound_, abs_rat(y));
    Int inv_gap = ceil_rat(1 / (1 - yb * yb));
    std::int64_t w = n + 12 + 2 * static_cast<std::int64_t>(bit_length(Int(m + 1))) +
                     static_cast<std::int64_t>(bit_length(inv_gap));
    Int one = pow2_int(static_cast<std::uint64_t>(w));
    Int yf = floor_rat(y * Rat(one) + Rat(1, 2));
    Int y2 = yf * yf;
    mpz_tdiv_q(y2.get_mpz_t(), y2.get_mpz_t(), one.get_mpz_t());
    Int p = yf, sum = yf;
    for (std::int64_t j = 1; j <= m; ++j) {
      p = p * y2;
      mpz_tdiv_q(p.get_mpz_t(), p.get_mpz_t(), one.get_mpz_t());
      if (p == 0) break;
      Int t = p;
      mpz_tdiv_q_ui(t.get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(2 * j + 1));
      sum += t;
    }
    return round_to_grid(Rat(2 * sum, one), n + 3);
  }

 private:
  // 2 yb^{2M+3} / ((2M+3)(1 - yb^2)) <= 2^-bits, with yb rounded up to a dyadic.
  bool tail_ok(std::int64_t m, std::int64_t bits) const {
    std::int64_t g = ceil_log2(Rat(4) / z2_) + 2;
    Rat yb = ceil_to_grid(ybound_, g);
    Rat lhs = 2 * pow_rat(yb, static_cast<std::uint64_t>(2 * m + 3)) /
              (Rat(2 * m + 3) * (1 - yb * yb));
    return lhs <= pow2(-bits);
  }

  MachinePtr a_;
  std::int64_t k_ = 0;
  Rat ak_, lo_, hi_, ybound_, z2_;
  Int z1_;
  std::int64_t extra_bits_ = 0;
};

class PiMachine : public Machine {
 public:
  PiMachine() : Machine("pi") {}

 protected:
  Rat compute(std::int64_t n) const override {
    // Each atan term carries < 3 ulps of truncation error; pick guard bits to absorb them.
    std::int64_t g = 8;
    while (Int(9 * (n + g) + 400) > pow2_int(static_cast<std::uint64_t>(g - 2))) ++g;
    std::int64_t w = n + g;
    Int v = 16 * atan_inv(5, w) - 4 * atan_inv(239, w);
    return round_to_grid(Rat(v, pow2_int(static_cast<std::uint64_t>(w))), n + 1);
  }

 private:
  // floor-based fixed-point atan(1/m) * 2^w.
  static Int atan_inv(unsigned long m, std::int64_t w) {
    Int p = pow2_int(static_cast<std::uint64_t>(w));
    mpz_tdiv_q_ui(p.get_mpz_t(), p.get_mpz_t(), m);
    Int sum = p;
    unsigned long m2 = m * m;
    for (unsigned long k = 1;; ++k) {
      mpz_tdiv_q_ui(p.get_mpz_t(), p.get_mpz_t(), m2);
      if (p == 0) break;
      Int t = p;
      mpz_tdiv_q_ui(t.get_mpz_t(), t.get_mpz_t(), 2 * k + 1);
      if (k % 2) sum -= t;
      else sum += t;
    }
    return sum;
  }
};

class AlgebraicMachine : public Machine {
 public:
  explicit AlgebraicMachine(const AlgebraicNumber& a) : Machine("algebraic"), a_(a) {
    if (a_.is_point()) {
      point_ = a_.lo;
      return;
    }
    g_ = squarefree_part(a_.q);
    width_ = a_.hi - a_.lo;
    sign_lo_ = g_.sign_at(a_.lo);
    if (sign_lo_ == 0 || g_.sign_at(a_.hi) == 0)
      fail(ErrorKind::Precondition, "algebraic machine needs a canonical representation");
  }

 protected:
  Rat compute(std::int64_t n) const override {
    if (point_) return *point_;
    std::int64_t steps = std::max<std::int64_t>(0, ceil_log2(width_) + n);
    while (depth_ < steps) {
      Rat mid = a_.lo + width_ * Rat(2 * index_ + 1) / Rat(pow2_int(static_cast<std::uint64_t>(depth_ + 1)));
      int s = g_.sign_at(mid);
      if (s == 0) {
        point_ = mid;
        return mid;
      }
      index_ = 2 * index_ + (s == sign_lo_ ? 1 : 0);
      ++depth_;
    }
    // Interval at depth `steps` is an ancestor of the deepest one.
    Int j = index_;
    mpz_fdiv_q_2exp(j.get_mpz_t(), j.get_mpz_t(), static_cast<mp_bitcnt_t>(depth_ - steps));
    return a_.lo + width_ * Rat(2 * j + 1) / Rat(pow2_int(static_cast<std::uint64_t>(steps + 1)));
  }

 private:
  AlgebraicNumber a_;
  UniPoly g_;
  Rat width_;
  int sign_lo_ = 0;
  mutable std::optional<Rat> point_;
  mutable std::int64_t depth_ = 0;
  mutable Int index_ = 0;
};

}  // namespace

MachinePtr constant_machine(const Rat& value) { return std::make_shared<ConstantMachine>(value); }
MachinePtr product(MachinePtr a, MachinePtr b) {
  return std::make_shared<ProductMachine>(std::move(a), std::move(b));
}
MachinePtr reciprocal(MachinePtr a) { return std::make_shared<ReciprocalMachine>(std::move(a)); }
MachinePtr exp_machine(MachinePtr a) { return std::make_shared<ExpMachine>(std::move(a)); }
MachinePtr ln_machine(MachinePtr a) { return std::make_shared<LnMachine>(std::move(a)); }
MachinePtr pi_machine() { return std::make_shared<PiMachine>(); }
MachinePtr algebraic_machine(const AlgebraicNumber& a) { return std::make_shared<AlgebraicMachine>(a); }
MachinePtr rounded(MachinePtr a) { return std::make_shared<RoundedMachine>(std::move(a)); }

}  // namespace xipow
