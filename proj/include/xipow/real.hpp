#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "xipow/algebraic.hpp"
#include "xipow/numeric.hpp"

namespace xipow {

inline constexpr std::int64_t kDefaultAccuracyCap = 4096;

// A computable real: approx(n) is within 2^-n of the value for every n.
class Machine {
 public:
  explicit Machine(std::string tag) : tag_(std::move(tag)) {}
  virtual ~Machine() = default;
  Machine(const Machine&) = delete;
  Machine& operator=(const Machine&) = delete;

  // Deterministic and memoized; negative n is treated as 0.
  Rat approx(std::int64_t n) const;
  const std::string& tag() const { return tag_; }

 protected:
  virtual Rat compute(std::int64_t n) const = 0;

 private:
  std::string tag_;
  mutable std::mutex mu_;
  mutable std::map<std::int64_t, Rat> memo_;
};

using MachinePtr = std::shared_ptr<const Machine>;

MachinePtr constant_machine(const Rat& value);
MachinePtr product(MachinePtr a, MachinePtr b);
// Diverges when the value is 0.
MachinePtr reciprocal(MachinePtr a);
MachinePtr exp_machine(MachinePtr a);
// Diverges when the value is <= 0.
MachinePtr ln_machine(MachinePtr a);
MachinePtr pi_machine();
MachinePtr algebraic_machine(const AlgebraicNumber& a);
// Same value with outputs snapped to the 2^-(n+1) grid.
MachinePtr rounded(MachinePtr a);

// approx with an explicit accuracy cap; RESOURCE_LIMIT beyond it.
Rat approx(const MachinePtr& m, std::int64_t n, std::int64_t cap = kDefaultAccuracyCap);

}  // namespace xipow
