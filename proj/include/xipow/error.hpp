#pragma once

#include <stdexcept>
#include <string>

namespace xipow {

enum class ErrorKind {
  NegativeExponent,
  ZeroPoly,
  ConstantPoly,
  NotUniqueRoot,
  NonpositiveBase,
  DegenerateInput,
  MissingConstant,
  InvalidBase,
  ResourceLimit,
  UndecidableBase,
  Precondition,
  NoStrategy,
  UniversalQuantifier,
  QeUnsupported,
  DelegateFailure,
  NonAlgebraicBase,
  InvalidParams,
  InvalidGame,
  Parse,
  Io,
};

// Wire name used in CLI error objects, e.g. "RESOURCE_LIMIT".
const char* error_kind_name(ErrorKind k);

// True for budget/cap failures, false for inputs outside the supported fragment.
bool is_resource_error(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(detail), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& detail) {
  throw Error(kind, detail);
}

}  // namespace xipow
