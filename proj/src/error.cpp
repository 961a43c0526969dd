#include "xipow/error.hpp"

namespace xipow {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NegativeExponent: return "NEGATIVE_EXPONENT";
    case ErrorKind::ZeroPoly: return "ZERO_POLY";
    case ErrorKind::ConstantPoly: return "CONSTANT_POLY";
    case ErrorKind::NotUniqueRoot: return "NOT_UNIQUE_ROOT";
    case ErrorKind::NonpositiveBase: return "NONPOSITIVE_BASE";
    case ErrorKind::DegenerateInput: return "DEGENERATE_INPUT";
    case ErrorKind::MissingConstant: return "MISSING_CONSTANT";
    case ErrorKind::InvalidBase: return "INVALID_BASE";
    case ErrorKind::ResourceLimit: return "RESOURCE_LIMIT";
    case ErrorKind::UndecidableBase: return "UNDECIDABLE_BASE";
    case ErrorKind::Precondition: return "PRECONDITION";
    case ErrorKind::NoStrategy: return "NO_STRATEGY";
    case ErrorKind::UniversalQuantifier: return "UNIVERSAL_QUANTIFIER";
    case ErrorKind::QeUnsupported: return "QE_UNSUPPORTED";
    case ErrorKind::DelegateFailure: return "DELEGATE_FAILURE";
    case ErrorKind::NonAlgebraicBase: return "NON_ALGEBRAIC_BASE";
    case ErrorKind::InvalidParams: return "INVALID_PARAMS";
    case ErrorKind::InvalidGame: return "INVALID_GAME";
    case ErrorKind::Parse: return "PARSE_ERROR";
    case ErrorKind::Io: return "IO_ERROR";
  }
  return "UNKNOWN";
}

bool is_resource_error(ErrorKind k) { return k == ErrorKind::ResourceLimit; }

}  // namespace xipow
