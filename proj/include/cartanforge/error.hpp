#pragma once

#include <stdexcept>
#include <string>

namespace cf {

enum class Err {
  DivisionByZero,
  PoleAtValue,
  NotNormalizable,
  ZeroPatternAsymmetric,
  SizeTooLarge,
  InternalInconsistency,
  UndefinedReflection,
  NonIntegerCoefficient,
  NotIsotropic,
  OrbitCapExceeded,
  NotASymmetry,
  ExtensionFailure,
  WrongCharacteristic,
  NotOdd,
  Degenerate,
  InvalidParams,
  WrongShape,
  NotStabilized,
  ExpectationFileInvalid,
  ParseError,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
public:
  Error(Err code, const std::string& what)
      : std::runtime_error(std::string(err_name(code)) + ": " + what), code_(code) {}
  Err code() const { return code_; }

private:
  Err code_;
};

[[noreturn]] inline void raise(Err code, const std::string& what) { throw Error(code, what); }

// Invariant violations that indicate a bug in this library, never bad input.
#define CF_CHECK(cond, msg) \
  do { \
    if (!(cond)) ::cf::raise(::cf::Err::InternalInconsistency, msg); \
  } while (0)

}  // namespace cf
