#pragma once

#include <stdexcept>
#include <string>

namespace modinv {

enum class Errc {
  NotPrime,
  ReducibleModulus,
  FieldTooLarge,
  UndeclaredDenominator,
  ContextMismatch,
  ZeroPolynomial,
  NotDivisible,
  SingularMatrix,
  NonCommuting,
  NotUnipotent,
  NotType111,
  HypothesisViolation,
  NonTermination,
  Inconsistent,
  Underdetermined,
  BadIndex,
  NoVanishingCombination,
  DivisionFailure,
  LeadTermMismatch,
  DenominatorVanishes,
  NotSigmaType,
  UnknownTheorem,
  PreconditionUnmet,
  InvalidInput,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NotPrime: return "NotPrime";
    case Errc::ReducibleModulus: return "ReducibleModulus";
    case Errc::FieldTooLarge: return "FieldTooLarge";
    case Errc::UndeclaredDenominator: return "UndeclaredDenominator";
    case Errc::ContextMismatch: return "ContextMismatch";
    case Errc::ZeroPolynomial: return "ZeroPolynomial";
    case Errc::NotDivisible: return "NotDivisible";
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::NonCommuting: return "NonCommuting";
    case Errc::NotUnipotent: return "NotUnipotent";
    case Errc::NotType111: return "NotType111";
    case Errc::HypothesisViolation: return "HypothesisViolation";
    case Errc::NonTermination: return "NonTermination";
    case Errc::Inconsistent: return "Inconsistent";
    case Errc::Underdetermined: return "Underdetermined";
    case Errc::BadIndex: return "BadIndex";
    case Errc::NoVanishingCombination: return "NoVanishingCombination";
    case Errc::DivisionFailure: return "DivisionFailure";
    case Errc::LeadTermMismatch: return "LeadTermMismatch";
    case Errc::DenominatorVanishes: return "DenominatorVanishes";
    case Errc::NotSigmaType: return "NotSigmaType";
    case Errc::UnknownTheorem: return "UnknownTheorem";
    case Errc::PreconditionUnmet: return "PreconditionUnmet";
    case Errc::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace modinv
