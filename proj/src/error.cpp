#include "hbarkp/error.hpp"

#include <utility>

namespace hbarkp {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MonomialOutOfWindow: return "MonomialOutOfWindow";
    case ErrorCode::LogLogProduct: return "LogLogProduct";
    case ErrorCode::PolicyMismatch: return "PolicyMismatch";
    case ErrorCode::NonNegativePowerInIntegrand: return "NonNegativePowerInIntegrand";
    case ErrorCode::LogInProjection: return "LogInProjection";
    case ErrorCode::TrustUnderflow: return "TrustUnderflow";
    case ErrorCode::NonTerminatingConjugation: return "NonTerminatingConjugation";
    case ErrorCode::InvalidGenerator: return "InvalidGenerator";
    case ErrorCode::NotCanonical: return "NotCanonical";
    case ErrorCode::TimeIndexOutOfRange: return "TimeIndexOutOfRange";
    case ErrorCode::InductionHypothesisViolated: return "InductionHypothesisViolated";
    case ErrorCode::AlphaNotConstant: return "AlphaNotConstant";
    case ErrorCode::ResidualLogTerm: return "ResidualLogTerm";
    case ErrorCode::NegativeHbarResidue: return "NegativeHbarResidue";
    case ErrorCode::RegularityViolation: return "RegularityViolation";
    case ErrorCode::NoConvergenceAtGrade: return "NoConvergenceAtGrade";
    case ErrorCode::MissingVGrade: return "MissingVGrade";
    case ErrorCode::NotIntegrable: return "NotIntegrable";
    case ErrorCode::AlphaUnsupported: return "AlphaUnsupported";
    case ErrorCode::SpecParseError: return "SpecParseError";
    case ErrorCode::WindowTooLarge: return "WindowTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::string compose(ErrorCode code, const std::string& module, const std::string& operation,
                    const std::string& detail, std::optional<int> grade) {
  std::string s = std::string(error_code_name(code)) + " in " + module + "::" + operation;
  if (grade) s += " (order " + std::to_string(*grade) + ")";
  if (!detail.empty()) s += ": " + detail;
  return s;
}

}  // namespace

Error::Error(ErrorCode code, std::string module, std::string operation, std::string detail,
             std::optional<int> grade)
    : std::runtime_error(compose(code, module, operation, detail, grade)),
      code_(code),
      module_(std::move(module)),
      operation_(std::move(operation)),
      detail_(std::move(detail)),
      grade_(grade) {}

Error Error::with_grade(int grade) const {
  return Error(code_, module_, operation_, detail_, grade);
}

}  // namespace hbarkp
