#ifndef HBARKP_ERROR_HPP
#define HBARKP_ERROR_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hbarkp {

enum class ErrorCode {
  MonomialOutOfWindow,
  LogLogProduct,
  PolicyMismatch,
  NonNegativePowerInIntegrand,
  LogInProjection,
  TrustUnderflow,
  NonTerminatingConjugation,
  InvalidGenerator,
  NotCanonical,
  TimeIndexOutOfRange,
  InductionHypothesisViolated,
  AlphaNotConstant,
  ResidualLogTerm,
  NegativeHbarResidue,
  RegularityViolation,
  NoConvergenceAtGrade,
  MissingVGrade,
  NotIntegrable,
  AlphaUnsupported,
  SpecParseError,
  WindowTooLarge,
  InvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

/// Every library failure is reported through this type. `module` and
/// `operation` name where it happened; `grade` carries the recursion order or
/// ℏ-grade when one is meaningful.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string module, std::string operation, std::string detail,
        std::optional<int> grade = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }
  const std::string& operation() const noexcept { return operation_; }
  const std::string& detail() const noexcept { return detail_; }
  std::optional<int> grade() const noexcept { return grade_; }

  /// Same error re-tagged with a recursion order, keeping the original detail.
  Error with_grade(int grade) const;

 private:
  ErrorCode code_;
  std::string module_;
  std::string operation_;
  std::string detail_;
  std::optional<int> grade_;
};

}  // namespace hbarkp

#endif  // HBARKP_ERROR_HPP
