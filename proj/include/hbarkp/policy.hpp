#ifndef HBARKP_POLICY_HPP
#define HBARKP_POLICY_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "hbarkp/monomial.hpp"

namespace hbarkp {

/// Retention window for every symbol built under it. Monomials outside the
/// window are never stored; the trust record says what that costs.
struct TruncationPolicy {
  int hbar_min = 0;  // negative only for internal exponential symbols (see wkb)
  int hbar_max = 0;
  int xi_min = 0;
  std::optional<int> xi_max_hint;
  int t_total_max = 0;
  int x_max = 0;
  int num_times = 1;

  /// Throws Error(InvalidArgument) when the window is empty or malformed.
  void validate() const;

  bool contains(const Monomial& m) const noexcept;

  int num_grades() const noexcept { return hbar_max - hbar_min + 1; }

  friend bool operator==(const TruncationPolicy&, const TruncationPolicy&) = default;
};

inline constexpr std::int64_t kNegInf = -(std::int64_t{1} << 40);
inline constexpr std::int64_t kPosInf = std::int64_t{1} << 40;

/// Which stored coefficients are guaranteed exact.
///
/// `xi[h - hbar_min]` is the lowest ξ-degree from which the coefficients at
/// ℏ-grade h agree with the untruncated object: kNegInf means the whole grade
/// is exact, kPosInf means nothing at that grade can be relied on. `beyond`
/// plays the same role for the grades above hbar_max, which are never stored
/// (kNegInf: the object truly has none). `t` is the highest total t-degree at
/// which coefficients are exact.
struct TrustRecord {
  std::vector<std::int64_t> xi;
  std::int64_t beyond = kNegInf;
  std::int64_t t = kPosInf;

  static TrustRecord exact(const TruncationPolicy& policy);

  friend bool operator==(const TrustRecord&, const TrustRecord&) = default;
};

}  // namespace hbarkp

#endif  // HBARKP_POLICY_HPP
