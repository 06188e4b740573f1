#include "hbarkp/policy.hpp"

#include <string>

#include "hbarkp/error.hpp"

namespace hbarkp {

void TruncationPolicy::validate() const {
  auto fail = [](const std::string& why) {
    throw Error(ErrorCode::InvalidArgument, "series-core", "TruncationPolicy", why);
  };
  if (hbar_max < hbar_min) fail("hbar_max < hbar_min");
  if (hbar_min > 0) fail("hbar_min must be <= 0");
  if (xi_min > 0) fail("xi_min must be <= 0");
  if (t_total_max < 0 || t_total_max > 100) fail("t_total_max must lie in [0, 100]");
  if (x_max < 0) fail("x_max must be >= 0");
  if (num_times < 0 || num_times > kMaxTimes)
    fail("num_times must lie in [0, " + std::to_string(kMaxTimes) + "]");
  if (xi_max_hint && *xi_max_hint < xi_min) fail("xi_max_hint < xi_min");
}

bool TruncationPolicy::contains(const Monomial& m) const noexcept {
  if (m.h < hbar_min || m.h > hbar_max) return false;
  if (m.xi < xi_min) return false;
  if (m.x < 0 || m.x > x_max) return false;
  if (m.logxi < 0 || m.logxi > 1) return false;
  int d = 0;
  for (int j = 0; j < kMaxTimes; ++j) {
    if (m.t[j] != 0 && j >= num_times) return false;
    d += m.t[j];
  }
  return d <= t_total_max;
}

TrustRecord TrustRecord::exact(const TruncationPolicy& policy) {
  TrustRecord r;
  r.xi.assign(static_cast<std::size_t>(policy.num_grades()), kNegInf);
  return r;
}

}  // namespace hbarkp
