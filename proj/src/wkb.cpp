#include "hbarkp/wkb.hpp"

#include <string>

#include "hbarkp/calculus.hpp"
#include "hbarkp/error.hpp"

namespace hbarkp {

namespace {

constexpr const char* kModule = "wkb";

GradedSymbol zero(const TruncationPolicy& p) { return make_symbol(std::span<const Term>{}, p); }

void check_generator(const GradedSymbol& X, const char* op) {
  for (const auto& t : X.terms())
    if (t.m.logxi != 0 || t.m.xi >= 0 || t.m.h < 0)
      throw Error(ErrorCode::InvalidArgument, kModule, op,
                  "term " + format_monomial(t.m) + " is not of negative ξ-degree and ℏ-order ≤ 0");
}

/// Drops the (uncertified) negative ℏ-grades and returns to `p`.
GradedSymbol restrict_to(const GradedSymbol& a, const TruncationPolicy& p) {
  TrustRecord tr = TrustRecord::exact(p);
  for (int h = p.hbar_min; h <= p.hbar_max; ++h) tr.xi[static_cast<std::size_t>(h - p.hbar_min)] = a.xi_trust(h);
  tr.beyond = a.trust().beyond;
  tr.t = a.trust().t;
  SymbolBuilder out(p);
  for (const auto& t : a.terms())
    if (t.m.h >= p.hbar_min) out.add(t.m, t.c);
  return std::move(out).finish(tr);
}

}  // namespace

TruncationPolicy phase_policy(const GradedSymbol& X) {
  TruncationPolicy p = X.policy();
  p.x_max = std::max(p.x_max, X.max_x() * std::max(1, -p.xi_min));
  return p;
}

TruncationPolicy exponential_policy(const TruncationPolicy& p) {
  TruncationPolicy q = p;
  q.hbar_min = std::min(p.hbar_min, 2 * p.xi_min);
  q.hbar_max = p.hbar_max + 1 - p.xi_min;
  return q;
}

GradedSymbol star_exp_total(const GradedSymbol& X) {
  const char* op = "star_exp_total";
  check_generator(X, op);
  TruncationPolicy q = exponential_policy(phase_policy(X));
  GradedSymbol Y = mul_hbar_power(with_policy(X, q), -1);
  GradedSymbol E = constant(1, q);
  GradedSymbol term = E;
  for (int k = 1; k <= 1 - q.xi_min; ++k) {
    term = scale(star_mul(term, Y), Rational(1, k));
    E = add(E, term);
    if (term.is_zero()) break;
  }
  for (const auto& t : E.terms())
    if (t.m.h < t.m.xi)
      throw Error(ErrorCode::NegativeHbarResidue, kModule, op,
                  "term " + format_monomial(t.m) + " is not a power of ℏ⁻¹ξ⁻¹ times a regular term");
  return E;
}

WkbPhase x_to_s(const GradedSymbol& X) {
  const char* op = "x_to_s";
  const TruncationPolicy p = phase_policy(X);
  GradedSymbol E = star_exp_total(X);
  GradedSymbol S = mul_hbar_power(log1p_series(sub(E, constant(1, E.policy()))), 1);
  for (const auto& t : S.terms())
    if (t.m.h < 0 && S.trusted(t.m))
      throw Error(ErrorCode::RegularityViolation, kModule, op, "ℏ log σ(e^{X/ℏ}) keeps " + format_monomial(t.m),
                  t.m.h);
  GradedSymbol regular = restrict_to(S, p);
  WkbPhase phase;
  for (int n = 0; n <= p.hbar_max; ++n) phase.S.push_back(hbar_component(regular, n));
  return phase;
}

GradedSymbol phase_symbol(const WkbPhase& phase) {
  GradedSymbol sum = zero(phase.S.at(0).policy());
  for (std::size_t n = 0; n < phase.S.size(); ++n)
    sum = add(sum, mul_hbar_power(phase.S[n], static_cast<int>(n)));
  return sum;
}

GradedSymbol s_to_x(const WkbPhase& phase) {
  const char* op = "s_to_x";
  GradedSymbol target = phase_symbol(phase);
  check_generator(target, op);
  const auto& p = target.policy();
  GradedSymbol X = zero(p);
  const int cap = 2 - p.xi_min;
  for (int n = 0; n < static_cast<int>(phase.S.size()); ++n) {
    bool converged = false;
    for (int iter = 0; iter < cap && !converged; ++iter) {
      GradedSymbol D = hbar_component(sub(target, with_policy(phase_symbol(x_to_s(X)), p)), n);
      if (is_zero_within_trust(D)) {
        converged = true;
        break;
      }
      X = add(X, mul_hbar_power(trusted_part(D), n));
    }
    if (!converged)
      throw Error(ErrorCode::NoConvergenceAtGrade, kModule, op, "grade-wise correction did not settle", n);
  }
  return X;
}

WaveData wave_function(const DressingData& data, bool t_on) {
  const int N = static_cast<int>(data.X.size()) - 1;
  GradedSymbol X = assemble_X(data.X, N);
  WkbPhase full = x_to_s(X);
  WaveData out{{}, data.alpha, zeta_symbol(X.policy())};
  for (auto& S : full.S) {
    GradedSymbol hat = at_x_zero(S);
    out.phase.S.push_back(t_on ? hat : t_degree_part(hat, 0));
  }
  return out;
}

GradedSymbol wave_linear_residual(const GradedSymbol& L, const GradedSymbol& X) {
  GradedSymbol E = star_exp_total(X);
  const auto& q = E.policy();
  if (L.policy().x_max > q.x_max)
    throw Error(ErrorCode::PolicyMismatch, kModule, "wave_linear_residual", "L does not fit the exponential window");
  GradedSymbol xi = make_symbol({Term{mono(0, 1), 1}}, q);
  return sub(star_mul(with_policy(L, q), E), mul(E, xi));
}

}  // namespace hbarkp
