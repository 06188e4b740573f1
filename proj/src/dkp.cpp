#include "hbarkp/dkp.hpp"

#include <map>
#include <string>

#include "hbarkp/calculus.hpp"
#include "hbarkp/error.hpp"
#include "hbarkp/rh.hpp"

namespace hbarkp {

namespace {

constexpr const char* kModule = "dkp";

GradedSymbol monomial_symbol(const Monomial& m, const TruncationPolicy& p) {
  return make_symbol({Term{m, 1}}, p);
}

}  // namespace

DkpDressing dkp_dress(const DkpSeed& seed, bool t_on) {
  const auto& p = seed.X0.policy();
  GradedSymbol xi = monomial_symbol(mono(0, 1), p);
  GradedSymbol x = monomial_symbol(mono(0, 0, 1), p);
  GradedSymbol alpha = constant(seed.alpha0, p);
  GradedSymbol L = seed.X0.is_zero() ? xi : poisson_ad_exp(ExpGenerator::neg_order(seed.X0), xi);
  GradedSymbol M = classical_dressing_conjugate(seed.X0, alpha, t_on, x);
  return {L, M};
}

GradedSymbol classical_substitute(const GradedSymbol& f0, const GradedSymbol& L, const GradedSymbol& M) {
  const auto& p = f0.policy();
  std::map<int, GradedSymbol> l_powers;
  std::map<int, GradedSymbol> m_powers;
  auto l_power = [&](int k) -> const GradedSymbol& {
    auto it = l_powers.find(k);
    if (it != l_powers.end()) return it->second;
    GradedSymbol v = k >= 0 ? power(L, static_cast<unsigned>(k))
                            : power(laurent_inverse(L), static_cast<unsigned>(-k));
    return l_powers.emplace(k, std::move(v)).first->second;
  };
  auto m_power = [&](int a) -> const GradedSymbol& {
    auto it = m_powers.find(a);
    if (it != m_powers.end()) return it->second;
    return m_powers.emplace(a, power(M, static_cast<unsigned>(a))).first->second;
  };
  GradedSymbol sum = make_symbol(std::span<const Term>{}, p);
  for (const auto& t : f0.terms()) {
    if (t.m.h != 0 || t.m.logxi != 0 || t.m.t_degree() != 0)
      throw Error(ErrorCode::InvalidArgument, kModule, "classical_substitute",
                  "term " + format_monomial(t.m) + " is not a function of x and ξ alone");
    sum = add(sum, scale(mul(m_power(t.m.x), l_power(t.m.xi)), t.c));
  }
  return sum;
}

std::pair<GradedSymbol, GradedSymbol> dkp_rh_residual(const GradedSymbol& f0, const GradedSymbol& g0,
                                                      const GradedSymbol& L, const GradedSymbol& M) {
  GradedSymbol bracket = poisson(f0, g0);
  if (!(trusted_part(sub(bracket, constant(1, f0.policy()))).is_zero()))
    throw Error(ErrorCode::NotCanonical, kModule, "dkp_rh_residual",
                "{f0, g0} = " + to_string(bracket) + ", expected 1");
  return {xi_project(classical_substitute(f0, L, M), XiPart::Negative),
          xi_project(classical_substitute(g0, L, M), XiPart::Negative)};
}

GradedSymbol dkp_lax_residual(const GradedSymbol& L, int n) {
  if (n < 1 || n > L.policy().num_times)
    throw Error(ErrorCode::TimeIndexOutOfRange, kModule, "dkp_lax_residual",
                "n = " + std::to_string(n) + " with T = " + std::to_string(L.policy().num_times));
  GradedSymbol B = xi_project(power(L, static_cast<unsigned>(n)), XiPart::NonNegative);
  return sub(partial_t(L, n), poisson(B, L));
}

DkpSeed seed_from_orlov_schulman(const GradedSymbol& M_target) {
  const auto& p = M_target.policy();
  const char* op = "seed_from_orlov_schulman";
  GradedSymbol a = xi_coefficient(M_target, -1);
  for (const auto& t : a.terms())
    if (!(t.m == mono(0, 0)))
      throw Error(ErrorCode::AlphaNotConstant, kModule, op,
                  "ξ⁻¹ coefficient of the target contains " + format_monomial(t.m));
  Rational alpha0 = a.coefficient(mono(0, 0));
  GradedSymbol alpha = constant(alpha0, p);
  GradedSymbol x = monomial_symbol(mono(0, 0, 1), p);
  GradedSymbol X = make_symbol(std::span<const Term>{}, p);
  for (int k = 1; k <= -p.xi_min; ++k) {
    GradedSymbol M = classical_dressing_conjugate(X, alpha, false, x);
    GradedSymbol chi = xi_coefficient(sub(M_target, M), -k - 1);
    if (k == -p.xi_min || chi.xi_trust(0) == kPosInf || chi.trust().t < 0) return {limit_xi_trust(X, 1 - k), alpha0};
    X = add(X, scale(mul_xi_power(chi, -k), Rational(-1, k)));
  }
  return {X, alpha0};
}

DkpSeed extend_seed_in_time(const GradedSymbol& f0, const GradedSymbol& g0, const DkpSeed& seed) {
  const auto& p = seed.X0.policy();
  GradedSymbol alpha = constant(seed.alpha0, p);
  GradedSymbol X = seed.X0;
  for (int d = 1; d <= p.t_total_max; ++d) {
    GradedSymbol P = classical_dressing_conjugate(X, alpha, true, f0);
    GradedSymbol Q = classical_dressing_conjugate(X, alpha, true, g0);
    GradedSymbol Y = integrate_correction(t_degree_part(P, 0), t_degree_part(Q, 0), t_degree_part(P, d),
                                          t_degree_part(Q, d));
    if (!is_zero_within_trust(log_coefficient(Y)))
      throw Error(ErrorCode::AlphaNotConstant, kModule, "extend_seed_in_time",
                  "t-degree " + std::to_string(d) + " needs a time-dependent α");
    GradedSymbol Xd = ch_invert(0, sub(Y, mul(log_coefficient(Y), monomial_symbol(mono(0, 0, 0, 1), p))),
                                seed.X0);
    X = add(X, t_degree_part(Xd, d));
  }
  return {X, seed.alpha0};
}

}  // namespace hbarkp
