#include "hbarkp/rh.hpp"

#include <string>

#include "hbarkp/calculus.hpp"
#include "hbarkp/dkp.hpp"
#include "hbarkp/error.hpp"

namespace hbarkp {

namespace {

constexpr const char* kModule = "rh-recursion";

GradedSymbol zero(const TruncationPolicy& p) { return make_symbol(std::span<const Term>{}, p); }

GradedSymbol monomial_symbol(const Monomial& m, const TruncationPolicy& p) {
  return make_symbol({Term{m, 1}}, p);
}

bool grade_vanishes(const GradedSymbol& r, int k) {
  std::int64_t tau = r.xi_trust(k);
  if (tau == kPosInf || tau > -1 || r.trust().t < 0) return false;
  for (const auto& t : r.terms())
    if (t.m.h == k && r.trusted(t.m)) return false;
  return true;
}

int bracket_cap(const GradedSymbol& Y) {
  std::int64_t top = std::max<std::int64_t>(Y.top_xi(), 0);
  return static_cast<int>((top - Y.policy().xi_min) / 2) + 3;
}

}  // namespace

std::vector<Rational> bernoulli_numbers(int n) {
  std::vector<Rational> B(static_cast<std::size_t>(n + 1));
  B[0] = 1;
  for (int m = 1; m <= n; ++m) {
    Rational s = 0;
    mpz_class binom = 1;  // C(m+1, k)
    for (int k = 0; k < m; ++k) {
      s += Rational(binom) * B[static_cast<std::size_t>(k)];
      binom = binom * (m + 1 - k) / (k + 1);
    }
    B[static_cast<std::size_t>(m)] = -s / Rational(m + 1);
  }
  return B;
}

GradedSymbol assemble_X(const std::vector<GradedSymbol>& X, int upto) {
  GradedSymbol sum = zero(X.at(0).policy());
  for (int n = 0; n <= upto && n < static_cast<int>(X.size()); ++n)
    sum = add(sum, mul_hbar_power(X[static_cast<std::size_t>(n)], n));
  return sum;
}

GradedSymbol assemble_alpha(const std::vector<Rational>& alpha, int upto, const TruncationPolicy& policy) {
  std::vector<Term> terms;
  for (int n = 0; n <= upto && n < static_cast<int>(alpha.size()) && n <= policy.hbar_max; ++n)
    terms.push_back({mono(n, 0), alpha[static_cast<std::size_t>(n)]});
  return make_symbol(terms, policy);
}

std::pair<GradedSymbol, GradedSymbol> conjugate_step(const RHProblem& problem,
                                                     const DressingData& partial, int i) {
  const auto& p = problem.f.policy();
  GradedSymbol X = assemble_X(partial.X, i - 1);
  GradedSymbol alpha = assemble_alpha(partial.alpha, i - 1, p);
  return {dressing_conjugate(X, alpha, problem.t_on, problem.f),
          dressing_conjugate(X, alpha, problem.t_on, problem.g)};
}

std::vector<bool> vanishing_grades(const GradedSymbol& r, int max_grade) {
  std::vector<bool> ok;
  for (int k = 0; k <= max_grade; ++k) ok.push_back(grade_vanishes(r, k));
  return ok;
}

void check_induction(const GradedSymbol& P, const GradedSymbol& Q, int i) {
  GradedSymbol Pn = xi_project(P, XiPart::Negative);
  GradedSymbol Qn = xi_project(Q, XiPart::Negative);
  for (int k = 0; k < i; ++k) {
    if (Pn.xi_trust(k) > -1 || Qn.xi_trust(k) > -1 || Pn.trust().t < 0 || Qn.trust().t < 0)
      throw Error(ErrorCode::TrustUnderflow, kModule, "extract_and_integrate",
                  "grade " + std::to_string(k) + " of the conjugated pair is not certified", i);
    if (!grade_vanishes(Pn, k) || !grade_vanishes(Qn, k))
      throw Error(ErrorCode::InductionHypothesisViolated, kModule, "extract_and_integrate",
                  "negative part at grade " + std::to_string(k) + " does not vanish", i);
  }
}

GradedSymbol integrate_correction(const GradedSymbol& P0, const GradedSymbol& Q0,
                                  const GradedSymbol& Pi, const GradedSymbol& Qi) {
  GradedSymbol integrand = sub(mul(partial_xi(Q0), Pi), mul(partial_xi(P0), Qi));
  return xi_antiderivative(xi_project(integrand, XiPart::Negative));
}

Extraction extract_and_integrate(const GradedSymbol& P, const GradedSymbol& Q, int i) {
  const char* op = "extract_and_integrate";
  check_induction(P, Q, i);
  GradedSymbol Y = integrate_correction(hbar_component(P, 0), hbar_component(Q, 0), hbar_component(P, i),
                                        hbar_component(Q, i));
  Monomial log_mono = mono(0, 0, 0, 1);
  if (!Y.trusted(log_mono))
    throw Error(ErrorCode::TrustUnderflow, kModule, op, "log ξ coefficient is not certified", i);
  GradedSymbol lc = log_coefficient(Y);
  for (const auto& t : lc.terms())
    if (!(t.m == mono(0, 0)) && lc.trusted(t.m))
      throw Error(ErrorCode::AlphaNotConstant, kModule, op,
                  "log ξ coefficient contains " + format_monomial(t.m), i);
  Rational alpha = lc.coefficient(mono(0, 0));
  GradedSymbol Xtilde = sub(Y, mul(lc, monomial_symbol(log_mono, Y.policy())));
  return {alpha, Xtilde};
}

GradedSymbol ch_forward(const GradedSymbol& Y, const GradedSymbol& X0) {
  GradedSymbol sum = Y;
  GradedSymbol term = Y;
  int cap = bracket_cap(Y);
  for (int n = 2; n <= cap + 1; ++n) {
    term = scale(poisson(X0, term), Rational(1, n));
    sum = add(sum, term);
    if (term.is_zero()) return sum;
  }
  throw Error(ErrorCode::NonTerminatingConjugation, kModule, "ch_forward", "bracket series did not terminate");
}

GradedSymbol ch_invert(const Rational& alpha, const GradedSymbol& Xtilde, const GradedSymbol& X0) {
  const char* op = "ch_invert";
  const auto& p = Xtilde.policy();
  GradedSymbol Xp = Xtilde;
  if (sgn(alpha) != 0) {
    GradedSymbol lg = scale(monomial_symbol(mono(0, 0, 0, 1), p), alpha);
    GradedSymbol moved = X0.is_zero() ? lg : poisson_ad_exp(ExpGenerator::neg_order(X0), lg);
    Xp = sub(Xp, sub(moved, lg));
  }
  for (const auto& t : Xp.terms())
    if (t.m.logxi != 0 && Xp.trusted(t.m))
      throw Error(ErrorCode::ResidualLogTerm, kModule, op, "log ξ survives in " + format_monomial(t.m));
  if (X0.is_zero()) return Xp;
  int cap = bracket_cap(Xp);
  std::vector<Rational> B = bernoulli_numbers(cap + 2);
  GradedSymbol sum = Xp;
  GradedSymbol power = Xp;  // (ad X₀)^n Xp
  for (int n = 1; n <= cap + 1; ++n) {
    power = poisson(X0, power);
    if (power.is_zero()) {
      sum = add(sum, power);
      return sum;
    }
    Rational c = B[static_cast<std::size_t>(n)] / factorial(static_cast<unsigned>(n));
    if (sgn(c) != 0) sum = add(sum, scale(power, c));
  }
  throw Error(ErrorCode::NonTerminatingConjugation, kModule, op, "Bernoulli series did not terminate");
}

DressingData solve(const RHProblem& problem) {
  const auto& p = problem.f.policy();
  GradedSymbol comm = sub(star_commutator(problem.f, problem.g), monomial_symbol(mono(1, 0), p));
  if (!is_zero_within_trust(comm))
    throw Error(ErrorCode::NotCanonical, kModule, "solve", "[f, g] − ℏ = " + to_string(trusted_part(comm)));

  DkpDressing dressed = dkp_dress({problem.X0, problem.alpha0}, problem.t_on);
  auto [rf, rg] = dkp_rh_residual(hbar_component(problem.f, 0), hbar_component(problem.g, 0), dressed.L,
                                  dressed.M);
  if (!grade_vanishes(rf, 0) || !grade_vanishes(rg, 0))
    throw Error(ErrorCode::InductionHypothesisViolated, kModule, "solve",
                "seed does not solve the dispersionless problem", 0);

  DressingData data;
  data.X.push_back(problem.X0);
  data.alpha.push_back(problem.alpha0);
  GradedSymbol X0 = problem.X0;
  for (int i = 1; i <= problem.N + 1; ++i) {
    try {
      auto [P, Q] = conjugate_step(problem, data, i);
      GradedSymbol Pn = xi_project(P, XiPart::Negative);
      GradedSymbol Qn = xi_project(Q, XiPart::Negative);
      std::vector<bool> ok;
      for (int k = 0; k < i; ++k) ok.push_back(grade_vanishes(Pn, k) && grade_vanishes(Qn, k));
      data.residual_ok.push_back(ok);
      if (i > problem.N) break;
      Extraction ext = extract_and_integrate(P, Q, i);
      data.alpha.push_back(ext.alpha);
      data.X.push_back(ch_invert(ext.alpha, ext.Xtilde, X0));
    } catch (const Error& e) {
      throw e.with_grade(i);
    }
  }
  return data;
}

LaxPair build_lax(const DressingData& data, bool t_on, const TruncationPolicy& policy) {
  int N = static_cast<int>(data.X.size()) - 1;
  GradedSymbol X = assemble_X(data.X, N);
  GradedSymbol alpha = assemble_alpha(data.alpha, N, policy);
  GradedSymbol xi = monomial_symbol(mono(0, 1), policy);
  GradedSymbol x = monomial_symbol(mono(0, 0, 1), policy);
  GradedSymbol L = X.is_zero() ? xi : ad_exp(ExpGenerator::neg_order(X), xi);
  return {L, dressing_conjugate(X, alpha, t_on, x)};
}

std::pair<GradedSymbol, GradedSymbol> residual_rh(const RHProblem& problem, const DressingData& data) {
  auto [P, Q] = conjugate_step(problem, data, static_cast<int>(data.X.size()));
  return {xi_project(P, XiPart::Negative), xi_project(Q, XiPart::Negative)};
}

GradedSymbol residual_lax(const GradedSymbol& L, int n) {
  if (n < 1 || n > L.policy().num_times)
    throw Error(ErrorCode::TimeIndexOutOfRange, kModule, "residual_lax",
                "n = " + std::to_string(n) + " with T = " + std::to_string(L.policy().num_times));
  GradedSymbol B = xi_project(star_pow(L, static_cast<unsigned>(n)), XiPart::NonNegative);
  return sub(mul_hbar_power(partial_t(L, n), 1), star_commutator(B, L));
}

GradedSymbol residual_ccr(const GradedSymbol& L, const GradedSymbol& M) {
  return sub(star_commutator(L, M), monomial_symbol(mono(1, 0), L.policy()));
}

}  // namespace hbarkp
