#ifndef HBARKP_RH_HPP
#define HBARKP_RH_HPP

#include <utility>
#include <vector>

#include "hbarkp/symbol.hpp"

namespace hbarkp {

/// Canonical pair (f, g) with [f, g] = ℏ, dispersionless seed and target depth.
struct RHProblem {
  GradedSymbol f;
  GradedSymbol g;
  GradedSymbol X0;
  Rational alpha0;
  int N = 0;
  bool t_on = true;
};

struct DressingData {
  std::vector<GradedSymbol> X;  // X_0 .. X_N, each ℏ-free
  std::vector<Rational> alpha;  // α_0 .. α_N
  /// residual_ok[i][k]: grade k of the ξ-negative parts of f(M,L), g(M,L)
  /// vanishes within trust once X_0..X_i are in place (k ≤ i).
  std::vector<std::vector<bool>> residual_ok;
};

/// B_0 .. B_n by the standard recurrence (B_1 = −1/2).
std::vector<Rational> bernoulli_numbers(int n);

/// Σ_{n ≤ upto} ℏⁿ X_n and Σ_{n ≤ upto} ℏⁿ α_n.
GradedSymbol assemble_X(const std::vector<GradedSymbol>& X, int upto);
GradedSymbol assemble_alpha(const std::vector<Rational>& alpha, int upto, const TruncationPolicy& policy);

/// (P, Q) = Ad(e^{X/ℏ}(ℏ∂)^{α/ℏ}e^{ζ/ℏ}) (f, g) with X, α summed through
/// order i−1.
std::pair<GradedSymbol, GradedSymbol> conjugate_step(const RHProblem& problem,
                                                     const DressingData& partial, int i);

/// Checks grades k < i of the ξ-negative parts of P and Q vanish within trust;
/// throws InductionHypothesisViolated with the first bad grade otherwise.
void check_induction(const GradedSymbol& P, const GradedSymbol& Q, int i);

/// ∫^ξ (∂ξQ₀·P_i − ∂ξP₀·Q_i)_{≤−1} dξ for ℏ-free inputs; the ξ⁻¹ part
/// becomes log ξ.
GradedSymbol integrate_correction(const GradedSymbol& P0, const GradedSymbol& Q0,
                                  const GradedSymbol& Pi, const GradedSymbol& Qi);

struct Extraction {
  Rational alpha;
  GradedSymbol Xtilde;  // log-free
};

/// Step 2 at order i: verifies the induction hypothesis, integrates and splits
/// off α_i, which must be a constant.
Extraction extract_and_integrate(const GradedSymbol& P, const GradedSymbol& Q, int i);

/// Step 3: inverts Y ↦ Σ_{n≥1} (ad X₀)^{n−1}/n! Y (Poisson brackets) after
/// removing the log ξ contribution of α.
GradedSymbol ch_invert(const Rational& alpha, const GradedSymbol& Xtilde, const GradedSymbol& X0);

/// Forward map Y ↦ Σ_{n≥1} (ad X₀)^{n−1}/n! Y.
GradedSymbol ch_forward(const GradedSymbol& Y, const GradedSymbol& X0);

/// Checks [f, g] = ℏ and the dispersionless residual of the seed, then runs
/// Steps 1–4 for i = 1..N.
DressingData solve(const RHProblem& problem);

struct LaxPair {
  GradedSymbol L;
  GradedSymbol M;
};
LaxPair build_lax(const DressingData& data, bool t_on, const TruncationPolicy& policy);

/// ξ-negative parts of f(M, L) and g(M, L).
std::pair<GradedSymbol, GradedSymbol> residual_rh(const RHProblem& problem, const DressingData& data);
/// ℏ ∂L/∂t_n − [B_n, L], B_n = (L^{∘n})_{≥0}.
GradedSymbol residual_lax(const GradedSymbol& L, int n);
/// [L, M] − ℏ.
GradedSymbol residual_ccr(const GradedSymbol& L, const GradedSymbol& M);

/// Grades 0..max_grade of a residual that vanish within trust.
std::vector<bool> vanishing_grades(const GradedSymbol& r, int max_grade);

}  // namespace hbarkp

#endif  // HBARKP_RH_HPP
