#ifndef HBARKP_DKP_HPP
#define HBARKP_DKP_HPP

#include <utility>

#include "hbarkp/symbol.hpp"

namespace hbarkp {

struct DkpSeed {
  GradedSymbol X0;  // ℏ-free, ξ-degrees ≤ −1
  Rational alpha0;
};

struct DkpDressing {
  GradedSymbol L;
  GradedSymbol M;
};

/// 𝓛 = exp(ad X₀) ξ, 𝓜 = exp(ad X₀) exp(ad α₀ log ξ) exp(ad ζ) x with
/// Poisson brackets.
DkpDressing dkp_dress(const DkpSeed& seed, bool t_on);

/// f0(M, L) by commutative substitution x ↦ M, ξ ↦ L. f0 must be ℏ-free and
/// polynomial in x; negative powers of ξ use L⁻¹.
GradedSymbol classical_substitute(const GradedSymbol& f0, const GradedSymbol& L, const GradedSymbol& M);

/// ξ-negative parts of f0(M, L) and g0(M, L). Throws NotCanonical unless
/// {f0, g0} = 1.
std::pair<GradedSymbol, GradedSymbol> dkp_rh_residual(const GradedSymbol& f0, const GradedSymbol& g0,
                                                      const GradedSymbol& L, const GradedSymbol& M);

/// ∂L/∂t_n − {B_n, L}, B_n = (Lⁿ)_{≥0}.
GradedSymbol dkp_lax_residual(const GradedSymbol& L, int n);

/// Undresses a t-independent seed from a target 𝓜 = x + α₀ξ⁻¹ + O(ξ⁻²) by
/// matching ξ^{−k−1} coefficients one k at a time.
DkpSeed seed_from_orlov_schulman(const GradedSymbol& M_target);

/// Extends a t-independent admissible seed to t-degrees 1..t_total_max so that
/// the dispersionless residual stays zero with the times switched on.
DkpSeed extend_seed_in_time(const GradedSymbol& f0, const GradedSymbol& g0, const DkpSeed& seed);

}  // namespace hbarkp

#endif  // HBARKP_DKP_HPP
