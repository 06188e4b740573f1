#ifndef HBARKP_TAU_HPP
#define HBARKP_TAU_HPP

#include <vector>

#include "hbarkp/symbol.hpp"
#include "hbarkp/wkb.hpp"

namespace hbarkp {

/// v[n][k−1] = v_{n,k} = −k · [z^{−k}] S_n for the k whose coefficient is
/// certified; polynomials in t stored as ξ- and ℏ-free symbols.
struct VTable {
  std::vector<std::vector<GradedSymbol>> v;
};
VTable v_coefficients(const WkbPhase& phase);

/// ∂F_n/∂t_j = v_{n,j} + Σ_{k+l=j} (1/l) ∂v_{n−1,l}/∂t_k.
GradedSymbol gradient_F(const VTable& v, int n, int j);

/// log τ = Σ ℏ^{n−2} F_n(t) with F_n(0) = 0.
struct TauExpansion {
  std::vector<GradedSymbol> F;
};

/// Checks the cross derivatives of gradient_F(n, ·) agree within trust and
/// returns the unique F_n with that gradient and F_n(0) = 0.
GradedSymbol integrate_F(const VTable& v, int n);
TauExpansion tau_expansion(const WkbPhase& phase);

/// p(t₁ − ℏz⁻¹, t₂ − ℏz⁻²/2, …) with ξ standing for z, in p's window widened
/// to hold ℏ^{t_total_max}. ξ-degrees below xi_min are cut off.
GradedSymbol miwa_shift(const GradedSymbol& p);

/// −Σ_j z^{−j−1} ∂p/∂t_j.
GradedSymbol miwa_derivative(const GradedSymbol& p);

/// residual[g+1] is the coefficient of ℏ^g, g = −1..N−1, of
/// Σ_n ℏ^{n−2}(F_n(t − ℏ[z⁻¹]) − F_n(t)) − ℏ⁻¹Ŝ(t; z); `derivative` holds the
/// same grades of its z-derivative assembled from ∂F_n/∂t_j. Each entry
/// carries the t-degree trust left after the shift.
struct TauWaveReport {
  std::vector<GradedSymbol> residual;
  std::vector<GradedSymbol> derivative;
  bool ok = false;
};
TauWaveReport verify_tau_wave(const TauExpansion& tau, const WaveData& wave);

}  // namespace hbarkp

#endif  // HBARKP_TAU_HPP
