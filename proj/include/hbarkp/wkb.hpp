#ifndef HBARKP_WKB_HPP
#define HBARKP_WKB_HPP

#include <vector>

#include "hbarkp/rh.hpp"
#include "hbarkp/symbol.hpp"

namespace hbarkp {

/// S_0 .. S_N, each ℏ-free, log-free and of ξ-degree ≤ −1.
struct WkbPhase {
  std::vector<GradedSymbol> S;
};

/// X's window with room for every x-degree ℏ log σ(e^{X/ℏ}) can reach
/// (x_max · |xi_min|), so the phase is never cut off in x.
TruncationPolicy phase_policy(const GradedSymbol& X);

/// The window of `p` with negative ℏ powers allowed. Terms of e^{X/ℏ} have
/// ℏ-exponent ≥ ξ-degree ≥ xi_min, products of two such terms stay above
/// 2·xi_min, and the upper extension keeps the logarithm exact through
/// ℏ^{hbar_max}.
TruncationPolicy exponential_policy(const TruncationPolicy& p);

/// Total symbol of exp(X/ℏ) = Σ_k (X/ℏ)^{∘k}/k! in
/// exponential_policy(phase_policy(X)).
/// X must be log-free with ξ-degrees ≤ −1 and no negative ℏ powers.
GradedSymbol star_exp_total(const GradedSymbol& X);

/// S = ℏ log σ(e^{X/ℏ}), split into ℏ-grades 0..hbar_max, in
/// phase_policy(X). Throws
/// RegularityViolation if a certified negative ℏ power survives.
WkbPhase x_to_s(const GradedSymbol& X);

/// Σ_n ℏⁿ S_n.
GradedSymbol phase_symbol(const WkbPhase& phase);

/// Inverse of x_to_s, grade by grade.
GradedSymbol s_to_x(const WkbPhase& phase);

/// Ψ = z^{α/ℏ} exp(Ŝ(t; z)/ℏ + ζ(t, z)/ℏ) with x absorbed into t₁.
struct WaveData {
  WkbPhase phase;  // Ŝ_n, ξ standing for z
  std::vector<Rational> alpha;
  GradedSymbol zeta;
};
WaveData wave_function(const DressingData& data, bool t_on);

/// L∘σ(e^{X/ℏ}) − σ(e^{X/ℏ})·ξ, i.e. LΨ = zΨ written on symbols.
GradedSymbol wave_linear_residual(const GradedSymbol& L, const GradedSymbol& X);

}  // namespace hbarkp

#endif  // HBARKP_WKB_HPP
