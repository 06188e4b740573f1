#ifndef HBARKP_CALCULUS_HPP
#define HBARKP_CALCULUS_HPP

#include <cstdint>

#include "hbarkp/symbol.hpp"

namespace hbarkp {

/// Composition of total symbols: a∘b = Σ_n ℏⁿ/n! ∂ξⁿa ∂xⁿb.
GradedSymbol star_mul(const GradedSymbol& a, const GradedSymbol& b);
GradedSymbol star_pow(const GradedSymbol& a, unsigned n);
/// a∘b − b∘a.
GradedSymbol star_commutator(const GradedSymbol& a, const GradedSymbol& b);
/// (1/ℏ)(a∘b − b∘a), computed without dividing by ℏ. One factor may carry
/// log ξ.
GradedSymbol hbar_bracket(const GradedSymbol& a, const GradedSymbol& b);
/// {a,b} = ∂ξa ∂x b − ∂x a ∂ξ b.
GradedSymbol poisson(const GradedSymbol& a, const GradedSymbol& b);

/// max(−h) over the terms; kNegInf for the zero symbol.
std::int64_t hbar_order(const GradedSymbol& a);
GradedSymbol principal_symbol(const GradedSymbol& a);

enum class GeneratorKind { NegOrderX, AlphaLog, ZetaTimes };

/// Exponent A of a conjugation Ad(e^{A/ℏ}). Use the factories; they check
/// the shape that makes the conjugation series terminate.
struct ExpGenerator {
  GeneratorKind kind;
  GradedSymbol body;

  /// X with ξ-degrees ≤ −1, no log ξ, no negative ℏ-powers.
  static ExpGenerator neg_order(const GradedSymbol& X);
  /// α log ξ for an ℏ-series constant α (no ξ, x, t).
  static ExpGenerator alpha_log(const GradedSymbol& alpha);
  static ExpGenerator alpha_log(const Rational& alpha, const TruncationPolicy& policy);
  /// ζ(t, ξ) = Σ t_n ξⁿ.
  static ExpGenerator zeta(const TruncationPolicy& policy);
};

/// Ad(e^{A/ℏ}) b = Σ_k (1/k!) ((1/ℏ) ad A)^k b.
GradedSymbol ad_exp(const ExpGenerator& g, const GradedSymbol& b);
/// exp(ad_{ {,} } A) b = Σ_k (1/k!) {A, ·}^k b, the classical limit.
GradedSymbol poisson_ad_exp(const ExpGenerator& g, const GradedSymbol& b);

/// Ad(e^{X/ℏ}) Ad((ℏ∂)^{α/ℏ}) Ad(e^{ζ/ℏ}) b, ζ innermost; ζ is skipped when
/// t_on is false.
GradedSymbol dressing_conjugate(const GradedSymbol& X, const GradedSymbol& alpha, bool t_on,
                                const GradedSymbol& b);
/// Classical counterpart with Poisson brackets (X, α taken as given).
GradedSymbol classical_dressing_conjugate(const GradedSymbol& X, const GradedSymbol& alpha,
                                          bool t_on, const GradedSymbol& b);

}  // namespace hbarkp

#endif  // HBARKP_CALCULUS_HPP
