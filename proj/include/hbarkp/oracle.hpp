#ifndef HBARKP_ORACLE_HPP
#define HBARKP_ORACLE_HPP

#include <array>
#include <map>

#include "hbarkp/symbol.hpp"

/// Brute-force reference computations. Nothing here reuses the symbol
/// calculus: operators are applied literally to p(x, z) e^{xz/ℏ}, where ℏ∂
/// acts as z + ℏ d/dx and (ℏ∂)⁻¹ as Σ_j (−ℏ)^j z^{−j−1} (d/dx)^j, and the
/// result is read back as a symbol with z in place of ξ.
namespace hbarkp::oracle {

/// Exponent key: ℏ, z, x, t_1..t_8.
using Key = std::array<int, 3 + kMaxTimes>;
using Poly = std::map<Key, Rational>;

struct Window {
  int h_min = 0;
  int h_max = 0;
  int z_min = 0;
};

Poly from_symbol(const GradedSymbol& a);
/// Keeps the monomials that fit `policy`; everything else is discarded.
GradedSymbol to_symbol(const Poly& p, const TruncationPolicy& policy);

Poly add(const Poly& a, const Poly& b, const Rational& scale_b = 1);
/// Applies the operator with normal-ordered symbol `op` to p e^{xz/ℏ}.
Poly apply(const Poly& op, const Poly& p, const Window& w);
/// Symbol of the composition a∘b.
Poly compose(const Poly& a, const Poly& b, const Window& w);
/// Divides by ℏ; throws if a term would drop below ℏ^h_floor.
Poly divide_by_hbar(const Poly& p, int h_floor = 0);

/// a∘b within a's policy.
GradedSymbol star(const GradedSymbol& a, const GradedSymbol& b);
/// Σ_{k ≤ brackets} (1/k!) ((1/ℏ)[A, ·])^k b with every commutator computed
/// by composition and divided by ℏ explicitly.
GradedSymbol conjugate_by_commutators(const GradedSymbol& A, const GradedSymbol& b, int brackets);
/// Replaces every normal-ordered x^a ξ^k in b by x_image^{∘a} ∘ ξ^k. This is
/// how a conjugation that fixes ξ and sends x to x_image acts.
GradedSymbol substitute_x(const GradedSymbol& b, const GradedSymbol& x_image);

/// σ(e^{X/ℏ}) by applying Σ_k (X/ℏ)^k/k! to e^{xz/ℏ}, read back in
/// `exp_policy` (which must allow negative ℏ powers).
GradedSymbol star_exp(const GradedSymbol& X, const TruncationPolicy& exp_policy);
/// ℏ log σ(e^{X/ℏ}) by the commutative logarithm series, in X's policy plus
/// whatever negative ℏ powers survive (exp_policy.hbar_min and up).
GradedSymbol phase(const GradedSymbol& X, const TruncationPolicy& exp_policy);

}  // namespace hbarkp::oracle

#endif  // HBARKP_ORACLE_HPP
