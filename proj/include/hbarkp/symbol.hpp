#ifndef HBARKP_SYMBOL_HPP
#define HBARKP_SYMBOL_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hbarkp/monomial.hpp"
#include "hbarkp/policy.hpp"
#include "hbarkp/rational.hpp"

namespace hbarkp {

struct Term {
  Monomial m;
  Rational c;
};

/// Sparse truncated series in ℏ, ξ (Laurent, with an optional linear log ξ),
/// x and t_1..t_T with exact rational coefficients. Immutable once built;
/// terms are kept in canonical order with no zero coefficients.
class GradedSymbol {
 public:
  explicit GradedSymbol(const TruncationPolicy& policy);

  const TruncationPolicy& policy() const noexcept { return policy_; }
  std::span<const Term> terms() const noexcept { return terms_; }
  const TrustRecord& trust() const noexcept { return trust_; }

  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }
  bool has_log() const noexcept;
  bool is_hbar_free() const noexcept;

  /// Highest ξ-degree stored at grade h (kNegInf when the grade is empty).
  std::int64_t top_xi(int h) const noexcept;
  /// Highest ξ-degree over all grades (kNegInf for the zero symbol).
  std::int64_t top_xi() const noexcept;
  /// Smallest / largest stored ℏ-exponent; only meaningful when nonzero.
  int min_h() const noexcept;
  int max_h() const noexcept;
  int max_x() const noexcept;

  /// Lowest exact ξ-degree at grade h (kNegInf below the window, `beyond`
  /// above it).
  std::int64_t xi_trust(int h) const noexcept;
  /// Largest H such that every grade up to H carries some trusted degree.
  int hbar_trust() const noexcept;
  /// Whether the coefficient of m is guaranteed exact.
  bool trusted(const Monomial& m) const noexcept;

  Rational coefficient(const Monomial& m) const;

  /// Structural equality on policy and terms; trust is not compared.
  friend bool operator==(const GradedSymbol& a, const GradedSymbol& b);

 private:
  friend class SymbolBuilder;
  TruncationPolicy policy_;
  std::vector<Term> terms_;
  TrustRecord trust_;
};

/// Accumulates monomials, enforces the window and records what truncation
/// cost. Every operation that builds a symbol goes through here.
class SymbolBuilder {
 public:
  explicit SymbolBuilder(const TruncationPolicy& policy);

  void add(const Monomial& m, const Rational& c);
  /// Adds c1*c2 at m without a temporary on the caller side.
  void add_product(const Monomial& m, const Rational& c1, const Rational& c2);
  /// Records that product terms above hbar_max of ξ-degree at most `top`
  /// were skipped by the caller.
  void note_dropped_above(std::int64_t top) noexcept {
    dropped_above_ = std::max(dropped_above_, top == kPosInf ? kPosInf : top + 1);
  }

  /// `bound` is the trust implied by the operands; drops observed while
  /// accumulating tighten it further.
  GradedSymbol finish(TrustRecord bound) &&;

 private:
  bool admit(const Monomial& m);
  TruncationPolicy policy_;
  std::unordered_map<Monomial, Rational, MonomialHash> acc_;
  std::vector<std::int64_t> dropped_below_;  // per grade: some ξ < xi_min was dropped
  std::int64_t dropped_above_ = kNegInf;
  bool dropped_t_ = false;
};

/// Product kinds understood by `combine_trust`. For an n-th order term the
/// output sits at grade h_a + h_b + n - shift and n ξ-degrees lower.
struct ProductShape {
  int n_min = 0;
  int n_max = 0;  // < 0 means unbounded
  int shift = 0;
};
inline constexpr ProductShape kCommutativeShape{0, 0, 0};
inline constexpr ProductShape kStarShape{0, -1, 0};
inline constexpr ProductShape kBracketShape{1, -1, 1};  // (1/ℏ)[a,b]
inline constexpr ProductShape kPoissonShape{1, 1, 1};
/// Trust of a∘b: like kStarShape but uses that ∂xⁿ b vanishes exactly once n
/// exceeds the x-degree of an exact grade of b.
TrustRecord star_trust(const GradedSymbol& a, const GradedSymbol& b, const TruncationPolicy& out);

TrustRecord combine_trust(const GradedSymbol& a, const GradedSymbol& b, ProductShape shape,
                          const TruncationPolicy& out);
TrustRecord sum_trust(const GradedSymbol& a, const GradedSymbol& b);

// ---------------------------------------------------------------------------
// Construction and ring operations.

/// Canonical symbol from raw entries: duplicates merged, zeros dropped, full
/// trust. Throws MonomialOutOfWindow if an entry violates the policy.
GradedSymbol make_symbol(std::span<const Term> entries, const TruncationPolicy& policy);
GradedSymbol make_symbol(std::initializer_list<Term> entries, const TruncationPolicy& policy);
GradedSymbol constant(const Rational& c, const TruncationPolicy& policy);
/// ζ(t,ξ) = Σ_n t_n ξ^n, n = 1..T.
GradedSymbol zeta_symbol(const TruncationPolicy& policy);

GradedSymbol add(const GradedSymbol& a, const GradedSymbol& b);
GradedSymbol sub(const GradedSymbol& a, const GradedSymbol& b);
GradedSymbol neg(const GradedSymbol& a);
GradedSymbol scale(const GradedSymbol& a, const Rational& c);
/// Commutative product. Throws LogLogProduct when both factors carry log ξ.
GradedSymbol mul(const GradedSymbol& a, const GradedSymbol& b);
GradedSymbol power(const GradedSymbol& a, unsigned n);
/// Multiplies by ℏ^k (k may be negative for relaxed policies).
GradedSymbol mul_hbar_power(const GradedSymbol& a, int k);

inline GradedSymbol operator+(const GradedSymbol& a, const GradedSymbol& b) { return add(a, b); }
inline GradedSymbol operator-(const GradedSymbol& a, const GradedSymbol& b) { return sub(a, b); }
inline GradedSymbol operator-(const GradedSymbol& a) { return neg(a); }
inline GradedSymbol operator*(const GradedSymbol& a, const GradedSymbol& b) { return mul(a, b); }
inline GradedSymbol operator*(const Rational& c, const GradedSymbol& a) { return scale(a, c); }

// ---------------------------------------------------------------------------
// Calculus and projections.

enum class Var { X, Xi, T };

/// ∂/∂x, ∂/∂ξ (∂ξ log ξ = ξ⁻¹) or ∂/∂t_j (j is 1-based).
GradedSymbol partial(const GradedSymbol& a, Var var, int j = 0);
GradedSymbol partial_x(const GradedSymbol& a);
GradedSymbol partial_xi(const GradedSymbol& a);
GradedSymbol partial_t(const GradedSymbol& a, int j);
GradedSymbol partial_x_n(const GradedSymbol& a, int n);
GradedSymbol partial_xi_n(const GradedSymbol& a, int n);

/// Antiderivative in ξ with no ξ⁰ constant; ξ⁻¹ integrates to log ξ.
GradedSymbol xi_antiderivative(const GradedSymbol& a);

/// Coefficient of ℏ^n as an ℏ-free symbol.
GradedSymbol hbar_component(const GradedSymbol& a, int n);

enum class XiPart { NonNegative, Negative };
GradedSymbol xi_project(const GradedSymbol& a, XiPart part);

/// Homogeneous part of total t-degree d.
GradedSymbol t_degree_part(const GradedSymbol& a, int d);
/// Coefficient of ξ^k (log-free part) as a symbol with ξ-degree 0.
GradedSymbol xi_coefficient(const GradedSymbol& a, int k);
/// Multiplies every term by ξ^k.
GradedSymbol mul_xi_power(const GradedSymbol& a, int k);
/// Sets x = 0.
GradedSymbol at_x_zero(const GradedSymbol& a);
/// Part of a carrying log ξ, with the log removed.
GradedSymbol log_coefficient(const GradedSymbol& a);

/// Re-embeds a symbol in another window. Monomials outside it are dropped
/// (with the usual trust accounting); newly exposed ℏ-grades inherit
/// `trust().beyond`.
GradedSymbol with_policy(const GradedSymbol& a, const TruncationPolicy& policy);

/// Declares ξ-degrees below tau untrusted at every grade (trust only shrinks).
GradedSymbol limit_xi_trust(const GradedSymbol& a, std::int64_t tau);
/// The same at grade h only.
GradedSymbol limit_xi_trust(const GradedSymbol& a, std::int64_t tau, int h);
/// Declares t-degrees above d untrusted.
GradedSymbol limit_t_trust(const GradedSymbol& a, std::int64_t d);

/// Sets t_j = 0 for j > T and drops those times from the policy.
GradedSymbol restrict_times(const GradedSymbol& a, int T);

/// Keeps only the terms whose coefficients are trusted.
GradedSymbol trusted_part(const GradedSymbol& a);
/// True when every trusted coefficient of a is zero.
bool is_zero_within_trust(const GradedSymbol& a);
/// Number of (grade, ξ-degree) cells actually certified by a trust window,
/// restricted to ξ-degrees ≥ policy.xi_min and ≤ `xi_cap`.
std::int64_t trusted_cells(const GradedSymbol& a, int xi_cap);

std::string format_monomial(const Monomial& m);
/// Human-readable sum, e.g. "x*xi^-1 - 1/2*h*xi^-3".
std::string to_string(const GradedSymbol& a);

// ---------------------------------------------------------------------------
// Commutative series functions (log ξ-free arguments).

/// a^p for a = c ξ^D (1 + lower terms): c is a rational constant at ℏ⁰ and
/// every other term has ξ-degree < D. D·p must be an integer and c must admit
/// a rational p-th power (p integral, or c = 1).
GradedSymbol laurent_power(const GradedSymbol& a, const Rational& p);
GradedSymbol laurent_inverse(const GradedSymbol& a);
/// log(1 + r) and exp(r) - 1 for r with ξ-degrees ≤ -1.
GradedSymbol log1p_series(const GradedSymbol& r);
GradedSymbol expm1_series(const GradedSymbol& r);

}  // namespace hbarkp

#endif  // HBARKP_SYMBOL_HPP
