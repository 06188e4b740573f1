#include "hbarkp/calculus.hpp"

#include <algorithm>
#include <string>

#include "hbarkp/error.hpp"

namespace hbarkp {

namespace {

constexpr const char* kModule = "symbol-calculus";

Rational falling(int k, int n) {
  Rational r = 1;
  for (int i = 0; i < n; ++i) r *= k - i;
  return r;
}

/// ∂ξⁿ of ξ^k (log ξ)^l = log_c ξ^{k-n} log ξ + plain_c ξ^{k-n}.
struct XiDerivative {
  Rational log_c;
  Rational plain_c;
};

XiDerivative xi_derivative(const Monomial& m, int n) {
  if (m.logxi == 0) return {0, falling(m.xi, n)};
  Rational plain = 0;
  for (int j = 1; j <= n; ++j) {
    Rational d = factorial(static_cast<unsigned>(j - 1));
    if (j % 2 == 0) d = -d;
    plain += binomial(n, j) * falling(m.xi, n - j) * d;
  }
  return {falling(m.xi, n), plain};
}

/// Adds sign · Σ_{n_min ≤ n ≤ n_max} ℏ^{n−shift}/n! ∂ξⁿa ∂xⁿb to `out`.
void accumulate(SymbolBuilder& out, const GradedSymbol& a, const GradedSymbol& b, int n_min,
                int n_max, int shift, int sign, const char* op) {
  const int hbar_max = a.policy().hbar_max;
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      int top = n_max >= 0 ? std::min(n_max, tb.m.x) : tb.m.x;
      for (int n = n_min; n <= top; ++n) {
        XiDerivative d = xi_derivative(ta.m, n);
        if (sgn(d.log_c) == 0 && sgn(d.plain_c) == 0) continue;
        int H = ta.m.h + tb.m.h + n - shift;
        if (H > hbar_max) {
          out.note_dropped_above(std::int64_t{ta.m.xi} + tb.m.xi - n);
          break;
        }
        Rational common = ta.c * tb.c * binomial(tb.m.x, n);
        if (sign < 0) common = -common;
        Monomial m;
        m.h = H;
        m.xi = ta.m.xi + tb.m.xi - n;
        m.x = ta.m.x + tb.m.x - n;
        for (int j = 0; j < kMaxTimes; ++j)
          m.t[j] = static_cast<std::uint8_t>(ta.m.t[j] + tb.m.t[j]);
        if (sgn(d.log_c) != 0) {
          if (tb.m.logxi != 0)
            throw Error(ErrorCode::LogLogProduct, kModule, op, "both factors carry log ξ");
          m.logxi = 1;
          out.add_product(m, common, d.log_c);
        }
        if (sgn(d.plain_c) != 0) {
          m.logxi = tb.m.logxi;
          out.add_product(m, common, d.plain_c);
        }
      }
    }
  }
}

void require_same_policy(const GradedSymbol& a, const GradedSymbol& b, const char* op) {
  if (!(a.policy() == b.policy()))
    throw Error(ErrorCode::PolicyMismatch, kModule, op, "operands use different truncation windows");
}

}  // namespace

GradedSymbol star_mul(const GradedSymbol& a, const GradedSymbol& b) {
  require_same_policy(a, b, "star_mul");
  SymbolBuilder out(a.policy());
  accumulate(out, a, b, 0, -1, 0, 1, "star_mul");
  return std::move(out).finish(star_trust(a, b, a.policy()));
}

GradedSymbol star_pow(const GradedSymbol& a, unsigned n) {
  GradedSymbol r = constant(1, a.policy());
  for (unsigned i = 0; i < n; ++i) r = star_mul(r, a);
  return r;
}

GradedSymbol star_commutator(const GradedSymbol& a, const GradedSymbol& b) {
  require_same_policy(a, b, "star_commutator");
  SymbolBuilder out(a.policy());
  accumulate(out, a, b, 1, -1, 0, 1, "star_commutator");
  accumulate(out, b, a, 1, -1, 0, -1, "star_commutator");
  return std::move(out).finish(combine_trust(a, b, ProductShape{1, -1, 0}, a.policy()));
}

GradedSymbol hbar_bracket(const GradedSymbol& a, const GradedSymbol& b) {
  require_same_policy(a, b, "hbar_bracket");
  SymbolBuilder out(a.policy());
  accumulate(out, a, b, 1, -1, 1, 1, "hbar_bracket");
  accumulate(out, b, a, 1, -1, 1, -1, "hbar_bracket");
  return std::move(out).finish(combine_trust(a, b, kBracketShape, a.policy()));
}

GradedSymbol poisson(const GradedSymbol& a, const GradedSymbol& b) {
  require_same_policy(a, b, "poisson");
  SymbolBuilder out(a.policy());
  accumulate(out, a, b, 1, 1, 1, 1, "poisson");
  accumulate(out, b, a, 1, 1, 1, -1, "poisson");
  return std::move(out).finish(combine_trust(a, b, kPoissonShape, a.policy()));
}

std::int64_t hbar_order(const GradedSymbol& a) {
  if (a.is_zero()) return kNegInf;
  return -a.min_h();
}

GradedSymbol principal_symbol(const GradedSymbol& a) {
  if (a.is_zero()) return a;
  return hbar_component(a, a.min_h());
}

// ---------------------------------------------------------------------------

ExpGenerator ExpGenerator::neg_order(const GradedSymbol& X) {
  for (const auto& t : X.terms())
    if (t.m.xi > -1 || t.m.logxi != 0 || t.m.h < 0)
      throw Error(ErrorCode::InvalidGenerator, kModule, "neg_order",
                  "term " + format_monomial(t.m) + " is not of negative order");
  return {GeneratorKind::NegOrderX, X};
}

ExpGenerator ExpGenerator::alpha_log(const GradedSymbol& alpha) {
  SymbolBuilder b(alpha.policy());
  for (const auto& t : alpha.terms()) {
    if (t.m.xi != 0 || t.m.logxi != 0 || t.m.x != 0 || t.m.t_degree() != 0 || t.m.h < 0)
      throw Error(ErrorCode::InvalidGenerator, kModule, "alpha_log",
                  "α must be an ℏ-series constant, got term " + format_monomial(t.m));
    Monomial m = t.m;
    m.logxi = 1;
    b.add(m, t.c);
  }
  return {GeneratorKind::AlphaLog, std::move(b).finish(alpha.trust())};
}

ExpGenerator ExpGenerator::alpha_log(const Rational& alpha, const TruncationPolicy& policy) {
  return alpha_log(constant(alpha, policy));
}

ExpGenerator ExpGenerator::zeta(const TruncationPolicy& policy) {
  return {GeneratorKind::ZetaTimes, zeta_symbol(policy)};
}

namespace {

GradedSymbol conjugation_series(const ExpGenerator& g, const GradedSymbol& b, bool quantum,
                                const char* op) {
  require_same_policy(g.body, b, op);
  if (g.body.is_zero() || b.is_zero()) return b;
  int cap;
  if (g.kind == GeneratorKind::NegOrderX) {
    std::int64_t top = std::max<std::int64_t>(b.top_xi(), 0);
    cap = static_cast<int>((top - b.policy().xi_min) / 2) + 3;
  } else {
    cap = b.policy().x_max + 3;
  }
  GradedSymbol sum = b;
  GradedSymbol term = b;
  for (int k = 1; k <= cap; ++k) {
    GradedSymbol next = quantum ? hbar_bracket(g.body, term) : poisson(g.body, term);
    term = scale(next, Rational(1, k));
    sum = add(sum, term);
    if (term.is_zero()) return sum;
  }
  throw Error(ErrorCode::NonTerminatingConjugation, kModule, op,
              "conjugation series did not terminate after " + std::to_string(cap) + " brackets");
}

GradedSymbol staged(const GradedSymbol& X, const GradedSymbol& alpha, bool t_on,
                    const GradedSymbol& b, bool quantum) {
  const char* op = quantum ? "dressing_conjugate" : "classical_dressing_conjugate";
  GradedSymbol c = b;
  if (t_on) c = conjugation_series(ExpGenerator::zeta(b.policy()), c, quantum, op);
  if (!alpha.is_zero()) c = conjugation_series(ExpGenerator::alpha_log(alpha), c, quantum, op);
  if (!X.is_zero()) c = conjugation_series(ExpGenerator::neg_order(X), c, quantum, op);
  return c;
}

}  // namespace

GradedSymbol ad_exp(const ExpGenerator& g, const GradedSymbol& b) {
  return conjugation_series(g, b, true, "ad_exp");
}

GradedSymbol poisson_ad_exp(const ExpGenerator& g, const GradedSymbol& b) {
  return conjugation_series(g, b, false, "poisson_ad_exp");
}

GradedSymbol dressing_conjugate(const GradedSymbol& X, const GradedSymbol& alpha, bool t_on,
                                const GradedSymbol& b) {
  return staged(X, alpha, t_on, b, true);
}

GradedSymbol classical_dressing_conjugate(const GradedSymbol& X, const GradedSymbol& alpha,
                                          bool t_on, const GradedSymbol& b) {
  return staged(X, alpha, t_on, b, false);
}

}  // namespace hbarkp
