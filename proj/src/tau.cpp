#include "hbarkp/tau.hpp"

#include <string>

#include "hbarkp/error.hpp"

namespace hbarkp {

namespace {

constexpr const char* kModule = "tau";

std::int64_t shift_t(std::int64_t d, int k) { return d == kPosInf || d == kNegInf ? d : d + k; }

GradedSymbol zero(const TruncationPolicy& p) { return make_symbol(std::span<const Term>{}, p); }

void require_polynomial(const GradedSymbol& p, const char* op) {
  for (const auto& t : p.terms())
    if (t.m.h != 0 || t.m.xi != 0 || t.m.x != 0 || t.m.logxi != 0)
      throw Error(ErrorCode::InvalidArgument, kModule, op, "term " + format_monomial(t.m) + " is not a polynomial in t");
}

const GradedSymbol& v_entry(const VTable& v, int n, int k) {
  if (n < 0 || n >= static_cast<int>(v.v.size()))
    throw Error(ErrorCode::MissingVGrade, kModule, "gradient_F", "no v at grade " + std::to_string(n), n);
  const auto& row = v.v[static_cast<std::size_t>(n)];
  if (k < 1 || k > static_cast<int>(row.size()))
    throw Error(ErrorCode::MissingVGrade, kModule, "gradient_F",
                "v_{" + std::to_string(n) + "," + std::to_string(k) + "} is not certified", n);
  return row[static_cast<std::size_t>(k - 1)];
}

void expand_shift(SymbolBuilder& out, const Monomial& m, const Rational& c, int j, Monomial acc, Rational coeff) {
  if (j == kMaxTimes) {
    out.add(acc, coeff * c);
    return;
  }
  const int a = m.t[j];
  for (int b = 0; b <= a; ++b) {
    Monomial next = acc;
    next.t[j] = static_cast<std::uint8_t>(a - b);
    next.h += b;
    next.xi -= (j + 1) * b;
    Rational w = binomial(a, b);
    for (int i = 0; i < b; ++i) w *= Rational(-1, j + 1);
    expand_shift(out, m, c, j + 1, next, coeff * w);
  }
}

/// ℏ^m part of miwa_shift(p), with the t-degree trust that survives it.
GradedSymbol shifted_component(const GradedSymbol& p, int m, const TruncationPolicy& target) {
  GradedSymbol s = miwa_shift(p);
  if (m > s.policy().hbar_max) return limit_t_trust(zero(target), shift_t(p.trust().t, -m));
  return limit_t_trust(with_policy(hbar_component(s, m), target), shift_t(p.trust().t, -m));
}

}  // namespace

VTable v_coefficients(const WkbPhase& phase) {
  VTable out;
  for (const auto& S : phase.S) {
    std::vector<GradedSymbol> row;
    for (int k = 1; k <= -S.policy().xi_min; ++k) {
      GradedSymbol c = xi_coefficient(S, -k);
      if (c.xi_trust(0) == kPosInf) break;
      row.push_back(scale(c, Rational(-k)));
    }
    out.v.push_back(std::move(row));
  }
  return out;
}

GradedSymbol gradient_F(const VTable& v, int n, int j) {
  GradedSymbol g = v_entry(v, n, j);
  if (n == 0) return g;
  for (int l = 1; l < j; ++l) g = add(g, scale(partial_t(v_entry(v, n - 1, l), j - l), Rational(1, l)));
  return g;
}

GradedSymbol integrate_F(const VTable& v, int n) {
  if (n < 0 || n >= static_cast<int>(v.v.size()))
    throw Error(ErrorCode::MissingVGrade, kModule, "integrate_F", "no v at grade " + std::to_string(n), n);
  const auto& row = v.v[static_cast<std::size_t>(n)];
  const TruncationPolicy& p = row.empty() ? v.v[0].at(0).policy() : row.front().policy();
  const int T = p.num_times;
  std::vector<GradedSymbol> G;
  for (int j = 1; j <= T; ++j) G.push_back(gradient_F(v, n, j));
  for (int j = 1; j <= T; ++j)
    for (int k = j + 1; k <= T; ++k) {
      GradedSymbol d = sub(partial_t(G[static_cast<std::size_t>(j - 1)], k), partial_t(G[static_cast<std::size_t>(k - 1)], j));
      if (!is_zero_within_trust(d))
        throw Error(ErrorCode::NotIntegrable, kModule, "integrate_F",
                    "∂_" + std::to_string(k) + " of gradient " + std::to_string(j) + " differs from ∂_" +
                        std::to_string(j) + " of gradient " + std::to_string(k) + " by " +
                        to_string(trusted_part(d)),
                    n);
    }
  TrustRecord tr = TrustRecord::exact(p);
  SymbolBuilder out(p);
  for (int j = 1; j <= T; ++j) {
    const auto& g = G[static_cast<std::size_t>(j - 1)];
    tr.t = std::min(tr.t, shift_t(g.trust().t, 1));
    for (const auto& t : g.terms()) {
      Monomial m = t.m;
      ++m.t[static_cast<std::size_t>(j - 1)];
      out.add_product(m, t.c, Rational(1, m.t_degree()));
    }
  }
  return std::move(out).finish(tr);
}

TauExpansion tau_expansion(const WkbPhase& phase) {
  VTable v = v_coefficients(phase);
  TauExpansion tau;
  for (int n = 0; n < static_cast<int>(phase.S.size()); ++n) tau.F.push_back(integrate_F(v, n));
  return tau;
}

GradedSymbol miwa_shift(const GradedSymbol& p) {
  require_polynomial(p, "miwa_shift");
  TruncationPolicy q = p.policy();
  q.hbar_min = std::min(q.hbar_min, 0);
  q.hbar_max = std::max(q.hbar_max, q.t_total_max);
  TrustRecord tr = TrustRecord::exact(q);
  tr.t = p.trust().t;
  SymbolBuilder out(q);
  for (const auto& t : p.terms()) expand_shift(out, t.m, t.c, 0, Monomial{}, Rational(1));
  return std::move(out).finish(tr);
}

GradedSymbol miwa_derivative(const GradedSymbol& p) {
  require_polynomial(p, "miwa_derivative");
  GradedSymbol sum = zero(p.policy());
  for (int j = 1; j <= p.policy().num_times; ++j) sum = sub(sum, mul_xi_power(partial_t(p, j), -j - 1));
  return sum;
}

TauWaveReport verify_tau_wave(const TauExpansion& tau, const WaveData& wave) {
  const char* op = "verify_tau_wave";
  for (const auto& a : wave.alpha)
    if (sgn(a) != 0)
      throw Error(ErrorCode::AlphaUnsupported, kModule, op, "α = " + format_rational(a) + " is not supported");
  const auto& S = wave.phase.S;
  const int N = static_cast<int>(S.size()) - 1;
  if (static_cast<int>(tau.F.size()) < N + 1)
    throw Error(ErrorCode::InvalidArgument, kModule, op, "fewer F_n than phase grades");
  const TruncationPolicy& p = S.at(0).policy();
  const int T = p.num_times;
  TauWaveReport report;
  report.ok = true;
  for (int g = -1; g < N; ++g) {
    const auto& Sg = S[static_cast<std::size_t>(g + 1)];
    GradedSymbol R = neg(Sg);
    GradedSymbol D = neg(partial_xi(Sg));
    for (int n = 0; n <= g + 1; ++n) {
      const auto& F = tau.F[static_cast<std::size_t>(n)];
      R = add(R, shifted_component(F, g + 2 - n, p));
      for (int j = 1; j <= T; ++j)
        D = add(D, mul_xi_power(shifted_component(partial_t(F, j), g + 1 - n, p), -j - 1));
    }
    // F_n only sees t_1..t_T; shifting the missing t_j lands at ξ ≤ −j.
    R = limit_xi_trust(R, -T);
    D = limit_xi_trust(D, -T - 1);
    report.ok = report.ok && is_zero_within_trust(R) && is_zero_within_trust(D);
    report.residual.push_back(std::move(R));
    report.derivative.push_back(std::move(D));
  }
  return report;
}

}  // namespace hbarkp
