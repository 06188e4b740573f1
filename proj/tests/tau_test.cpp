#include <random>

#include <gtest/gtest.h>

#include "hbarkp/error.hpp"
#include "hbarkp/tau.hpp"
#include "problems.hpp"
#include "support.hpp"

using namespace hbarkp;
using hbarkp::testing::term;
using hbarkp::testing::window;

namespace {

const TruncationPolicy P = window(2, -10, 3, 0, 3);

GradedSymbol S(std::initializer_list<Term> terms) { return make_symbol(terms, P); }
GradedSymbol t(const Rational& c, std::vector<int> degrees) { return S({term(c, 0, 0, 0, 0, std::move(degrees))}); }
GradedSymbol zero() { return S({}); }

WkbPhase zero_phase() { return {{zero(), zero(), zero()}}; }

/// Ŝ_g = Σ_n [ℏ^{g+2−n}] F_n(t − ℏ[z⁻¹]), the phase whose tau function is F.
WkbPhase phase_of(const std::vector<GradedSymbol>& F) {
  WkbPhase phase;
  for (int g = 0; g < static_cast<int>(F.size()); ++g) {
    GradedSymbol s = zero();
    for (int n = 0; n <= g; ++n) {
      GradedSymbol shifted = miwa_shift(F[static_cast<std::size_t>(n)]);
      int m = g + 1 - n;
      if (m <= shifted.policy().hbar_max) s = add(s, with_policy(hbar_component(shifted, m), P));
    }
    phase.S.push_back(s);
  }
  return phase;
}

struct Pipeline {
  DressingData data;
  WaveData wave;
  TauExpansion tau;
};

const Pipeline& weyl_airy() {
  static const Pipeline pipeline = [] {
    const TruncationPolicy p = window(3, -10, 3, 6, 3);
    DressingData data = solve(hbarkp::testing::weyl_airy_problem(p, 3));
    WaveData wave = wave_function(data, true);
    TauExpansion tau = tau_expansion(wave.phase);
    return Pipeline{std::move(data), std::move(wave), std::move(tau)};
  }();
  return pipeline;
}

}  // namespace

TEST(VCoefficients, Examples) {
  for (const auto& row : v_coefficients(zero_phase()).v)
    for (const auto& v : row) EXPECT_TRUE(v.is_zero());
  WkbPhase phase = zero_phase();
  phase.S[0] = S({term(-1, 0, -1, 0, 0, {1}), term(5, 0, -2)});
  auto v = v_coefficients(phase);
  EXPECT_EQ(v.v[0][0], t(1, {1}));
  EXPECT_EQ(v.v[0][1], S({term(-10, 0, 0)}));
  EXPECT_EQ(v.v[0].size(), 10u);
}

TEST(VCoefficients, StopsAtTrust) {
  WkbPhase phase = zero_phase();
  phase.S[1] = limit_xi_trust(S({term(1, 0, -1)}), -3);
  auto v = v_coefficients(phase);
  EXPECT_EQ(v.v[1].size(), 3u);
  EXPECT_NO_THROW(integrate_F(v, 1));
  for (auto [n, j] : {std::pair{1, 4}, std::pair{3, 1}}) {
    try {
      gradient_F(v, n, j);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::MissingVGrade);
    }
  }
}

TEST(GradientF, Examples) {
  VTable v;
  v.v.assign(2, std::vector<GradedSymbol>(3, zero()));
  v.v[0][0] = t(1, {0, 1});
  v.v[0][1] = t(1, {1});
  v.v[1][1] = t(7, {0, 0, 1});
  EXPECT_EQ(gradient_F(v, 0, 2), t(1, {1}));
  // n = 1, j = 2: v_{1,2} + ∂v_{0,1}/∂t₁ = 7t₃ + 0.
  EXPECT_EQ(gradient_F(v, 1, 2), t(7, {0, 0, 1}));
  v.v[0][0] = t(1, {2});
  EXPECT_EQ(gradient_F(v, 1, 2), add(t(7, {0, 0, 1}), t(2, {1})));
  // j = 3 sums k + l = 3: ∂v_{0,1}/∂t₂ + ½∂v_{0,2}/∂t₁.
  EXPECT_EQ(gradient_F(v, 1, 3), S({term(Rational(1, 2), 0, 0)}));
  VTable empty;
  empty.v.assign(2, std::vector<GradedSymbol>(3, zero()));
  for (int j = 1; j <= 3; ++j) EXPECT_TRUE(gradient_F(empty, 1, j).is_zero());
  EXPECT_THROW(gradient_F(empty, 2, 1), Error);
}

TEST(IntegrateF, ExactDifferential) {
  VTable v;
  v.v.assign(1, std::vector<GradedSymbol>(3, zero()));
  v.v[0][0] = t(1, {0, 1});
  v.v[0][1] = t(1, {1});
  EXPECT_EQ(integrate_F(v, 0), t(1, {1, 1}));
  VTable empty;
  empty.v.assign(1, std::vector<GradedSymbol>(3, zero()));
  EXPECT_TRUE(integrate_F(empty, 0).is_zero());
}

TEST(IntegrateF, RejectsNonIntegrableGradient) {
  VTable v;
  v.v.assign(1, std::vector<GradedSymbol>(3, zero()));
  v.v[0][0] = t(1, {0, 1});
  try {
    integrate_F(v, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotIntegrable);
  }
}

TEST(MiwaShift, Examples) {
  auto shift = [](const GradedSymbol& p) { return miwa_shift(p); };
  auto q = shift(t(1, {1})).policy();
  auto Q = [&](std::initializer_list<Term> terms) { return make_symbol(terms, q); };
  EXPECT_EQ(shift(t(1, {1})), Q({term(1, 0, 0, 0, 0, {1}), term(-1, 1, -1)}));
  EXPECT_EQ(shift(S({term(1, 0, 0)})), Q({term(1, 0, 0)}));
  EXPECT_EQ(shift(t(1, {2})), Q({term(1, 0, 0, 0, 0, {2}), term(-2, 1, -1, 0, 0, {1}), term(1, 2, -2)}));
  EXPECT_EQ(shift(t(1, {0, 0, 1})), Q({term(1, 0, 0, 0, 0, {0, 0, 1}), term(Rational(-1, 3), 1, -3)}));
  EXPECT_THROW(shift(S({term(1, 0, -1)})), Error);
}

TEST(MiwaDerivative, Examples) {
  EXPECT_EQ(miwa_derivative(t(1, {1, 1})), S({term(-1, 0, -2, 0, 0, {0, 1}), term(-1, 0, -3, 0, 0, {1})}));
  EXPECT_TRUE(miwa_derivative(S({term(4, 0, 0)})).is_zero());
}

TEST(TauWave, Trivial) {
  const TruncationPolicy p = window(3, -8, 2, 4, 3);
  auto data = solve(hbarkp::testing::trivial_problem(p, 3));
  auto wave = wave_function(data, true);
  auto tau = tau_expansion(wave.phase);
  for (const auto& F : tau.F) EXPECT_TRUE(F.is_zero());
  auto report = verify_tau_wave(tau, wave);
  EXPECT_TRUE(report.ok);
  for (const auto& R : report.residual) EXPECT_TRUE(R.is_zero());
}

TEST(TauWave, RejectsAlpha) {
  const TruncationPolicy p = window(3, -8, 2, 4, 3);
  auto data = solve(hbarkp::testing::shifted_problem(p, 1, 3));
  auto wave = wave_function(data, true);
  try {
    verify_tau_wave(tau_expansion(wave.phase), wave);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AlphaUnsupported);
  }
}

TEST(TauWave, WeylAiryPipeline) {
  const auto& pipe = weyl_airy();
  for (const auto& a : pipe.data.alpha) EXPECT_EQ(a, 0);
  auto report = verify_tau_wave(pipe.tau, pipe.wave);
  EXPECT_TRUE(report.ok);
  ASSERT_EQ(report.residual.size(), 4u);
  for (const auto& R : report.residual) EXPECT_EQ(R.xi_trust(0), -3);
  EXPECT_GE(report.residual[0].trust().t, 2);
}

TEST(TauWave, MissingTimesAreNotCertified) {
  // Wave of F_0 = t_1 t_4 seen with T = 3: the restricted F_0 vanishes while
  // the phase keeps -t_1 ξ^-4 / 4.
  WaveData wave{{{S({term(Rational(-1, 4), 0, -4, 0, 0, {1, 0, 0})}), S({term(Rational(1, 4), 0, -5, 0, 0, {})}),
                  zero()}},
                {0, 0, 0},
                zeta_symbol(P)};
  auto tau = tau_expansion(wave.phase);
  for (const auto& F : tau.F) EXPECT_TRUE(F.is_zero());
  auto report = verify_tau_wave(tau, wave);
  EXPECT_TRUE(report.ok);
  ASSERT_FALSE(report.residual.empty());
  EXPECT_FALSE(report.residual[0].is_zero());
  EXPECT_GE(report.residual[0].xi_trust(0), -3);
}

TEST(TauWave, WeylAiryMatchesWittenKontsevich) {
  // Genus 0: t₁³/6 at t-degree ≤ 3. Genus 1: −(1/24) log(1 − τ₁) with τ₁ = 3t₃.
  const auto& F = weyl_airy().tau.F;
  const auto& p = F[0].policy();
  auto poly = [&](std::initializer_list<Term> terms) { return make_symbol(terms, p); };
  EXPECT_EQ(F[0], poly({term(Rational(1, 6), 0, 0, 0, 0, {3})}));
  EXPECT_TRUE(F[1].is_zero());
  EXPECT_EQ(F[2], poly({term(Rational(1, 8), 0, 0, 0, 0, {0, 0, 1}), term(Rational(3, 16), 0, 0, 0, 0, {0, 0, 2}),
                        term(Rational(3, 8), 0, 0, 0, 0, {0, 0, 3})}));
  EXPECT_TRUE(F[3].is_zero());
}

TEST(TauWave, MutationFlipsVerdict) {
  const auto& pipe = weyl_airy();
  for (int n : {0, 1}) {
    TauExpansion bad = pipe.tau;
    bad.F[static_cast<std::size_t>(n)] = add(bad.F[static_cast<std::size_t>(n)],
                                             make_symbol({term(1, 0, 0, 0, 0, {1})}, bad.F[0].policy()));
    auto report = verify_tau_wave(bad, pipe.wave);
    EXPECT_FALSE(report.ok);
    // ℏ^{n−2}(t₁ − ℏz⁻¹ − t₁) = −ℏ^{n−1}z⁻¹.
    const auto& R = report.residual[static_cast<std::size_t>(n)];
    EXPECT_EQ(R.coefficient(mono(0, -1)), -1);
  }
}

TEST(TauWave, NormalizationInvariance) {
  const auto& pipe = weyl_airy();
  TauExpansion moved = pipe.tau;
  for (auto& F : moved.F) F = add(F, make_symbol({term(5, 0, 0)}, F.policy()));
  auto a = verify_tau_wave(pipe.tau, pipe.wave);
  auto b = verify_tau_wave(moved, pipe.wave);
  EXPECT_TRUE(b.ok);
  for (std::size_t g = 0; g < a.residual.size(); ++g) {
    EXPECT_EQ(a.residual[g], b.residual[g]);
    EXPECT_EQ(a.derivative[g], b.derivative[g]);
  }
}

TEST(TauWave, GradientConsistency) {
  const auto& pipe = weyl_airy();
  auto v = v_coefficients(pipe.wave.phase);
  for (int n = 0; n < static_cast<int>(pipe.tau.F.size()); ++n)
    for (int j = 1; j <= 3; ++j) {
      auto d = sub(partial_t(pipe.tau.F[static_cast<std::size_t>(n)], j), gradient_F(v, n, j));
      EXPECT_TRUE(is_zero_within_trust(d)) << n << " " << j;
    }
}

class TauProperties : public ::testing::TestWithParam<int> {};

TEST_P(TauProperties, RecoversFFromItsPhase) {
  std::mt19937_64 rng(static_cast<unsigned>(GetParam()));
  std::uniform_int_distribution<int> total(1, 3), slot(0, 2), c(-4, 4), den(1, 3);
  std::vector<GradedSymbol> F;
  for (int n = 0; n <= P.hbar_max; ++n) {
    std::vector<Term> terms;
    for (int i = 0; i < 4; ++i) {
      std::vector<int> d(3, 0);
      for (int k = total(rng); k > 0; --k) ++d[static_cast<std::size_t>(slot(rng))];
      Rational r(c(rng), den(rng));
      r.canonicalize();
      terms.push_back(term(r, 0, 0, 0, 0, d));
    }
    F.push_back(make_symbol(terms, P));
  }
  WaveData wave{phase_of(F), {0, 0, 0}, zeta_symbol(P)};
  auto tau = tau_expansion(wave.phase);
  for (std::size_t n = 0; n < F.size(); ++n) EXPECT_EQ(tau.F[n], F[n]) << n;
  EXPECT_TRUE(verify_tau_wave(tau, wave).ok);
}

INSTANTIATE_TEST_SUITE_P(Seeds, TauProperties, ::testing::Range(1, 31));
