#include <random>

#include <gtest/gtest.h>

#include "hbarkp/calculus.hpp"
#include "hbarkp/dkp.hpp"
#include "hbarkp/error.hpp"
#include "problems.hpp"
#include "support.hpp"

using namespace hbarkp;
using hbarkp::testing::term;
using hbarkp::testing::window;

namespace {

const TruncationPolicy P = window(0, -8, 3, 6, 3);

GradedSymbol S(std::initializer_list<Term> terms) { return make_symbol(terms, P); }

const GradedSymbol kXi = S({term(1, 0, 1)});
const GradedSymbol kX = S({term(1, 0, 0, 1)});
const GradedSymbol kZero = S({});

GradedSymbol orlov_schulman_trivial(const Rational& alpha) {
  return S({term(1, 0, 0, 1), term(alpha, 0, -1), term(1, 0, 0, 0, 0, {1}), term(2, 0, 1, 0, 0, {0, 1}),
            term(3, 0, 2, 0, 0, {0, 0, 1})});
}

}  // namespace

TEST(DkpDress, TrivialSeed) {
  auto d = dkp_dress({kZero, 0}, true);
  EXPECT_EQ(d.L, kXi);
  EXPECT_EQ(d.M, orlov_schulman_trivial(0));
  auto off = dkp_dress({kZero, 0}, false);
  EXPECT_EQ(off.M, kX);
}

TEST(DkpDress, SingleTermSeed) {
  // X₀ = x²ξ⁻¹: 𝓛 = ξ − 2xξ⁻¹ + O(ξ⁻²).
  auto d = dkp_dress({S({term(1, 0, -1, 2)}), 0}, false);
  EXPECT_EQ(d.L.coefficient(mono(0, 1)), 1);
  EXPECT_EQ(d.L.coefficient(mono(0, 0)), 0);
  EXPECT_EQ(d.L.coefficient(mono(0, -1, 1)), -2);
  EXPECT_TRUE(is_zero_within_trust(sub(poisson(d.L, d.M), constant(1, P))));
}

TEST(DkpRhResidual, Examples) {
  auto trivial = dkp_dress({kZero, 0}, true);
  auto [rf, rg] = dkp_rh_residual(kXi, kX, trivial.L, trivial.M);
  EXPECT_TRUE(rf.is_zero());
  EXPECT_TRUE(rg.is_zero());

  for (Rational c : {Rational(1), Rational(-3, 2)}) {
    auto d = dkp_dress({kZero, -c}, true);
    EXPECT_EQ(d.M, orlov_schulman_trivial(-c));
    auto [sf, sg] = dkp_rh_residual(kXi, S({term(1, 0, 0, 1), term(c, 0, -1)}), d.L, d.M);
    EXPECT_TRUE(sf.is_zero());
    EXPECT_TRUE(sg.is_zero());
  }

  auto bad = dkp_dress({kZero, 1}, true);
  auto [bf, bg] = dkp_rh_residual(kXi, kX, bad.L, bad.M);
  EXPECT_TRUE(bf.is_zero());
  EXPECT_EQ(bg, S({term(1, 0, -1)}));
}

TEST(DkpRhResidual, RejectsNonCanonicalPair) {
  auto d = dkp_dress({kZero, 0}, true);
  try {
    dkp_rh_residual(kXi, S({term(2, 0, 0, 1)}), d.L, d.M);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotCanonical);
  }
}

TEST(DkpLaxResidual, TrivialAndShifted) {
  auto trivial = dkp_dress({kZero, 0}, true);
  for (int n = 1; n <= 3; ++n) EXPECT_TRUE(dkp_lax_residual(trivial.L, n).is_zero());
  auto shifted = dkp_dress({kZero, -1}, true);
  for (int n = 1; n <= 3; ++n) EXPECT_TRUE(is_zero_within_trust(dkp_lax_residual(shifted.L, n)));
  for (int n : {0, 4}) {
    try {
      dkp_lax_residual(trivial.L, n);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::TimeIndexOutOfRange);
    }
  }
}

TEST(Seed, OrlovSchulmanUndressing) {
  // 𝓜 = x + 2ξ⁻¹ is the shifted seed with α₀ = 2 and X₀ = 0.
  auto s = seed_from_orlov_schulman(S({term(1, 0, 0, 1), term(2, 0, -1)}));
  EXPECT_EQ(s.alpha0, 2);
  EXPECT_TRUE(is_zero_within_trust(s.X0));
  try {
    seed_from_orlov_schulman(S({term(1, 0, 0, 1), term(1, 0, -1, 1)}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AlphaNotConstant);
  }
}

TEST(Seed, AiryProblemIsAdmissible) {
  auto problem = hbarkp::testing::airy_problem(P, 0);
  auto d = dkp_dress({problem.X0, problem.alpha0}, true);
  EXPECT_EQ(d.L.xi_trust(0), P.xi_min);
  auto [rf, rg] = dkp_rh_residual(problem.f, problem.g, d.L, d.M);
  EXPECT_TRUE(is_zero_within_trust(rf));
  EXPECT_TRUE(is_zero_within_trust(rg));
  EXPECT_LE(rf.xi_trust(0), -4);
  EXPECT_LE(rg.xi_trust(0), -4);
  // 𝓛² = ξ² + 2(x + t₁) + 6t₃ξ + ... at t₂ = t₃ = 0 reduces to ξ² + 2x.
  auto L2 = power(d.L, 2);
  EXPECT_EQ(L2.coefficient(mono(0, 2)), 1);
  EXPECT_EQ(L2.coefficient(mono(0, 0, 1)), 2);
  EXPECT_EQ(L2.coefficient(mono(0, -1, 1)), 0);
  for (int n = 1; n <= P.num_times; ++n) EXPECT_TRUE(is_zero_within_trust(dkp_lax_residual(d.L, n))) << n;
}

class DkpProperties : public ::testing::TestWithParam<int> {};

TEST_P(DkpProperties, CanonicalAndShaped) {
  std::mt19937_64 rng(static_cast<unsigned>(GetParam()));
  hbarkp::testing::RandomShape s;
  s.h_max = 0;
  s.xi_lo = -4;
  s.xi_hi = -1;
  s.x_max = 2;
  s.terms = 3;
  auto X0 = hbarkp::testing::random_symbol(rng, s, P);
  std::uniform_int_distribution<int> a(-3, 3);
  auto d = dkp_dress({X0, a(rng)}, true);
  EXPECT_TRUE(is_zero_within_trust(sub(poisson(d.L, d.M), constant(1, P))));
  EXPECT_EQ(d.L.coefficient(mono(0, 1)), 1);
  for (const auto& t : d.L.terms()) {
    EXPECT_LE(t.m.xi, 1);
    EXPECT_NE(t.m.xi, 0);
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, DkpProperties, ::testing::Range(1, 31));
