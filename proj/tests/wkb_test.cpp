#include <random>

#include <gtest/gtest.h>

#include "hbarkp/calculus.hpp"
#include "hbarkp/error.hpp"
#include "hbarkp/oracle.hpp"
#include "hbarkp/wkb.hpp"
#include "problems.hpp"
#include "support.hpp"

using namespace hbarkp;
using hbarkp::testing::agrees_within_trust;
using hbarkp::testing::term;
using hbarkp::testing::window;

namespace {

const TruncationPolicy P = window(3, -6, 0, 3, 0);

GradedSymbol S(std::initializer_list<Term> terms, const TruncationPolicy& p = P) { return make_symbol(terms, p); }

hbarkp::testing::RandomShape generator_shape() {
  hbarkp::testing::RandomShape s;
  s.h_max = 3;
  s.xi_lo = -6;
  s.xi_hi = -1;
  s.x_max = 3;
  s.terms = 3;
  s.num_times = 0;
  return s;
}

}  // namespace

TEST(StarExp, Examples) {
  EXPECT_EQ(star_exp_total(S({})), constant(1, exponential_policy(P)));
  auto E = star_exp_total(S({term(1, 0, -1, 1)}));
  const auto& q = E.policy();
  EXPECT_EQ(E.coefficient(mono(0, 0)), 1);
  EXPECT_EQ(E.coefficient(mono(-1, -1, 1)), 1);
  EXPECT_EQ(E.coefficient(mono(-2, -2, 2)), Rational(1, 2));
  EXPECT_EQ(E.coefficient(mono(-1, -3, 1)), Rational(-1, 2));
  EXPECT_TRUE(agrees_within_trust(E, oracle::star_exp(S({term(1, 0, -1, 1)}), q)));
  EXPECT_THROW(star_exp_total(S({term(1, 0, 0, 1)})), Error);
}

TEST(StarExp, NotAHomomorphismOfSums) {
  auto a = S({term(1, 0, -1, 1)});
  auto b = S({term(1, 0, -2)});
  auto lhs = star_exp_total(add(a, b));
  auto rhs = star_mul(star_exp_total(a), with_policy(star_exp_total(b), lhs.policy()));
  EXPECT_FALSE(is_zero_within_trust(sub(lhs, rhs)));
  EXPECT_TRUE(agrees_within_trust(lhs, oracle::star_exp(add(a, b), lhs.policy())));
}

TEST(XToS, PaperExample) {
  auto phase = x_to_s(S({term(1, 0, -1, 1)}));
  ASSERT_EQ(phase.S.size(), 4u);
  EXPECT_EQ(with_policy(phase.S[0], P),
            S({term(1, 0, -1, 1), term(Rational(-1, 2), 0, -3, 1), term(Rational(1, 2), 0, -5, 1)}));
  EXPECT_EQ(phase.S[0].xi_trust(0), P.xi_min);
  for (int n = 1; n <= 3; ++n) {
    EXPECT_TRUE(phase.S[static_cast<std::size_t>(n)].is_zero());
    EXPECT_EQ(phase.S[static_cast<std::size_t>(n)].xi_trust(0), kNegInf);
  }
  EXPECT_TRUE(x_to_s(S({})).S[0].is_zero());
}

TEST(XToS, GradeLocality) {
  std::mt19937_64 rng(11);
  auto X = hbarkp::testing::random_symbol(rng, generator_shape(), P);
  auto base = x_to_s(X);
  auto mutated = x_to_s(add(X, S({term(3, 2, -1, 1), term(-2, 2, -3)})));
  auto text = [](const GradedSymbol& s) { return to_string(s); };
  for (int n = 0; n < 2; ++n)
    EXPECT_EQ(text(base.S[static_cast<std::size_t>(n)]), text(mutated.S[static_cast<std::size_t>(n)]));
  EXPECT_NE(text(base.S[2]), text(mutated.S[2]));

  auto back = s_to_x(base);
  WkbPhase bumped = base;
  bumped.S[2] = add(bumped.S[2], make_symbol({term(1, 0, -2, 1)}, bumped.S[2].policy()));
  auto moved = s_to_x(bumped);
  for (int n = 0; n < 2; ++n) EXPECT_EQ(text(hbar_component(back, n)), text(hbar_component(moved, n)));
  EXPECT_NE(text(hbar_component(back, 2)), text(hbar_component(moved, 2)));
}

TEST(SToX, Examples) {
  WkbPhase zero{{S({}), S({}), S({}), S({})}};
  EXPECT_TRUE(s_to_x(zero).is_zero());
  auto X = S({term(1, 0, -1, 1), term(1, 1, -2, 2)});
  auto back = s_to_x(x_to_s(X));
  EXPECT_TRUE(agrees_within_trust(back, X));
  EXPECT_TRUE(agrees_within_trust(X, back));
}

class WkbProperties : public ::testing::TestWithParam<int> {};

TEST_P(WkbProperties, RegularMatchesOracleAndRoundtrips) {
  std::mt19937_64 rng(static_cast<unsigned>(GetParam()));
  auto X = hbarkp::testing::random_symbol(rng, generator_shape(), P);
  auto phase = x_to_s(X);
  auto S_all = phase_symbol(phase);
  auto reference = oracle::phase(X, exponential_policy(phase_policy(X)));
  for (const auto& t : reference.terms())
    if (t.m.h < 0) ADD_FAILURE() << "oracle keeps " << format_monomial(t.m);
  for (int n = 0; n <= P.hbar_max; ++n) {
    auto ours = phase.S[static_cast<std::size_t>(n)];
    auto theirs = with_policy(hbar_component(reference, n), ours.policy());
    EXPECT_TRUE(agrees_within_trust(ours, theirs)) << "grade " << n;
    for (const auto& t : ours.terms()) EXPECT_LE(t.m.xi, -1);
  }
  EXPECT_LE(S_all.xi_trust(0), -4);
  auto back = s_to_x(phase);
  EXPECT_TRUE(agrees_within_trust(back, X));
  auto again = x_to_s(back);
  for (int n = 0; n <= P.hbar_max; ++n)
    EXPECT_TRUE(agrees_within_trust(again.S[static_cast<std::size_t>(n)], phase.S[static_cast<std::size_t>(n)]));
}

INSTANTIATE_TEST_SUITE_P(Seeds, WkbProperties, ::testing::Range(1, 31));

TEST(WaveFunction, TrivialAndShifted) {
  const TruncationPolicy p = window(3, -8, 2, 4, 3);
  auto trivial = solve(hbarkp::testing::trivial_problem(p, 3));
  auto w = wave_function(trivial, true);
  for (const auto& s : w.phase.S) EXPECT_TRUE(s.is_zero());
  EXPECT_EQ(w.zeta, zeta_symbol(p));
  auto shifted = solve(hbarkp::testing::shifted_problem(p, 1, 3));
  auto ws = wave_function(shifted, true);
  for (const auto& s : ws.phase.S) EXPECT_TRUE(s.is_zero());
  EXPECT_EQ(ws.alpha, (std::vector<Rational>{-1, 0, 0, 0}));
}

TEST(WaveFunction, AiryLinearEquation) {
  const TruncationPolicy p = window(2, -8, 2, 8, 2);
  auto problem = hbarkp::testing::airy_problem(p, 2);
  auto data = solve(problem);
  auto lax = build_lax(data, true, p);
  auto X = assemble_X(data.X, 2);
  auto r = wave_linear_residual(lax.L, X);
  EXPECT_TRUE(is_zero_within_trust(r));
  EXPECT_LE(r.xi_trust(0), -2);
  auto w = wave_function(data, true);
  for (const auto& s : w.phase.S)
    for (const auto& t : s.terms()) EXPECT_EQ(t.m.x, 0);
}
