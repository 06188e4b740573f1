#ifndef HBARKP_TESTS_SUPPORT_HPP
#define HBARKP_TESTS_SUPPORT_HPP

#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hbarkp/symbol.hpp"

namespace hbarkp::testing {

inline Term term(const Rational& c, int h, int xi, int x = 0, int logxi = 0,
                 std::vector<int> t = {}) {
  Monomial m = mono(h, xi, x, logxi);
  for (std::size_t j = 0; j < t.size(); ++j) m.t[j] = static_cast<std::uint8_t>(t[j]);
  return {m, c};
}

inline TruncationPolicy window(int hbar_max, int xi_min, int t_total_max, int x_max,
                               int num_times = 1) {
  TruncationPolicy p;
  p.hbar_max = hbar_max;
  p.xi_min = xi_min;
  p.t_total_max = t_total_max;
  p.x_max = x_max;
  p.num_times = num_times;
  return p;
}

struct RandomShape {
  int h_max = 2;
  int xi_lo = -4;
  int xi_hi = 2;
  int x_max = 2;
  int t_degree = 0;
  int num_times = 1;
  int terms = 5;
  int coeff = 5;
  bool log = false;
};

inline GradedSymbol random_symbol(std::mt19937_64& rng, const RandomShape& s,
                                  const TruncationPolicy& policy) {
  std::uniform_int_distribution<int> h(0, s.h_max), xi(s.xi_lo, s.xi_hi), x(0, s.x_max),
      c(-s.coeff, s.coeff), den(1, 3), td(0, s.t_degree), tj(0, std::max(0, s.num_times - 1));
  std::vector<Term> out;
  for (int i = 0; i < s.terms; ++i) {
    Monomial m = mono(h(rng), xi(rng), x(rng));
    int d = td(rng);
    for (int k = 0; k < d; ++k) ++m.t[static_cast<std::size_t>(tj(rng))];
    out.push_back({m, Rational(c(rng), den(rng))});
  }
  if (s.log) out.push_back(term(Rational(c(rng), den(rng)), h(rng), 0, x(rng), 1));
  for (auto& t : out) t.c.canonicalize();
  return make_symbol(out, policy);
}

/// Every coefficient the shallow result certifies agrees with the deep one.
inline ::testing::AssertionResult agrees_within_trust(const GradedSymbol& shallow,
                                                      const GradedSymbol& deep) {
  const auto& p = shallow.policy();
  for (const auto& t : shallow.terms()) {
    if (!shallow.trusted(t.m) || !deep.trusted(t.m)) continue;
    if (deep.coefficient(t.m) != t.c)
      return ::testing::AssertionFailure()
             << "coefficient of " << format_monomial(t.m) << ": " << format_rational(t.c)
             << " vs " << format_rational(deep.coefficient(t.m));
  }
  for (const auto& t : deep.terms()) {
    if (!p.contains(t.m) || !shallow.trusted(t.m) || !deep.trusted(t.m)) continue;
    if (shallow.coefficient(t.m) != t.c)
      return ::testing::AssertionFailure()
             << "missing " << format_monomial(t.m) << " = " << format_rational(t.c);
  }
  return ::testing::AssertionSuccess();
}

}  // namespace hbarkp::testing

#endif  // HBARKP_TESTS_SUPPORT_HPP
