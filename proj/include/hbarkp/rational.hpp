#ifndef HBARKP_RATIONAL_HPP
#define HBARKP_RATIONAL_HPP

#include <string>
#include <string_view>

#include <gmpxx.h>

namespace hbarkp {

/// Exact coefficient field. GMP keeps mpq values canonical (lowest terms,
/// positive denominator) after every arithmetic operation.
using Rational = mpq_class;

/// "p/q", or "p" when the denominator is one.
std::string format_rational(const Rational& r);

/// Accepts "p", "-p", "p/q". Throws Error(SpecParseError) on malformed input
/// or a zero denominator.
Rational parse_rational(std::string_view text);

Rational factorial(unsigned n);
/// n choose k for 0 ≤ k ≤ n.
Rational binomial(int n, int k);

}  // namespace hbarkp

#endif  // HBARKP_RATIONAL_HPP
