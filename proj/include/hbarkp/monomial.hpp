#ifndef HBARKP_MONOMIAL_HPP
#define HBARKP_MONOMIAL_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace hbarkp {

/// Upper bound on the number of time variables t_1..t_T carried in a monomial.
inline constexpr int kMaxTimes = 8;

using TimeExponents = std::array<std::uint8_t, kMaxTimes>;

/// ℏ^h ξ^xi (log ξ)^logxi x^x t^t. ξ stands for the symbol of ℏ∂, so the
/// ℏ-order of a monomial is simply -h.
struct Monomial {
  std::int32_t h = 0;
  std::int32_t xi = 0;
  std::int32_t logxi = 0;
  std::int32_t x = 0;
  TimeExponents t{};

  int t_degree() const noexcept {
    int d = 0;
    for (auto e : t) d += e;
    return d;
  }

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Canonical order: ℏ ascending, ξ descending, log ξ first, x ascending, then
/// t lexicographic. Serialization follows this order.
struct CanonicalLess {
  bool operator()(const Monomial& a, const Monomial& b) const noexcept {
    if (a.h != b.h) return a.h < b.h;
    if (a.xi != b.xi) return a.xi > b.xi;
    if (a.logxi != b.logxi) return a.logxi > b.logxi;
    if (a.x != b.x) return a.x < b.x;
    return a.t < b.t;
  }
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const noexcept {
    std::uint64_t k = 1469598103934665603ull;
    auto mix = [&k](std::uint64_t v) {
      k ^= v + 0x9e3779b97f4a7c15ull + (k << 6) + (k >> 2);
    };
    mix(static_cast<std::uint32_t>(m.h));
    mix(static_cast<std::uint32_t>(m.xi));
    mix(static_cast<std::uint32_t>(m.logxi));
    mix(static_cast<std::uint32_t>(m.x));
    std::uint64_t packed = 0;
    for (auto e : m.t) packed = (packed << 8) | e;
    mix(packed);
    return static_cast<std::size_t>(k);
  }
};

inline Monomial mono(int h, int xi, int x = 0, int logxi = 0) {
  Monomial m;
  m.h = h;
  m.xi = xi;
  m.x = x;
  m.logxi = logxi;
  return m;
}

}  // namespace hbarkp

#endif  // HBARKP_MONOMIAL_HPP
