#include "hbarkp/oracle.hpp"

#include <algorithm>
#include <vector>

#include "hbarkp/error.hpp"

namespace hbarkp::oracle {

namespace {

constexpr int H = 0, Z = 1, X = 2, T0 = 3;

void accumulate(Poly& p, const Key& k, const Rational& c) {
  if (sgn(c) == 0) return;
  auto [it, inserted] = p.emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (sgn(it->second) == 0) p.erase(it);
  }
}

Poly d_dx(const Poly& p) {
  Poly out;
  for (const auto& [k, c] : p) {
    if (k[X] == 0) continue;
    Key q = k;
    --q[X];
    accumulate(out, q, c * k[X]);
  }
  return out;
}

/// (ℏ∂)(p e^{xz/ℏ}) = (z p + ℏ p_x) e^{xz/ℏ}.
Poly apply_d(const Poly& p, int h_max) {
  Poly out;
  for (const auto& [k, c] : p) {
    Key q = k;
    ++q[Z];
    accumulate(out, q, c);
  }
  for (const auto& [k, c] : d_dx(p)) {
    Key q = k;
    ++q[H];
    if (q[H] <= h_max) accumulate(out, q, c);
  }
  return out;
}

/// (ℏ∂)⁻¹(p e^{xz/ℏ}) = Σ_j (−ℏ)^j z^{−j−1} p^{(j)} e^{xz/ℏ}.
Poly apply_d_inverse(const Poly& p, int h_max, int z_min) {
  Poly out;
  Poly deriv = p;
  for (int j = 0; !deriv.empty(); ++j) {
    for (const auto& [k, c] : deriv) {
      Key q = k;
      q[H] += j;
      q[Z] -= j + 1;
      if (q[H] > h_max || q[Z] < z_min) continue;
      accumulate(out, q, j % 2 == 0 ? c : Rational(-c));
    }
    deriv = d_dx(deriv);
  }
  return out;
}

int top_z(const Poly& p) {
  int t = 0;
  for (const auto& [k, c] : p) t = std::max(t, k[Z]);
  return t;
}

int top_x(const Poly& p) {
  int t = 0;
  for (const auto& [k, c] : p) t = std::max(t, k[X]);
  return t;
}

}  // namespace

Poly from_symbol(const GradedSymbol& a) {
  Poly p;
  for (const auto& t : a.terms()) {
    if (t.m.logxi != 0)
      throw Error(ErrorCode::InvalidArgument, "oracle", "from_symbol", "log ξ has no operator action here");
    Key k{};
    k[H] = t.m.h;
    k[Z] = t.m.xi;
    k[X] = t.m.x;
    for (int j = 0; j < kMaxTimes; ++j) k[T0 + j] = t.m.t[j];
    accumulate(p, k, t.c);
  }
  return p;
}

GradedSymbol to_symbol(const Poly& p, const TruncationPolicy& policy) {
  std::vector<Term> terms;
  for (const auto& [k, c] : p) {
    Monomial m = mono(k[H], k[Z], k[X]);
    bool ok = true;
    for (int j = 0; j < kMaxTimes; ++j) {
      if (k[T0 + j] > 255) ok = false;
      m.t[j] = static_cast<std::uint8_t>(k[T0 + j]);
    }
    if (ok && policy.contains(m)) terms.push_back({m, c});
  }
  return make_symbol(terms, policy);
}

Poly add(const Poly& a, const Poly& b, const Rational& scale_b) {
  Poly out = a;
  for (const auto& [k, c] : b) accumulate(out, k, c * scale_b);
  return out;
}

Poly apply(const Poly& op, const Poly& p, const Window& w) {
  Poly out;
  for (const auto& [ko, co] : op) {
    int budget = w.h_max - ko[H];
    Poly q = p;
    for (int i = 0; i < ko[Z]; ++i) q = apply_d(q, budget);
    for (int i = 0; i < -ko[Z]; ++i) q = apply_d_inverse(q, budget, w.z_min);
    for (const auto& [k, c] : q) {
      Key r = k;
      r[H] += ko[H];
      r[X] += ko[X];
      for (int j = 0; j < kMaxTimes; ++j) r[T0 + j] += ko[T0 + j];
      if (r[H] > w.h_max || r[Z] < w.z_min) continue;
      accumulate(out, r, c * co);
    }
  }
  return out;
}

Poly compose(const Poly& a, const Poly& b, const Window& w) { return apply(a, b, w); }

Poly divide_by_hbar(const Poly& p, int h_floor) {
  Poly out;
  for (const auto& [k, c] : p) {
    if (k[H] - 1 < h_floor)
      throw Error(ErrorCode::InvalidArgument, "oracle", "divide_by_hbar", "term without a factor of ℏ");
    Key q = k;
    --q[H];
    out.emplace(q, c);
  }
  return out;
}

GradedSymbol star(const GradedSymbol& a, const GradedSymbol& b) {
  const auto& p = a.policy();
  Window w{p.hbar_min, p.hbar_max, p.xi_min};
  return to_symbol(compose(from_symbol(a), from_symbol(b), w), p);
}

GradedSymbol conjugate_by_commutators(const GradedSymbol& A, const GradedSymbol& b, int brackets) {
  const auto& p = b.policy();
  Poly a = from_symbol(A);
  Poly cur = from_symbol(b);
  // With A of negative order, truncated tails are only ever lowered further,
  // so the target floor is already exact.
  bool a_negative = std::all_of(a.begin(), a.end(), [](const auto& e) { return e.first[Z] < 0; });
  int head = std::max(top_z(a), 0) + std::max(top_z(cur), 0) + 2;
  Window w{p.hbar_min, p.hbar_max + brackets, a_negative ? p.xi_min : p.xi_min - 2 * (brackets + 1) * head};
  Poly sum = cur;
  for (int k = 1; k <= brackets && !cur.empty(); ++k) {
    Poly comm = add(compose(a, cur, w), compose(cur, a, w), -1);
    cur = divide_by_hbar(comm, p.hbar_min);
    for (auto& [key, c] : cur) c /= k;
    sum = add(sum, cur);
  }
  return to_symbol(sum, p);
}

GradedSymbol substitute_x(const GradedSymbol& b, const GradedSymbol& x_image) {
  const auto& p = b.policy();
  Poly img = from_symbol(x_image);
  Poly src = from_symbol(b);
  int a_max = top_x(src);
  Window w{p.hbar_min, p.hbar_max, p.xi_min - (a_max + 1) * (std::max(top_z(img), 0) + 1) - 4};
  std::vector<Poly> powers{Poly{{Key{}, Rational(1)}}};
  for (int a = 1; a <= a_max; ++a) powers.push_back(compose(img, powers.back(), w));
  Poly out;
  for (const auto& [k, c] : src) {
    Key zk{};
    zk[Z] = k[Z];
    Poly term = compose(powers[static_cast<std::size_t>(k[X])], Poly{{zk, Rational(1)}}, w);
    for (const auto& [q, d] : term) {
      Key r = q;
      r[H] += k[H];
      for (int j = 0; j < kMaxTimes; ++j) r[T0 + j] += k[T0 + j];
      if (r[H] > w.h_max) continue;
      accumulate(out, r, d * c);
    }
  }
  return to_symbol(out, p);
}

namespace {

Poly exp_poly(const GradedSymbol& X, const TruncationPolicy& q) {
  const int kmax = -q.xi_min;
  Window w{0, q.hbar_max + kmax, q.xi_min};
  Poly gen = from_symbol(X);
  Poly power{{Key{}, Rational(1)}};
  Poly E = power;
  Rational inv_fact = 1;
  for (int k = 1; k <= kmax; ++k) {
    power = apply(gen, power, w);
    if (power.empty()) break;
    inv_fact /= k;
    for (const auto& [key, c] : power) {
      Key r = key;
      r[H] -= k;
      if (r[H] <= q.hbar_max) accumulate(E, r, c * inv_fact);
    }
  }
  return E;
}

Poly times(const Poly& a, const Poly& b, int h_max, int z_min) {
  Poly out;
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) {
      Key r;
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = ka[i] + kb[i];
      if (r[H] > h_max || r[Z] < z_min) continue;
      accumulate(out, r, ca * cb);
    }
  return out;
}

}  // namespace

GradedSymbol star_exp(const GradedSymbol& X, const TruncationPolicy& exp_policy) {
  return to_symbol(exp_poly(X, exp_policy), exp_policy);
}

GradedSymbol phase(const GradedSymbol& X, const TruncationPolicy& exp_policy) {
  Poly R = exp_poly(X, exp_policy);
  accumulate(R, Key{}, Rational(-1));
  Poly log;
  Poly power = R;
  for (int m = 1; !power.empty(); ++m) {
    log = add(log, power, Rational(m % 2 == 1 ? 1 : -1, m));
    power = times(power, R, exp_policy.hbar_max, exp_policy.xi_min);
  }
  Poly S;
  for (const auto& [key, c] : log) {
    Key r = key;
    ++r[H];
    accumulate(S, r, c);
  }
  TruncationPolicy out = exp_policy;
  out.hbar_max = X.policy().hbar_max;
  return to_symbol(S, out);
}

}  // namespace hbarkp::oracle
