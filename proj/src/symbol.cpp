#include "hbarkp/symbol.hpp"

#include <algorithm>
#include <climits>
#include <sstream>

#include "hbarkp/error.hpp"

namespace hbarkp {

namespace {

constexpr const char* kModule = "series-core";

std::int64_t sat_add(std::int64_t a, std::int64_t b) {
  if (a == kPosInf || b == kPosInf) return kPosInf;
  if (a == kNegInf || b == kNegInf) return kNegInf;
  return std::clamp(a + b, kNegInf + 1, kPosInf - 1);
}

std::int64_t shifted(std::int64_t v, std::int64_t d) {
  if (v == kNegInf || v == kPosInf) return v;
  return std::clamp(v + d, kNegInf + 1, kPosInf - 1);
}

TrustRecord shift_xi_trust(TrustRecord tr, std::int64_t d) {
  for (auto& v : tr.xi) v = shifted(v, d);
  tr.beyond = shifted(tr.beyond, d);
  return tr;
}

void require_same_policy(const GradedSymbol& a, const GradedSymbol& b, const char* op) {
  if (!(a.policy() == b.policy()))
    throw Error(ErrorCode::PolicyMismatch, kModule, op, "operands use different truncation windows");
}

Monomial times(const Monomial& a, const Monomial& b) {
  Monomial m;
  m.h = a.h + b.h;
  m.xi = a.xi + b.xi;
  m.logxi = a.logxi + b.logxi;
  m.x = a.x + b.x;
  for (int j = 0; j < kMaxTimes; ++j) m.t[j] = static_cast<std::uint8_t>(a.t[j] + b.t[j]);
  return m;
}

Rational falling(int k, int n) {
  Rational r = 1;
  for (int i = 0; i < n; ++i) r *= k - i;
  return r;
}

struct GradeInfo {
  int h;
  std::int64_t tau;
  std::int64_t dprime;  // bound on the true top ξ-degree
  int max_x;            // meaningful only for exact grades
  bool beyond;
};

std::vector<GradeInfo> grade_infos(const GradedSymbol& s) {
  const auto& p = s.policy();
  std::vector<GradeInfo> out;
  std::vector<std::int64_t> top(static_cast<std::size_t>(p.num_grades()), kNegInf);
  std::vector<int> mx(static_cast<std::size_t>(p.num_grades()), -1);
  for (const auto& t : s.terms()) {
    auto g = static_cast<std::size_t>(t.m.h - p.hbar_min);
    top[g] = std::max<std::int64_t>(top[g], t.m.xi);
    mx[g] = std::max(mx[g], t.m.x);
  }
  for (int h = p.hbar_min; h <= p.hbar_max; ++h) {
    auto g = static_cast<std::size_t>(h - p.hbar_min);
    std::int64_t tau = s.trust().xi[g];
    std::int64_t d = top[g];
    if (tau != kNegInf) d = std::max(d, tau == kPosInf ? kPosInf : tau - 1);
    if (tau == kNegInf && d == kNegInf) continue;
    out.push_back({h, tau, d, mx[g], false});
  }
  std::int64_t beyond = s.trust().beyond;
  if (beyond != kNegInf)
    out.push_back({p.hbar_max + 1, beyond, beyond == kPosInf ? kPosInf : beyond - 1, INT_MAX, true});
  return out;
}

std::int64_t contribution(const GradeInfo& ga, const GradeInfo& gb, int n, bool star) {
  std::int64_t c = kNegInf;
  bool b_term_vanishes = star && gb.tau == kNegInf && !gb.beyond && n > gb.max_x;
  if (ga.tau != kNegInf && gb.dprime != kNegInf && !b_term_vanishes)
    c = std::max(c, sat_add(sat_add(ga.tau, gb.dprime), -n));
  if (gb.tau != kNegInf && ga.dprime != kNegInf)
    c = std::max(c, sat_add(sat_add(gb.tau, ga.dprime), -n));
  return c;
}

TrustRecord product_trust(const GradedSymbol& a, const GradedSymbol& b, ProductShape shape,
                          const TruncationPolicy& out, bool star) {
  TrustRecord r = TrustRecord::exact(out);
  r.t = std::min(a.trust().t, b.trust().t);
  auto ia = grade_infos(a);
  auto ib = grade_infos(b);
  auto raise = [&](int H, std::int64_t c) {
    if (c == kNegInf || H < out.hbar_min) return;
    if (H > out.hbar_max) {
      r.beyond = std::max(r.beyond, c);
      return;
    }
    auto& slot = r.xi[static_cast<std::size_t>(H - out.hbar_min)];
    slot = std::max(slot, c);
  };
  for (const auto& ga : ia) {
    for (const auto& gb : ib) {
      int base = ga.h + gb.h - shape.shift;
      if (ga.beyond || gb.beyond) {
        // Stands for every grade above hbar_max at once; the first derivative
        // order dominates.
        std::int64_t c = contribution(ga, gb, shape.n_min, false);
        for (int H = base + shape.n_min; H <= out.hbar_max; ++H) raise(H, c);
        r.beyond = std::max(r.beyond, c);
        continue;
      }
      int n_hi = shape.n_max >= 0 ? shape.n_max : std::max(shape.n_min, out.hbar_max + 1 - base);
      for (int n = shape.n_min; n <= n_hi; ++n) {
        int H = base + n;
        raise(H, contribution(ga, gb, n, star));
        if (H > out.hbar_max) break;
      }
    }
  }
  return r;
}

std::string rational_text(const Rational& c) { return format_rational(c); }

}  // namespace

// ---------------------------------------------------------------------------

GradedSymbol::GradedSymbol(const TruncationPolicy& policy)
    : policy_(policy), trust_(TrustRecord::exact(policy)) {}

bool GradedSymbol::has_log() const noexcept {
  return std::any_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.m.logxi != 0; });
}

bool GradedSymbol::is_hbar_free() const noexcept {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return t.m.h == 0; });
}

std::int64_t GradedSymbol::top_xi(int h) const noexcept {
  Monomial probe;
  probe.h = h;
  probe.xi = INT32_MAX;
  probe.logxi = 1;
  auto it = std::lower_bound(terms_.begin(), terms_.end(), probe,
                             [](const Term& t, const Monomial& m) { return CanonicalLess{}(t.m, m); });
  if (it == terms_.end() || it->m.h != h) return kNegInf;
  return it->m.xi;
}

std::int64_t GradedSymbol::top_xi() const noexcept {
  std::int64_t d = kNegInf;
  for (const auto& t : terms_) d = std::max<std::int64_t>(d, t.m.xi);
  return d;
}

int GradedSymbol::min_h() const noexcept { return terms_.empty() ? 0 : terms_.front().m.h; }
int GradedSymbol::max_h() const noexcept { return terms_.empty() ? 0 : terms_.back().m.h; }

int GradedSymbol::max_x() const noexcept {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t.m.x);
  return d;
}

std::int64_t GradedSymbol::xi_trust(int h) const noexcept {
  if (h < policy_.hbar_min) return kNegInf;
  if (h > policy_.hbar_max) return trust_.beyond;
  return trust_.xi[static_cast<std::size_t>(h - policy_.hbar_min)];
}

int GradedSymbol::hbar_trust() const noexcept {
  int H = policy_.hbar_min - 1;
  for (int h = policy_.hbar_min; h <= policy_.hbar_max; ++h) {
    if (xi_trust(h) == kPosInf) break;
    H = h;
  }
  return H;
}

bool GradedSymbol::trusted(const Monomial& m) const noexcept {
  if (m.t_degree() > trust_.t) return false;
  std::int64_t tau = xi_trust(m.h);
  return tau != kPosInf && m.xi >= tau;
}

Rational GradedSymbol::coefficient(const Monomial& m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, const Monomial& q) { return CanonicalLess{}(t.m, q); });
  if (it != terms_.end() && it->m == m) return it->c;
  return 0;
}

bool operator==(const GradedSymbol& a, const GradedSymbol& b) {
  if (!(a.policy_ == b.policy_) || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i)
    if (!(a.terms_[i].m == b.terms_[i].m) || a.terms_[i].c != b.terms_[i].c) return false;
  return true;
}

// ---------------------------------------------------------------------------

SymbolBuilder::SymbolBuilder(const TruncationPolicy& policy)
    : policy_(policy), dropped_below_(static_cast<std::size_t>(policy.num_grades()), 0) {}

bool SymbolBuilder::admit(const Monomial& m) {
  if (m.h > policy_.hbar_max) {
    dropped_above_ = std::max<std::int64_t>(dropped_above_, std::int64_t{m.xi} + 1);
    return false;
  }
  if (m.h < policy_.hbar_min)
    throw Error(ErrorCode::MonomialOutOfWindow, kModule, "accumulate",
                "ℏ-exponent " + std::to_string(m.h) + " below the window");
  if (m.logxi > 1) throw Error(ErrorCode::LogLogProduct, kModule, "accumulate", "log ξ squared");
  if (m.xi < policy_.xi_min) {
    dropped_below_[static_cast<std::size_t>(m.h - policy_.hbar_min)] = 1;
    return false;
  }
  int d = 0;
  for (int j = 0; j < kMaxTimes; ++j) {
    if (m.t[j] != 0 && j >= policy_.num_times)
      throw Error(ErrorCode::TimeIndexOutOfRange, kModule, "accumulate",
                  "t_" + std::to_string(j + 1) + " with T=" + std::to_string(policy_.num_times));
    d += m.t[j];
  }
  if (d > policy_.t_total_max) {
    dropped_t_ = true;
    return false;
  }
  return true;
}

void SymbolBuilder::add(const Monomial& m, const Rational& c) {
  if (sgn(c) == 0 || !admit(m)) return;
  acc_[m] += c;
}

void SymbolBuilder::add_product(const Monomial& m, const Rational& c1, const Rational& c2) {
  if (!admit(m)) return;
  acc_[m] += c1 * c2;
}

GradedSymbol SymbolBuilder::finish(TrustRecord bound) && {
  GradedSymbol s(policy_);
  if (bound.xi.empty()) bound = TrustRecord::exact(policy_);
  if (bound.xi.size() != static_cast<std::size_t>(policy_.num_grades()))
    throw Error(ErrorCode::PolicyMismatch, kModule, "finish", "trust record does not match the window");
  for (std::size_t g = 0; g < dropped_below_.size(); ++g)
    if (dropped_below_[g]) bound.xi[g] = std::max<std::int64_t>(bound.xi[g], policy_.xi_min);
  s.terms_.reserve(acc_.size());
  for (auto& [m, c] : acc_) {
    if (sgn(c) == 0) continue;
    if (m.x > policy_.x_max) {
      auto& slot = bound.xi[static_cast<std::size_t>(m.h - policy_.hbar_min)];
      slot = std::max<std::int64_t>(slot, std::int64_t{m.xi} + 1);
      continue;
    }
    s.terms_.push_back({m, std::move(c)});
  }
  bound.beyond = std::max(bound.beyond, dropped_above_);
  if (dropped_t_) bound.t = std::min<std::int64_t>(bound.t, policy_.t_total_max);
  std::sort(s.terms_.begin(), s.terms_.end(),
            [](const Term& a, const Term& b) { return CanonicalLess{}(a.m, b.m); });
  s.trust_ = std::move(bound);
  acc_.clear();
  return s;
}

// ---------------------------------------------------------------------------

TrustRecord combine_trust(const GradedSymbol& a, const GradedSymbol& b, ProductShape shape,
                          const TruncationPolicy& out) {
  return product_trust(a, b, shape, out, false);
}

TrustRecord star_trust(const GradedSymbol& a, const GradedSymbol& b, const TruncationPolicy& out) {
  return product_trust(a, b, kStarShape, out, true);
}

TrustRecord sum_trust(const GradedSymbol& a, const GradedSymbol& b) {
  TrustRecord r = a.trust();
  const auto& tb = b.trust();
  for (std::size_t g = 0; g < r.xi.size(); ++g) r.xi[g] = std::max(r.xi[g], tb.xi[g]);
  r.beyond = std::max(r.beyond, tb.beyond);
  r.t = std::min(r.t, tb.t);
  return r;
}

GradedSymbol make_symbol(std::span<const Term> entries, const TruncationPolicy& policy) {
  policy.validate();
  SymbolBuilder b(policy);
  for (const auto& e : entries) {
    if (!policy.contains(e.m))
      throw Error(ErrorCode::MonomialOutOfWindow, kModule, "make_symbol",
                  "monomial " + format_monomial(e.m) + " outside the window");
    b.add(e.m, e.c);
  }
  return std::move(b).finish(TrustRecord::exact(policy));
}

GradedSymbol make_symbol(std::initializer_list<Term> entries, const TruncationPolicy& policy) {
  return make_symbol(std::span<const Term>(entries.begin(), entries.size()), policy);
}

GradedSymbol constant(const Rational& c, const TruncationPolicy& policy) {
  return make_symbol({Term{mono(0, 0), c}}, policy);
}

GradedSymbol zeta_symbol(const TruncationPolicy& policy) {
  SymbolBuilder b(policy);
  for (int n = 1; n <= policy.num_times; ++n) {
    Monomial m = mono(0, n);
    m.t[static_cast<std::size_t>(n - 1)] = 1;
    b.add(m, 1);
  }
  return std::move(b).finish(TrustRecord::exact(policy));
}

GradedSymbol add(const GradedSymbol& a, const GradedSymbol& b) {
  require_same_policy(a, b, "add");
  SymbolBuilder out(a.policy());
  for (const auto& t : a.terms()) out.add(t.m, t.c);
  for (const auto& t : b.terms()) out.add(t.m, t.c);
  return std::move(out).finish(sum_trust(a, b));
}

GradedSymbol sub(const GradedSymbol& a, const GradedSymbol& b) {
  require_same_policy(a, b, "sub");
  SymbolBuilder out(a.policy());
  for (const auto& t : a.terms()) out.add(t.m, t.c);
  for (const auto& t : b.terms()) out.add(t.m, -t.c);
  return std::move(out).finish(sum_trust(a, b));
}

GradedSymbol neg(const GradedSymbol& a) { return scale(a, -1); }

GradedSymbol scale(const GradedSymbol& a, const Rational& c) {
  SymbolBuilder out(a.policy());
  for (const auto& t : a.terms()) out.add_product(t.m, t.c, c);
  return std::move(out).finish(a.trust());
}

GradedSymbol mul(const GradedSymbol& a, const GradedSymbol& b) {
  require_same_policy(a, b, "mul");
  if (a.has_log() && b.has_log())
    throw Error(ErrorCode::LogLogProduct, kModule, "mul", "both factors carry log ξ");
  const auto& p = a.policy();
  SymbolBuilder out(p);
  const std::int64_t b_top = b.top_xi();
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      if (ta.m.h + tb.m.h > p.hbar_max) {
        out.note_dropped_above(ta.m.xi + b_top);
        break;
      }
      out.add_product(times(ta.m, tb.m), ta.c, tb.c);
    }
  }
  return std::move(out).finish(combine_trust(a, b, kCommutativeShape, p));
}

GradedSymbol power(const GradedSymbol& a, unsigned n) {
  GradedSymbol r = constant(1, a.policy());
  for (unsigned i = 0; i < n; ++i) r = mul(r, a);
  return r;
}

GradedSymbol mul_hbar_power(const GradedSymbol& a, int k) {
  const auto& p = a.policy();
  TrustRecord tr = TrustRecord::exact(p);
  for (int H = p.hbar_min; H <= p.hbar_max; ++H)
    tr.xi[static_cast<std::size_t>(H - p.hbar_min)] = a.xi_trust(H - k);
  tr.beyond = a.trust().beyond;
  if (k < 0)
    for (int h = p.hbar_max + k + 1; h <= p.hbar_max; ++h)
      tr.beyond = std::max(tr.beyond, a.xi_trust(h));
  tr.t = a.trust().t;
  SymbolBuilder out(p);
  for (const auto& t : a.terms()) {
    Monomial m = t.m;
    m.h += k;
    out.add(m, t.c);
  }
  return std::move(out).finish(tr);
}

// ---------------------------------------------------------------------------

GradedSymbol partial(const GradedSymbol& a, Var var, int j) {
  switch (var) {
    case Var::X: return partial_x(a);
    case Var::Xi: return partial_xi(a);
    case Var::T: return partial_t(a, j);
  }
  return a;
}

GradedSymbol partial_x(const GradedSymbol& a) { return partial_x_n(a, 1); }
GradedSymbol partial_xi(const GradedSymbol& a) { return partial_xi_n(a, 1); }

GradedSymbol partial_t(const GradedSymbol& a, int j) {
  const auto& p = a.policy();
  if (j < 1 || j > p.num_times)
    throw Error(ErrorCode::TimeIndexOutOfRange, kModule, "partial",
                "t_" + std::to_string(j) + " with T=" + std::to_string(p.num_times));
  auto idx = static_cast<std::size_t>(j - 1);
  SymbolBuilder out(p);
  for (const auto& t : a.terms()) {
    if (t.m.t[idx] == 0) continue;
    Monomial m = t.m;
    --m.t[idx];
    out.add_product(m, t.c, Rational(t.m.t[idx]));
  }
  TrustRecord tr = a.trust();
  tr.t = shifted(tr.t, -1);
  return std::move(out).finish(tr);
}

GradedSymbol partial_x_n(const GradedSymbol& a, int n) {
  SymbolBuilder out(a.policy());
  for (const auto& t : a.terms()) {
    if (t.m.x < n) continue;
    Monomial m = t.m;
    m.x -= n;
    out.add_product(m, t.c, falling(t.m.x, n));
  }
  return std::move(out).finish(a.trust());
}

GradedSymbol partial_xi_n(const GradedSymbol& a, int n) {
  if (n == 0) return a;
  SymbolBuilder out(a.policy());
  bool mixed_log = false;
  for (const auto& t : a.terms()) {
    if (t.m.logxi == 0) {
      Rational f = falling(t.m.xi, n);
      if (sgn(f) == 0) continue;
      Monomial m = t.m;
      m.xi -= n;
      out.add_product(m, t.c, f);
    } else if (t.m.xi == 0) {
      Monomial m = t.m;
      m.logxi = 0;
      m.xi = -n;
      Rational f = factorial(static_cast<unsigned>(n - 1));
      if (n % 2 == 0) f = -f;
      out.add_product(m, t.c, f);
    } else {
      mixed_log = true;
    }
  }
  if (mixed_log) {
    // ξ^k log ξ with k ≠ 0 only arises from commutative products; differentiate
    // one step at a time.
    GradedSymbol r = a;
    for (int i = 0; i < n; ++i) {
      SymbolBuilder step(a.policy());
      for (const auto& t : r.terms()) {
        if (t.m.logxi == 1) {
          Monomial m = t.m;
          m.logxi = 0;
          m.xi -= 1;
          step.add(m, t.c);
          if (t.m.xi != 0) {
            Monomial q = t.m;
            q.xi -= 1;
            step.add_product(q, t.c, Rational(t.m.xi));
          }
        } else if (t.m.xi != 0) {
          Monomial m = t.m;
          m.xi -= 1;
          step.add_product(m, t.c, Rational(t.m.xi));
        }
      }
      r = std::move(step).finish(shift_xi_trust(r.trust(), -1));
    }
    return r;
  }
  return std::move(out).finish(shift_xi_trust(a.trust(), -n));
}

GradedSymbol xi_antiderivative(const GradedSymbol& a) {
  SymbolBuilder out(a.policy());
  for (const auto& t : a.terms()) {
    if (t.m.logxi != 0 || t.m.xi >= 0)
      throw Error(ErrorCode::NonNegativePowerInIntegrand, kModule, "xi_antiderivative",
                  "term " + format_monomial(t.m) + " has no admissible antiderivative");
    Monomial m = t.m;
    if (t.m.xi == -1) {
      m.xi = 0;
      m.logxi = 1;
      out.add(m, t.c);
    } else {
      m.xi += 1;
      out.add(m, t.c / Rational(t.m.xi + 1));
    }
  }
  return std::move(out).finish(shift_xi_trust(a.trust(), 1));
}

GradedSymbol hbar_component(const GradedSymbol& a, int n) {
  const auto& p = a.policy();
  TrustRecord tr = TrustRecord::exact(p);
  if (0 >= p.hbar_min && 0 <= p.hbar_max) tr.xi[static_cast<std::size_t>(-p.hbar_min)] = a.xi_trust(n);
  tr.t = a.trust().t;
  SymbolBuilder out(p);
  for (const auto& t : a.terms()) {
    if (t.m.h != n) continue;
    Monomial m = t.m;
    m.h = 0;
    out.add(m, t.c);
  }
  return std::move(out).finish(tr);
}

GradedSymbol xi_project(const GradedSymbol& a, XiPart part) {
  SymbolBuilder out(a.policy());
  for (const auto& t : a.terms()) {
    if (t.m.logxi != 0) {
      if (part == XiPart::Negative)
        throw Error(ErrorCode::LogInProjection, kModule, "xi_project",
                    "log ξ term has no well-defined negative part");
      continue;
    }
    if ((t.m.xi >= 0) == (part == XiPart::NonNegative)) out.add(t.m, t.c);
  }
  TrustRecord tr = a.trust();
  auto adjust = [part](std::int64_t v) -> std::int64_t {
    if (part == XiPart::NonNegative) return v <= 0 ? kNegInf : v;
    return std::min<std::int64_t>(v, 0);
  };
  for (auto& v : tr.xi) v = adjust(v);
  tr.beyond = adjust(tr.beyond);
  return std::move(out).finish(tr);
}

GradedSymbol t_degree_part(const GradedSymbol& a, int d) {
  SymbolBuilder out(a.policy());
  for (const auto& t : a.terms())
    if (t.m.t_degree() == d) out.add(t.m, t.c);
  return std::move(out).finish(a.trust());
}

GradedSymbol xi_coefficient(const GradedSymbol& a, int k) {
  SymbolBuilder out(a.policy());
  for (const auto& t : a.terms()) {
    if (t.m.logxi != 0 || t.m.xi != k) continue;
    Monomial m = t.m;
    m.xi = 0;
    out.add(m, t.c);
  }
  TrustRecord tr = a.trust();
  auto adjust = [k](std::int64_t v) { return v == kNegInf || k >= v ? kNegInf : kPosInf; };
  for (auto& v : tr.xi) v = adjust(v);
  tr.beyond = adjust(tr.beyond);
  return std::move(out).finish(tr);
}

GradedSymbol mul_xi_power(const GradedSymbol& a, int k) {
  SymbolBuilder out(a.policy());
  for (const auto& t : a.terms()) {
    Monomial m = t.m;
    m.xi += k;
    out.add(m, t.c);
  }
  return std::move(out).finish(shift_xi_trust(a.trust(), k));
}

GradedSymbol limit_xi_trust(const GradedSymbol& a, std::int64_t tau) {
  SymbolBuilder out(a.policy());
  for (const auto& t : a.terms()) out.add(t.m, t.c);
  TrustRecord tr = a.trust();
  for (auto& v : tr.xi) v = std::max(v, tau);
  return std::move(out).finish(tr);
}

GradedSymbol limit_xi_trust(const GradedSymbol& a, std::int64_t tau, int h) {
  SymbolBuilder out(a.policy());
  for (const auto& t : a.terms()) out.add(t.m, t.c);
  TrustRecord tr = a.trust();
  if (h >= a.policy().hbar_min && h <= a.policy().hbar_max) {
    auto& v = tr.xi[static_cast<std::size_t>(h - a.policy().hbar_min)];
    v = std::max(v, tau);
  }
  return std::move(out).finish(tr);
}

GradedSymbol limit_t_trust(const GradedSymbol& a, std::int64_t d) {
  SymbolBuilder out(a.policy());
  for (const auto& t : a.terms()) out.add(t.m, t.c);
  TrustRecord tr = a.trust();
  tr.t = std::min(tr.t, d);
  return std::move(out).finish(tr);
}

GradedSymbol at_x_zero(const GradedSymbol& a) {
  SymbolBuilder out(a.policy());
  for (const auto& t : a.terms())
    if (t.m.x == 0) out.add(t.m, t.c);
  return std::move(out).finish(a.trust());
}

GradedSymbol log_coefficient(const GradedSymbol& a) {
  SymbolBuilder out(a.policy());
  for (const auto& t : a.terms()) {
    if (t.m.logxi == 0) continue;
    Monomial m = t.m;
    m.logxi = 0;
    out.add(m, t.c);
  }
  return std::move(out).finish(a.trust());
}

GradedSymbol with_policy(const GradedSymbol& a, const TruncationPolicy& policy) {
  policy.validate();
  TrustRecord tr = TrustRecord::exact(policy);
  for (int H = policy.hbar_min; H <= policy.hbar_max; ++H)
    tr.xi[static_cast<std::size_t>(H - policy.hbar_min)] = a.xi_trust(H);
  tr.beyond = a.trust().beyond;
  for (int h = policy.hbar_max + 1; h <= a.policy().hbar_max; ++h)
    tr.beyond = std::max(tr.beyond, a.xi_trust(h));
  tr.t = a.trust().t;
  SymbolBuilder out(policy);
  for (const auto& t : a.terms()) out.add(t.m, t.c);
  return std::move(out).finish(tr);
}

GradedSymbol restrict_times(const GradedSymbol& a, int T) {
  TruncationPolicy p = a.policy();
  p.num_times = std::min(p.num_times, T);
  TrustRecord tr = a.trust();
  SymbolBuilder out(p);
  for (const auto& t : a.terms())
    if (std::all_of(t.m.t.begin() + p.num_times, t.m.t.end(), [](auto e) { return e == 0; })) out.add(t.m, t.c);
  return std::move(out).finish(tr);
}

GradedSymbol trusted_part(const GradedSymbol& a) {
  SymbolBuilder out(a.policy());
  for (const auto& t : a.terms())
    if (a.trusted(t.m)) out.add(t.m, t.c);
  return std::move(out).finish(a.trust());
}

bool is_zero_within_trust(const GradedSymbol& a) {
  return std::none_of(a.terms().begin(), a.terms().end(),
                      [&a](const Term& t) { return a.trusted(t.m); });
}

std::int64_t trusted_cells(const GradedSymbol& a, int xi_cap) {
  const auto& p = a.policy();
  std::int64_t n = 0;
  for (int h = p.hbar_min; h <= p.hbar_max; ++h) {
    std::int64_t tau = a.xi_trust(h);
    if (tau == kPosInf) continue;
    std::int64_t lo = std::max<std::int64_t>(tau, p.xi_min);
    if (xi_cap >= lo) n += xi_cap - lo + 1;
  }
  return n;
}

// ---------------------------------------------------------------------------

namespace {

bool rational_root(const mpz_class& v, unsigned long k, mpz_class& out) {
  if (v < 0 && k % 2 == 0) return false;
  return mpz_root(out.get_mpz_t(), v.get_mpz_t(), k) != 0;
}

Rational rational_power(const Rational& c, const Rational& p, const char* op) {
  mpz_class num = p.get_num(), den = p.get_den();
  Rational base = c;
  if (den != 1) {
    mpz_class rn, rd;
    if (!den.fits_ulong_p() || !rational_root(c.get_num(), den.get_ui(), rn) ||
        !rational_root(c.get_den(), den.get_ui(), rd))
      throw Error(ErrorCode::InvalidArgument, kModule, op,
                  "leading coefficient " + format_rational(c) + " has no rational root of order " +
                      den.get_str());
    base = Rational(rn, rd);
  }
  if (!num.fits_slong_p()) throw Error(ErrorCode::InvalidArgument, kModule, op, "exponent too large");
  long e = num.get_si();
  Rational r = 1;
  Rational b = e < 0 ? Rational(1) / base : base;
  for (long i = 0; i < std::labs(e); ++i) r *= b;
  return r;
}

GradedSymbol check_negative_series_arg(const GradedSymbol& r, const char* op) {
  for (const auto& t : r.terms())
    if (t.m.logxi != 0 || t.m.xi >= 0)
      throw Error(ErrorCode::InvalidArgument, kModule, op,
                  "argument term " + format_monomial(t.m) + " is not of negative ξ-degree");
  return r;
}

GradedSymbol power_sum(const GradedSymbol& r, const std::function<Rational(int)>& coeff) {
  SymbolBuilder zero(r.policy());
  GradedSymbol sum = std::move(zero).finish(TrustRecord::exact(r.policy()));
  GradedSymbol rk = r;
  int limit = std::max(1, 1 - r.policy().xi_min);
  for (int k = 1; k <= limit; ++k) {
    sum = add(sum, scale(rk, coeff(k)));
    if (rk.is_zero()) break;
    rk = mul(rk, r);
  }
  return sum;
}

}  // namespace

GradedSymbol laurent_power(const GradedSymbol& a, const Rational& p) {
  const char* op = "laurent_power";
  if (a.is_zero() || a.has_log())
    throw Error(ErrorCode::InvalidArgument, kModule, op, "argument must be nonzero and log-free");
  std::int64_t D = a.top_xi();
  Monomial lead = mono(0, static_cast<int>(D));
  Rational c = a.coefficient(lead);
  if (sgn(c) == 0 || !a.trusted(lead))
    throw Error(ErrorCode::InvalidArgument, kModule, op, "leading term must be an exact constant at ℏ⁰");
  for (const auto& t : a.terms())
    if (t.m.xi == D && !(t.m == lead))
      throw Error(ErrorCode::InvalidArgument, kModule, op,
                  "leading ξ-degree shared by " + format_monomial(t.m));
  Rational Dp = p * Rational(D);
  if (Dp.get_den() != 1)
    throw Error(ErrorCode::InvalidArgument, kModule, op, "non-integral result degree");
  int out_deg = static_cast<int>(Dp.get_num().get_si());
  Rational cp = rational_power(c, p, op);

  TruncationPolicy work = a.policy();
  work.xi_min = a.policy().xi_min - static_cast<int>(std::abs(D)) - std::abs(out_deg);
  GradedSymbol aw = with_policy(a, work);
  GradedSymbol r = scale(mul_xi_power(sub(aw, make_symbol({Term{lead, c}}, work)), -static_cast<int>(D)),
                         Rational(1) / c);
  GradedSymbol series = power_sum(r, [&p](int k) -> Rational {
    Rational b = 1;
    for (int i = 0; i < k; ++i) b *= (p - i) / Rational(i + 1);
    return b;
  });
  GradedSymbol one = constant(1, work);
  GradedSymbol full = mul_xi_power(scale(add(one, series), cp), out_deg);
  return with_policy(full, a.policy());
}

GradedSymbol laurent_inverse(const GradedSymbol& a) { return laurent_power(a, -1); }

GradedSymbol log1p_series(const GradedSymbol& r) {
  check_negative_series_arg(r, "log1p_series");
  return power_sum(r, [](int k) -> Rational { return Rational(k % 2 == 1 ? 1 : -1, k); });
}

GradedSymbol expm1_series(const GradedSymbol& r) {
  check_negative_series_arg(r, "expm1_series");
  return power_sum(r, [](int k) -> Rational { return Rational(1) / factorial(static_cast<unsigned>(k)); });
}

// ---------------------------------------------------------------------------

std::string format_monomial(const Monomial& m) {
  std::ostringstream os;
  bool first = true;
  auto factor = [&](const std::string& name, int e) {
    if (e == 0) return;
    if (!first) os << '*';
    first = false;
    os << name;
    if (e != 1) os << '^' << e;
  };
  factor("h", m.h);
  factor("xi", m.xi);
  factor("log(xi)", m.logxi);
  factor("x", m.x);
  for (int j = 0; j < kMaxTimes; ++j) factor("t" + std::to_string(j + 1), m.t[j]);
  if (first) os << '1';
  return os.str();
}

std::string to_string(const GradedSymbol& a) {
  if (a.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (const auto& t : a.terms()) {
    Rational c = t.c;
    if (!first) {
      s += sgn(c) < 0 ? " - " : " + ";
      c = abs(c);
    } else if (sgn(c) < 0) {
      s += "-";
      c = abs(c);
    }
    first = false;
    std::string mono_text = format_monomial(t.m);
    if (mono_text == "1") {
      s += rational_text(c);
    } else if (c == 1) {
      s += mono_text;
    } else {
      s += rational_text(c) + "*" + mono_text;
    }
  }
  return s;
}

}  // namespace hbarkp
