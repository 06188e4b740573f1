#include "hbarkp/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <string>

#include "hbarkp/calculus.hpp"
#include "hbarkp/dkp.hpp"
#include "hbarkp/oracle.hpp"
#include "hbarkp/tau.hpp"
#include "hbarkp/wkb.hpp"

namespace hbarkp {

namespace {

constexpr const char* kModule = "cli";

int log_level() {
  const char* v = std::getenv("HBARKP_LOG");
  if (v == nullptr) return 0;
  std::string s(v);
  if (s == "debug" || s == "2") return 2;
  if (s == "info" || s == "1") return 1;
  return 0;
}

class Stage {
 public:
  explicit Stage(std::string name) : name_(std::move(name)), start_(std::chrono::steady_clock::now()) {
    if (log_level() >= 2) std::clog << "[hbarkp] " << name_ << " ...\n";
  }
  ~Stage() {
    if (log_level() >= 1)
      std::clog << "[hbarkp] " << name_ << " "
                << std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count() << " s\n";
  }

 private:
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

bool wants(const ProblemSpec& spec, const std::string& task) {
  for (const auto& t : spec.tasks)
    if (t == task || t == "verify-all") return true;
  return false;
}

Json bools(const std::vector<bool>& v) {
  Json out = Json::array();
  for (bool b : v) out.push_back(b);
  return out;
}

bool all_of(const std::vector<bool>& v) { return std::all_of(v.begin(), v.end(), [](bool b) { return b; }); }

Json check_failure(const std::string& module, const std::string& check, const std::string& detail) {
  return {{"module", module}, {"check", check}, {"detail", detail}};
}

Json polynomial_to_json(const GradedSymbol& p) {
  Json out = Json::array();
  const int T = p.policy().num_times;
  for (const auto& t : p.terms()) {
    Json times = Json::array();
    for (int j = 0; j < T; ++j) times.push_back(t.m.t[static_cast<std::size_t>(j)]);
    out.push_back({{"t", std::move(times)}, {"c", format_rational(t.c)}});
  }
  return out;
}

/// Rows (n, ξ-degree, t-multidegree) of the phase tables.
Json phase_table(const WkbPhase& phase) {
  Json out = Json::array();
  for (std::size_t n = 0; n < phase.S.size(); ++n) {
    const auto& S = phase.S[n];
    const int T = S.policy().num_times;
    for (const auto& t : S.terms()) {
      if (!S.trusted(t.m)) continue;
      Json times = Json::array();
      for (int j = 0; j < T; ++j) times.push_back(t.m.t[static_cast<std::size_t>(j)]);
      out.push_back({{"n", n}, {"xi", t.m.xi}, {"x", t.m.x}, {"t", std::move(times)}, {"c", format_rational(t.c)}});
    }
  }
  return out;
}

struct Checked {
  Json checks = Json::object();
  Json failures = Json::array();
};

void check_list(Checked& c, const std::string& module, const std::string& name, const std::vector<bool>& ok,
                const std::function<std::string(int)>& why) {
  c.checks[name] = bools(ok);
  for (std::size_t k = 0; k < ok.size(); ++k)
    if (!ok[k]) c.failures.push_back(check_failure(module, name, why(static_cast<int>(k))));
}

bool grade_certified(const GradedSymbol& r, int k) { return r.xi_trust(k) <= -1 && r.trust().t >= 0; }

void check_flag(Checked& c, const std::string& module, const std::string& name, bool ok, const std::string& detail) {
  c.checks[name] = ok;
  if (!ok) c.failures.push_back(check_failure(module, name, detail));
}

// ---------------------------------------------------------------------------
// Tables.

GradedSymbol exact_restriction(const GradedSymbol& a, const TruncationPolicy& w) {
  std::vector<Term> kept;
  for (const auto& t : a.terms())
    if (w.contains(t.m)) kept.push_back(t);
  return make_symbol(kept, w);
}

TruncationPolicy deep_window(const TruncationPolicy& w) {
  TruncationPolicy d = w;
  d.xi_min = 2 * w.xi_min - 4;
  d.x_max = w.x_max + 4;
  return d;
}

/// The cells of `a` inside w, after checking a certifies every one of them.
Json table_cells(const GradedSymbol& a, const TruncationPolicy& w, bool certify, const std::string& name) {
  if (certify) {
    for (int h = 0; h <= w.hbar_max; ++h)
      if (a.xi_trust(h) > w.xi_min)
        throw Error(ErrorCode::TrustUnderflow, kModule, "tables",
                    name + " is certified only from ξ^" + std::to_string(a.xi_trust(h)) + " at ℏ^" + std::to_string(h));
    if (a.trust().t < w.t_total_max)
      throw Error(ErrorCode::TrustUnderflow, kModule, "tables", name + " is not certified to full t-degree");
  }
  std::vector<Term> kept;
  for (const auto& t : a.terms())
    if (t.m.h >= 0 && w.contains(t.m)) {
      Monomial m = t.m;
      kept.push_back({m, t.c});
    }
  return symbol_to_json(make_symbol(kept, w));
}

struct TableInputs {
  TruncationPolicy window;
  TruncationPolicy deep;
  GradedSymbol f, g, X0;
};

TableInputs table_inputs(const ProblemSpec& spec) {
  TruncationPolicy w = table_window(spec.policy);
  TruncationPolicy d = deep_window(w);
  auto embed = [&](const GradedSymbol& a) {
    return exact_restriction(with_policy(restrict_times(a, w.num_times), d), w);
  };
  return {w, d, embed(spec.f), embed(spec.g), embed(spec.X0)};
}

int brackets_needed(const GradedSymbol& b, const TruncationPolicy& d) {
  std::int64_t top = std::max<std::int64_t>(b.top_xi(), 0);
  return static_cast<int>((top - d.xi_min) / 2) + 2;
}

Json assemble_tables(const TruncationPolicy& w, const GradedSymbol& fg, const GradedSymbol& gf, const GradedSymbol& cf,
                     const GradedSymbol& cg, const std::vector<GradedSymbol>& S, bool certify) {
  Json tables;
  tables["window"] = {{"hbar_max", w.hbar_max}, {"xi_min", w.xi_min}, {"t_total_max", w.t_total_max},
                      {"x_max", w.x_max}, {"T", w.num_times}};
  tables["star"] = {{"f*g", table_cells(fg, w, certify, "f∘g")}, {"g*f", table_cells(gf, w, certify, "g∘f")}};
  tables["conjugation"] = {{"f", table_cells(cf, w, certify, "Ad f")}, {"g", table_cells(cg, w, certify, "Ad g")}};
  Json phase = Json::array();
  for (std::size_t n = 0; n < S.size(); ++n)
    phase.push_back({{"n", n}, {"S", table_cells(S[n], w, certify, "S_" + std::to_string(n))}});
  tables["phase"] = std::move(phase);
  return tables;
}

}  // namespace

bool fits_oracle_limits(const TruncationPolicy& p) {
  return p.hbar_max <= 3 && p.xi_min >= -6 && p.t_total_max <= 2 && p.x_max <= 6 && p.num_times <= 3;
}

TruncationPolicy table_window(const TruncationPolicy& p) {
  TruncationPolicy w = p;
  w.hbar_max = std::min(w.hbar_max, 3);
  w.xi_min = std::max(w.xi_min, -6);
  w.t_total_max = std::min(w.t_total_max, 2);
  w.x_max = std::min(w.x_max, 6);
  w.num_times = std::min(w.num_times, 3);
  return w;
}

Json engine_tables(const ProblemSpec& spec) {
  Stage stage("engine tables");
  TableInputs in = table_inputs(spec);
  GradedSymbol f = with_policy(in.f, in.deep), g = with_policy(in.g, in.deep), X0 = with_policy(in.X0, in.deep);
  GradedSymbol cf = f, cg = g;
  if (!X0.is_zero()) {
    ExpGenerator gen = ExpGenerator::neg_order(X0);
    cf = ad_exp(gen, f);
    cg = ad_exp(gen, g);
  }
  std::vector<GradedSymbol> S;
  for (const auto& s : x_to_s(in.X0).S) S.push_back(with_policy(s, in.window));
  return assemble_tables(in.window, star_mul(f, g), star_mul(g, f), cf, cg, S, true);
}

Json oracle_tables(const ProblemSpec& spec, bool clamp) {
  if (!clamp && !fits_oracle_limits(spec.policy))
    throw Error(ErrorCode::WindowTooLarge, kModule, "oracle",
                "window exceeds hbar_max ≤ 3, xi_min ≥ −6, t_total_max ≤ 2, x_max ≤ 6, T ≤ 3");
  Stage stage("oracle tables");
  TableInputs in = table_inputs(spec);
  GradedSymbol f = with_policy(in.f, in.deep), g = with_policy(in.g, in.deep), X0 = with_policy(in.X0, in.deep);
  GradedSymbol cf = oracle::conjugate_by_commutators(X0, f, brackets_needed(f, in.deep));
  GradedSymbol cg = oracle::conjugate_by_commutators(X0, g, brackets_needed(g, in.deep));
  std::vector<GradedSymbol> S;
  if (in.X0.is_zero()) {
    S.assign(static_cast<std::size_t>(in.window.hbar_max + 1), make_symbol({}, in.window));
  } else {
    GradedSymbol full = oracle::phase(in.X0, exponential_policy(phase_policy(in.X0)));
    for (int n = 0; n <= in.window.hbar_max; ++n)
      S.push_back(exact_restriction(hbar_component(full, n), in.window));
  }
  return assemble_tables(in.window, oracle::star(f, g), oracle::star(g, f), cf, cg, S, false);
}

Json failure_record(const Error& e) {
  Json r = {{"module", e.module()}, {"operation", e.operation()}, {"code", std::string(error_code_name(e.code()))}};
  r["grade"] = e.grade() ? Json(*e.grade()) : Json(nullptr);
  r["detail"] = e.detail();
  return r;
}

RunOutcome run_pipeline(const ProblemSpec& spec_in, const RunOptions& options) {
  ProblemSpec spec = spec_in;
  if (options.depth) {
    if (*options.depth < 0 || *options.depth > spec.policy.hbar_max)
      throw Error(ErrorCode::SpecParseError, kModule, "run", "--depth must lie in 0..hbar_max");
    spec.N = *options.depth;
  }
  const TruncationPolicy& p = spec.policy;
  const bool payload = !options.verify_only;
  Json report;
  report["spec"] = {{"T", p.num_times},
                    {"trunc", {{"hbar_max", p.hbar_max}, {"xi_min", p.xi_min}, {"t_total_max", p.t_total_max},
                               {"x_max", p.x_max}}},
                    {"N", spec.N},
                    {"tasks", spec.tasks}};
  Json failures = Json::array();
  auto absorb = [&](const char* section, Checked&& c) {
    report[section]["checks"] = std::move(c.checks);
    for (auto& f : c.failures) failures.push_back(std::move(f));
  };

  try {
    if (wants(spec, "validate-seed")) {
      Stage stage("validate-seed");
      Checked c;
      DkpDressing d = dkp_dress({spec.X0, spec.alpha0}, true);
      auto [rf, rg] = dkp_rh_residual(hbar_component(spec.f, 0), hbar_component(spec.g, 0), d.L, d.M);
      check_flag(c, "dkp", "dkp_rh", is_zero_within_trust(rf) && is_zero_within_trust(rg),
                 "f0(𝓜,𝓛)₋ = " + to_string(trusted_part(rf)) + ", g0(𝓜,𝓛)₋ = " + to_string(trusted_part(rg)));
      std::vector<bool> lax;
      for (int n = 1; n <= p.num_times; ++n) lax.push_back(is_zero_within_trust(dkp_lax_residual(d.L, n)));
      check_list(c, "dkp", "dkp_lax", lax, [](int k) { return "n = " + std::to_string(k + 1) + " is nonzero"; });
      report["seed"] = Json::object();
      absorb("seed", std::move(c));
    }

    const bool need_solve = wants(spec, "solve") || wants(spec, "wkb") || wants(spec, "tau");
    if (need_solve) {
      RHProblem problem = to_problem(spec);
      DressingData data = [&] {
        Stage stage("solve");
        return solve(problem);
      }();
      LaxPair lax = build_lax(data, true, p);
      {
        Stage stage("solve checks");
        Checked c;
        Json orders = Json::array();
        for (int i = 0; i <= spec.N; ++i) {
          Json o = {{"i", i}, {"alpha_i", format_rational(data.alpha[static_cast<std::size_t>(i)])}};
          if (payload) o["X_i"] = symbol_to_json(data.X[static_cast<std::size_t>(i)]);
          o["residual_grades_ok"] = bools(data.residual_ok[static_cast<std::size_t>(i)]);
          orders.push_back(std::move(o));
        }
        report["solve"]["orders"] = std::move(orders);
        auto [P, Q] = residual_rh(problem, data);
        std::vector<bool> rh = vanishing_grades(P, spec.N), rq = vanishing_grades(Q, spec.N);
        for (std::size_t k = 0; k < rh.size(); ++k) rh[k] = rh[k] && rq[k];
        check_list(c, "rh", "residual_rh", rh, [&](int k) {
          bool certified = grade_certified(P, k) && grade_certified(Q, k);
          return "grade " + std::to_string(k) + (certified ? " is nonzero" : " is not certified");
        });
        std::vector<bool> lx;
        for (int n = 1; n <= p.num_times; ++n) lx.push_back(is_zero_within_trust(residual_lax(lax.L, n)));
        check_list(c, "rh", "residual_lax", lx, [](int k) { return "n = " + std::to_string(k + 1) + " is nonzero"; });
        GradedSymbol ccr = residual_ccr(lax.L, lax.M);
        check_flag(c, "rh", "residual_ccr", is_zero_within_trust(ccr), "[L, M] − ℏ = " + to_string(trusted_part(ccr)));
        absorb("solve", std::move(c));
      }

      if (wants(spec, "wkb") || wants(spec, "tau")) {
        std::optional<WaveData> wave;
        {
          Stage stage("wkb");
          Checked w;
          wave = wave_function(data, true);
          if (payload) report["wkb"]["S"] = phase_table(wave->phase);
          if (wants(spec, "wkb")) {
            GradedSymbol X = assemble_X(data.X, spec.N);
            GradedSymbol back = with_policy(s_to_x(x_to_s(X)), p);
            check_flag(w, "wkb", "roundtrip", is_zero_within_trust(sub(back, X)), "s_to_x ∘ x_to_s moved X");
            GradedSymbol lin = wave_linear_residual(lax.L, X);
            check_flag(w, "wkb", "wave_linear", is_zero_within_trust(lin), "LΨ − zΨ = " + to_string(trusted_part(lin)));
            absorb("wkb", std::move(w));
          }
        }

        if (wants(spec, "tau")) {
          Stage stage("tau");
          Checked t;
          bool integrable = true;
          TauExpansion tau;
          try {
            tau = tau_expansion(wave->phase);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::NotIntegrable) throw;
            integrable = false;
            failures.push_back(failure_record(e));
          }
          t.checks["integrability"] = integrable;
          if (integrable) {
            if (payload) {
              Json F = Json::array();
              for (std::size_t n = 0; n < tau.F.size(); ++n)
                F.push_back({{"n", n}, {"poly", polynomial_to_json(tau.F[n])}});
              report["tau"]["F"] = std::move(F);
            }
            TauWaveReport r = verify_tau_wave(tau, *wave);
            check_flag(t, "tau", "tau_wave", r.ok, "Miwa-shift residual is nonzero");
          }
          absorb("tau", std::move(t));
        }
      }
    }

    if (options.emit_tables) report["tables"] = engine_tables(spec);
  } catch (const Error& e) {
    failures.push_back(failure_record(e));
  }

  RunOutcome out;
  out.pass = failures.empty();
  report["verdict"] = out.pass ? "pass" : "fail";
  report["failures"] = std::move(failures);
  out.report = std::move(report);
  return out;
}

}  // namespace hbarkp
