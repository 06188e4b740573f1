#include "hbarkp/json_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "hbarkp/error.hpp"

namespace hbarkp {

namespace {

constexpr const char* kModule = "cli";

const std::vector<std::string> kTasks{"validate-seed", "solve", "wkb", "tau", "verify-all"};

[[noreturn]] void parse_error(const std::string& op, const std::string& detail) {
  throw Error(ErrorCode::SpecParseError, kModule, op, detail);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) parse_error("parse_spec", where + " lacks \"" + key + "\"");
  return j.at(key);
}

int integer(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_number_integer()) parse_error("parse_spec", where + "." + key + " is not an integer");
  return v.get<int>();
}

Rational rational(const Json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(v.get<long>());
  if (!v.is_string()) parse_error("parse_spec", where + " is not a \"p/q\" string");
  return parse_rational(v.get<std::string>());
}

}  // namespace

Json symbol_to_json(const GradedSymbol& a) {
  Json out = Json::array();
  const int T = a.policy().num_times;
  for (const auto& t : a.terms()) {
    Json times = Json::array();
    for (int j = 0; j < T; ++j) times.push_back(t.m.t[static_cast<std::size_t>(j)]);
    out.push_back({{"h", t.m.h},
                   {"xi", t.m.xi},
                   {"logxi", t.m.logxi},
                   {"x", t.m.x},
                   {"t", std::move(times)},
                   {"c", format_rational(t.c)}});
  }
  return out;
}

GradedSymbol symbol_from_json(const Json& terms, const TruncationPolicy& policy) {
  if (!terms.is_array()) parse_error("symbol_from_json", "a symbol must be an array of terms");
  std::vector<Term> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Json& e = terms[i];
    const std::string where = "term " + std::to_string(i);
    Monomial m;
    m.h = integer(e, "h", where);
    m.xi = integer(e, "xi", where);
    m.x = integer(e, "x", where);
    if (e.contains("logxi")) m.logxi = integer(e, "logxi", where);
    if (m.logxi != 0 && m.logxi != 1) parse_error("symbol_from_json", where + ": logxi must be 0 or 1");
    if (m.x < 0) parse_error("symbol_from_json", where + ": negative x-degree");
    if (e.contains("t")) {
      const Json& t = e.at("t");
      if (!t.is_array() || static_cast<int>(t.size()) > policy.num_times)
        parse_error("symbol_from_json", where + ": \"t\" must list at most T exponents");
      for (std::size_t j = 0; j < t.size(); ++j) {
        if (!t[j].is_number_integer() || t[j].get<int>() < 0 || t[j].get<int>() > 255)
          parse_error("symbol_from_json", where + ": bad t exponent");
        m.t[j] = static_cast<std::uint8_t>(t[j].get<int>());
      }
    }
    if (!policy.contains(m)) parse_error("symbol_from_json", where + ": " + format_monomial(m) + " is outside the window");
    out.push_back({m, rational(field(e, "c", where), where + ".c")});
  }
  return make_symbol(out, policy);
}

ProblemSpec parse_spec(const Json& spec) {
  try {
    ProblemSpec out{TruncationPolicy{}, GradedSymbol(TruncationPolicy{}), GradedSymbol(TruncationPolicy{}),
                    GradedSymbol(TruncationPolicy{}), 0, 0, {}};
    TruncationPolicy& p = out.policy;
    p.num_times = integer(spec, "T", "spec");
    if (p.num_times < 1 || p.num_times > kMaxTimes)
      parse_error("parse_spec", "T must lie in 1.." + std::to_string(kMaxTimes));
    const Json& trunc = field(spec, "trunc", "spec");
    p.hbar_max = integer(trunc, "hbar_max", "trunc");
    p.xi_min = integer(trunc, "xi_min", "trunc");
    p.t_total_max = integer(trunc, "t_total_max", "trunc");
    p.x_max = integer(trunc, "x_max", "trunc");
    try {
      p.validate();
    } catch (const Error& e) {
      parse_error("parse_spec", e.detail());
    }
    out.f = symbol_from_json(field(spec, "f", "spec"), p);
    out.g = symbol_from_json(field(spec, "g", "spec"), p);
    const Json& seed = field(spec, "seed", "spec");
    out.X0 = symbol_from_json(field(seed, "X0", "seed"), p);
    if (!out.X0.is_hbar_free()) parse_error("parse_spec", "seed.X0 must not depend on ℏ");
    out.alpha0 = rational(field(seed, "alpha0", "seed"), "seed.alpha0");
    if (seed.contains("xi_trust")) out.X0 = limit_xi_trust(out.X0, integer(seed, "xi_trust", "seed"), 0);
    if (seed.contains("t_trust")) out.X0 = limit_t_trust(out.X0, integer(seed, "t_trust", "seed"));
    out.N = integer(spec, "N", "spec");
    if (out.N < 0 || out.N > p.hbar_max) parse_error("parse_spec", "N must lie in 0..hbar_max");
    if (spec.contains("tasks")) {
      const Json& tasks = spec.at("tasks");
      if (!tasks.is_array()) parse_error("parse_spec", "\"tasks\" must be an array");
      for (const auto& t : tasks) {
        if (!t.is_string() || std::find(kTasks.begin(), kTasks.end(), t.get<std::string>()) == kTasks.end())
          parse_error("parse_spec", "unknown task " + t.dump());
        out.tasks.push_back(t.get<std::string>());
      }
    }
    if (out.tasks.empty()) out.tasks.push_back("verify-all");
    return out;
  } catch (const Json::exception& e) {
    parse_error("parse_spec", e.what());
  }
}

ProblemSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) parse_error("load_spec", "cannot open " + path);
  try {
    return parse_spec(Json::parse(in));
  } catch (const Json::parse_error& e) {
    parse_error("load_spec", path + ": " + e.what());
  }
}

RHProblem to_problem(const ProblemSpec& spec) {
  return {spec.f, spec.g, spec.X0, spec.alpha0, spec.N, true};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace hbarkp
