#include <fstream>
#include <iostream>

#include "hbarkp/json_io.hpp"
#include "problems.hpp"

using namespace hbarkp;
using hbarkp::testing::window;

namespace {

Json strip(Json terms) {
  for (auto& t : terms) {
    if (t["logxi"] == 0) t.erase("logxi");
    bool timeless = true;
    for (const auto& e : t["t"]) timeless = timeless && e == 0;
    if (timeless) t.erase("t");
  }
  return terms;
}

Json seed_json(const RHProblem& problem) {
  Json seed = {{"X0", strip(symbol_to_json(trusted_part(problem.X0)))}, {"alpha0", format_rational(problem.alpha0)}};
  if (problem.X0.xi_trust(0) != kNegInf) seed["xi_trust"] = problem.X0.xi_trust(0);
  if (problem.X0.trust().t < problem.X0.policy().t_total_max) seed["t_trust"] = problem.X0.trust().t;
  return seed;
}

Json spec_json(const RHProblem& problem, const TruncationPolicy& p, const std::vector<std::string>& tasks) {
  return {{"T", p.num_times},
          {"trunc", {{"hbar_max", p.hbar_max}, {"xi_min", p.xi_min}, {"t_total_max", p.t_total_max}, {"x_max", p.x_max}}},
          {"f", strip(symbol_to_json(problem.f))},
          {"g", strip(symbol_to_json(problem.g))},
          {"seed", seed_json(problem)},
          {"N", problem.N},
          {"tasks", tasks}};
}

void write(const std::string& dir, const std::string& name, const Json& j) {
  std::ofstream(dir + "/" + name + ".json") << dump(j);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_specs DIR\n";
    return 2;
  }
  const std::string dir = argv[1];
  const TruncationPolicy small = window(3, -8, 2, 4, 3);
  write(dir, "trivial", spec_json(hbarkp::testing::trivial_problem(small, 3), small, {"verify-all"}));
  write(dir, "shifted", spec_json(hbarkp::testing::shifted_problem(small, 1, 3), small, {"validate-seed", "solve", "wkb"}));
  const TruncationPolicy deep = window(3, -10, 3, 6, 3);
  write(dir, "airy", spec_json(hbarkp::testing::airy_problem(deep, 3), deep, {"validate-seed", "solve", "wkb"}));
  write(dir, "weyl_airy", spec_json(hbarkp::testing::weyl_airy_problem(deep, 3), deep, {"verify-all"}));
  const TruncationPolicy times = window(1, -12, 3, 10, 6);
  write(dir, "weyl_airy_t6", spec_json(hbarkp::testing::weyl_airy_problem(times, 1), times, {"validate-seed", "solve", "tau"}));
  return 0;
}
