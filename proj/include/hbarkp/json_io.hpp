#ifndef HBARKP_JSON_IO_HPP
#define HBARKP_JSON_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "hbarkp/rh.hpp"

namespace hbarkp {

using Json = nlohmann::ordered_json;

/// [{"h","xi","logxi","x","t":[T entries],"c":"p/q"}, …] in canonical order.
Json symbol_to_json(const GradedSymbol& a);
/// Accepts {"h","xi","x","c"} with optional "logxi" and "t"; throws
/// SpecParseError on malformed terms or terms outside the window.
GradedSymbol symbol_from_json(const Json& terms, const TruncationPolicy& policy);

struct ProblemSpec {
  TruncationPolicy policy;
  GradedSymbol f;
  GradedSymbol g;
  GradedSymbol X0;
  Rational alpha0;
  int N = 0;
  std::vector<std::string> tasks;
};

ProblemSpec parse_spec(const Json& spec);
ProblemSpec load_spec(const std::string& path);
RHProblem to_problem(const ProblemSpec& spec);

/// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);

}  // namespace hbarkp

#endif  // HBARKP_JSON_IO_HPP
