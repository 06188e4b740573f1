#ifndef HBARKP_PIPELINE_HPP
#define HBARKP_PIPELINE_HPP

#include <optional>

#include "hbarkp/error.hpp"
#include "hbarkp/json_io.hpp"

namespace hbarkp {

struct RunOptions {
  std::optional<int> depth;
  bool verify_only = false;
  bool emit_tables = false;
};

struct RunOutcome {
  Json report;
  bool pass = false;
};

/// Seed validation → recursion → WKB → tau for the requested tasks. Module
/// errors become failure records; the report is deterministic.
RunOutcome run_pipeline(const ProblemSpec& spec, const RunOptions& options);

/// Largest window the brute-force tables accept: hbar_max ≤ 3, xi_min ≥ −6,
/// t_total_max ≤ 2, x_max ≤ 6, T ≤ 3.
bool fits_oracle_limits(const TruncationPolicy& p);
/// The spec window cut down to the oracle limits.
TruncationPolicy table_window(const TruncationPolicy& p);

/// f∘g, g∘f, Ad(e^{X₀/ℏ}) f, Ad(e^{X₀/ℏ}) g and the phase of X₀ on
/// table_window(spec.policy), by the fast engine.
Json engine_tables(const ProblemSpec& spec);
/// The same tables by brute force. Throws WindowTooLarge unless the spec
/// window fits the limits or `clamp` is set.
Json oracle_tables(const ProblemSpec& spec, bool clamp);

Json failure_record(const Error& e);

}  // namespace hbarkp

#endif  // HBARKP_PIPELINE_HPP
