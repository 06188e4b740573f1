#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hbarkp/pipeline.hpp"

namespace {

void write_atomically(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << text;
    if (!out.flush()) throw std::runtime_error("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

int emit_failure(const std::string& out, const hbarkp::Error& e) {
  hbarkp::Json report;
  report["verdict"] = "fail";
  report["failures"] = hbarkp::Json::array({hbarkp::failure_record(e)});
  write_atomically(out, hbarkp::dump(report));
  std::cerr << e.what() << "\n";
  return e.code() == hbarkp::ErrorCode::SpecParseError ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ℏ-dependent KP hierarchy: Riemann-Hilbert recursion, WKB phase and tau expansion"};
  app.require_subcommand(1);

  std::string spec_path, out_path;
  std::optional<int> depth;
  hbarkp::RunOptions options;
  CLI::App* run = app.add_subcommand("run", "Run the requested tasks and write the verification report");
  run->add_option("--spec", spec_path, "Problem specification (JSON)")->required();
  run->add_option("--out", out_path, "Report path (stdout when omitted)");
  run->add_option("--depth", depth, "Override the recursion depth N");
  run->add_flag("--verify-only", options.verify_only, "Report checks only, without coefficient tables");
  run->add_flag("--emit-oracle-tables", options.emit_tables, "Add the tables the oracle subcommand produces");

  bool clamp = false;
  CLI::App* oracle = app.add_subcommand("oracle", "Brute-force tables for diffing against run --emit-oracle-tables");
  oracle->add_option("--spec", spec_path, "Problem specification (JSON)")->required();
  oracle->add_option("--out", out_path, "Output path (stdout when omitted)");
  oracle->add_flag("--clamp", clamp, "Cut the window down to the oracle limits instead of failing");

  CLI11_PARSE(app, argc, argv);

  try {
    hbarkp::ProblemSpec spec = hbarkp::load_spec(spec_path);
    if (*run) {
      options.depth = depth;
      hbarkp::RunOutcome outcome = hbarkp::run_pipeline(spec, options);
      write_atomically(out_path, hbarkp::dump(outcome.report));
      if (!outcome.pass)
        for (const auto& f : outcome.report["failures"]) std::cerr << f.dump() << "\n";
      return outcome.pass ? 0 : 1;
    }
    hbarkp::Json report;
    report["tables"] = hbarkp::oracle_tables(spec, clamp);
    write_atomically(out_path, hbarkp::dump(report));
    return 0;
  } catch (const hbarkp::Error& e) {
    return emit_failure(out_path, e);
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
}
