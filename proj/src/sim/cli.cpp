#include "loglin/sim/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "loglin/errors.hpp"
#include "loglin/sim/plots.hpp"
#include "loglin/sim/runs.hpp"
#include "loglin/sim/scenario.hpp"

namespace loglin::sim {

namespace {

struct Options {
  std::string scenario_path;
  std::filesystem::path out_dir = "out";
  std::string format = "csv";
  bool no_plots = false;
  bool timing = false;
};

void write_artifacts(const RunResult& r, const Options& opt) {
  const std::string stem = to_string(r.summary.mode);
  if (opt.format == "csv") {
    write_text(opt.out_dir / (stem + ".csv"), to_csv(r.table));
  } else {
    write_text(opt.out_dir / (stem + ".json"), to_json(r.table));
  }
  write_text(opt.out_dir / (stem + "_summary.json"), summary_to_json(r.summary, opt.timing));
  if (!opt.no_plots) emit_plots(r.table, r.summary.mode, opt.out_dir);
}

void report(const RunSummary& s, std::ostream& out) {
  out << to_string(s.mode) << ": " << s.samples << " samples, " << s.accepted_steps
      << " accepted / " << s.rejected_steps << " rejected steps\n";
  out << "  max |xi_p| = " << s.max_position_error_m << " m, max |xi_v| = "
      << s.max_velocity_error_m_s << " m/s, max |xi_R| = " << s.max_attitude_error_rad
      << " rad\n";
  for (const Check& c : s.checks) {
    out << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << c.name << " = " << c.value
        << " (limit " << c.limit << ")\n";
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"SE2(3) log-linear error dynamics simulator"};
  app.require_subcommand(1);
  Options opt;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"validate", "Compare classical and log-error propagation"},
      {"bound", "Check the gravity mismatch against its bounds"},
      {"stabilize", "Run inversion-only and closed-loop stabilization"},
      {"all", "Run all three experiments concurrently"}};
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--scenario", opt.scenario_path,
                    "Scenario file (defaults to the built-in Molniya formation)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--format", opt.format, "Per-sample artifact format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sub->add_flag("--no-plots", opt.no_plots, "Skip SVG figures");
    sub->add_flag("--timing", opt.timing, "Include wall time in the JSON summary");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  std::vector<Mode> modes;
  const std::string cmd = app.get_subcommands().front()->get_name();
  if (cmd == "all") {
    modes = {Mode::validate, Mode::bound, Mode::stabilize};
  } else {
    modes = {mode_from_string(cmd)};
  }

  try {
    const Scenario sc =
        opt.scenario_path.empty() ? molniya_scenario() : load_scenario(opt.scenario_path);
    std::error_code ec;
    std::filesystem::create_directories(opt.out_dir, ec);
    if (ec) throw IoError("cannot create " + opt.out_dir.string() + ": " + ec.message());

    // The experiments share no mutable state.
    std::vector<std::future<RunResult>> jobs;
    for (Mode m : modes) {
      jobs.push_back(std::async(std::launch::async, [&sc, m] { return run_mode(sc, m); }));
    }
    std::vector<RunResult> results;
    for (auto& j : jobs) results.push_back(j.get());

    bool all_passed = true;
    for (const RunResult& r : results) {
      write_artifacts(r, opt);
      report(r.summary, out);
      all_passed = all_passed && r.summary.passed();
    }
    if (!all_passed) {
      err << "one or more checks failed\n";
      return kExitCheckFailed;
    }
    return kExitOk;
  } catch (const BoundViolation& e) {
    err << "check failed: " << e.what() << "\n";
    return kExitCheckFailed;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace loglin::sim
