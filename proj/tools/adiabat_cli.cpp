// adiabat: run adiabatic-decomposition scenarios from JSON documents.
//
//   adiabat run <scenario.json> [--out DIR]
//   adiabat batch <dir> [--out DIR] [--jobs N]
//   adiabat verify <scenario.json>
//
// Exit status: 0 all identity checks pass, 1 an identity check failed,
// 2 configuration error, 3 numerical failure.

#include <algorithm>
#include <filesystem>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adiabat/errors.hpp"
#include "adiabat/scenario.hpp"

namespace fs = std::filesystem;
using namespace adiabat;

namespace {

enum ExitCode : int { kPass = 0, kIdentityFailure = 1, kConfigError = 2, kNumericalFailure = 3 };

struct Outcome {
  int code = kPass;
  std::string text;
};

std::string summary(const RunReport& r) {
  std::ostringstream out;
  out << r.scenario << ": " << (r.passed() ? "PASS" : "FAIL");
  if (!r.passed()) out << " (first failing check: " << r.first_failure() << ")";
  out << '\n';
  for (const Check& c : r.checks) {
    out << "  " << (c.passed ? "ok  " : "FAIL") << ' ' << c.name << " = " << format_double(c.value)
        << " (threshold " << format_double(c.threshold) << ")\n";
  }
  out << "  max |c_m| (m != n) = " << format_double(r.max_transition_amplitude)
      << ", max QAC ratio = " << format_double(r.max_qac_ratio)
      << ", min adiabatic fidelity = " << format_double(r.min_adiabatic_fidelity) << '\n';
  out << "  adiabatic approximation " << (r.adiabatic_approximation_holds ? "holds" : "fails")
      << ", QAC " << (r.qac_violated ? "violated" : "satisfied") << '\n';
  return out.str();
}

// Runs one scenario file, converting library errors to exit codes.
Outcome execute(const fs::path& file, const std::optional<fs::path>& out_dir) {
  Outcome o;
  try {
    const Scenario s = load_scenario(file);
    const RunResult r = run(s);
    if (out_dir) {
      fs::create_directories(*out_dir);
      if (s.write_csv) emit_csv(r.pipeline.samples, s.level, *out_dir / (s.name + ".csv"));
      if (s.write_report) emit_report(r.report, *out_dir / (s.name + ".report.json"));
    }
    o.text = summary(r.report);
    o.code = r.report.passed() ? kPass : kIdentityFailure;
  } catch (const ConfigError& e) {
    o.text = file.string() + ": configuration error: " + e.what() + '\n';
    o.code = kConfigError;
  } catch (const InvalidInput& e) {
    o.text = file.string() + ": configuration error: " + e.what() + '\n';
    o.code = kConfigError;
  } catch (const NumericalError& e) {
    o.text = file.string() + ": numerical failure: " + e.what() + '\n';
    o.code = kNumericalFailure;
  } catch (const std::exception& e) {
    o.text = file.string() + ": error: " + e.what() + '\n';
    o.code = kNumericalFailure;
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact adiabatic amplitude decomposition for time-dependent quantum systems"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = ".";
  auto* run_cmd = app.add_subcommand("run", "Run one scenario and write CSV and report");
  run_cmd->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory")->capture_default_str();

  std::string batch_dir;
  std::string batch_out = ".";
  unsigned jobs = 1;
  auto* batch_cmd = app.add_subcommand("batch", "Run every *.json scenario in a directory");
  batch_cmd->add_option("dir", batch_dir, "Directory of scenario files")->required();
  batch_cmd->add_option("--out", batch_out, "Output directory")->capture_default_str();
  batch_cmd->add_option("--jobs", jobs, "Scenarios to run concurrently")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();

  std::string verify_path;
  auto* verify_cmd = app.add_subcommand("verify", "Check identities only, no files written");
  verify_cmd->add_option("scenario", verify_path, "Scenario JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  if (*run_cmd) {
    const Outcome o = execute(scenario_path, fs::path(out_dir));
    (o.code == kPass ? std::cout : std::cerr) << o.text;
    return o.code;
  }
  if (*verify_cmd) {
    const Outcome o = execute(verify_path, std::nullopt);
    (o.code == kPass ? std::cout : std::cerr) << o.text;
    return o.code;
  }

  // batch
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(batch_dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (ec) {
    std::cerr << batch_dir << ": " << ec.message() << '\n';
    return kConfigError;
  }
  std::sort(files.begin(), files.end());

  std::vector<Outcome> outcomes(files.size());
  for (std::size_t start = 0; start < files.size(); start += jobs) {
    std::vector<std::future<Outcome>> pending;
    for (std::size_t i = start; i < std::min(files.size(), start + jobs); ++i) {
      pending.push_back(std::async(std::launch::async, execute, files[i], fs::path(batch_out)));
    }
    for (std::size_t i = 0; i < pending.size(); ++i) outcomes[start + i] = pending[i].get();
  }

  int rc = kPass;
  for (const Outcome& o : outcomes) {
    std::cout << o.text;
    if (rc == kPass) rc = o.code;
  }
  std::cout << files.size() << " scenario(s) run\n";
  return rc;
}
