#pragma once

// Scenario documents (JSON), the propagate -> track -> diagnose pipeline, and
// the CSV / JSON emitters.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "adiabat/diagnostics.hpp"
#include "adiabat/models.hpp"
#include "adiabat/propagator.hpp"
#include "adiabat/spectral.hpp"

namespace adiabat {

inline constexpr int kSchemaVersion = 1;

enum class ModelKind { Schwinger, MarzlinSanders, Static, RandomSmooth };
enum class GaugeChoice { Auto, AnalyticReference };

struct ModelSpec {
  ModelKind kind = ModelKind::Schwinger;
  SchwingerParams schwinger;                   // schwinger, marzlin-sanders
  std::optional<HermitianOperator> hamiltonian;  // static
  std::size_t dim = 2;                           // random-smooth
  std::uint64_t seed = 0;                        // random-smooth
};

struct Thresholds {
  double criteria_margin = 0.1;
  double adiabatic_amplitude = 0.15;
  double qac_violation = 0.4;
  double decomposition = 1e-7;
  double lambda = 1e-7;
  double reconstruction = 1e-7;
  double unitarity = 1e-9;
  double norm = 1e-8;
};

struct Scenario {
  int schema_version = kSchemaVersion;
  std::string name = "scenario";
  ModelSpec model;
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t steps = 0;
  std::size_t level = 0;  // 0-based; documents use 1-based "n"
  GaugeChoice gauge = GaugeChoice::Auto;
  bool write_csv = true;
  bool write_report = true;
  Thresholds thresholds;

  TimeGrid grid() const { return {t_start, t_end, steps}; }
};

inline constexpr std::size_t kMinSteps = 10;
/// Rotating-field models may omit "steps": the grid then gets this many steps
/// per unit of max(omega0, omega) (t_end - t_start).
inline constexpr double kDefaultStepsPerUnit = 1000.0;

/// Parses and validates a scenario document. Throws ConfigError naming the
/// offending key for malformed JSON, unknown keys, missing keys and
/// out-of-range values.
Scenario parse_scenario(std::string_view text);

/// Reads a file; "name" defaults to the file stem.
Scenario load_scenario(const std::filesystem::path& path);

Model build_model(const Scenario& scenario);

struct PipelineResult {
  Trajectory trajectory;
  std::vector<SpectralFrame> frames;
  BerryPhaseAccumulator berry;
  std::vector<DiagnosticsSample> samples;
  double unitarity_drift = 0.0;
};

/// Starts from psi(t_start) = |E_n(t_start)> of the tracked frames.
PipelineResult run_pipeline(const Model& model, const TimeGrid& grid, std::size_t level,
                            const GaugeReference& gauge = {},
                            DerivativeMethod method = DerivativeMethod::Perturbative,
                            const DiagnosticsOptions& options = {});

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct CriteriaFractions {
  double difference_small = 0.0;  // over samples where E_n != 0
  double derivative_small = 0.0;
  double combination_small = 0.0;
  double difference_undefined = 0.0;
};

struct RunReport {
  std::string scenario;
  std::string model;
  std::size_t dim = 0;
  std::size_t level = 0;  // 0-based
  std::size_t samples = 0;

  double max_decomposition_residual = 0.0;
  double max_lambda_residual = 0.0;
  std::optional<double> max_reconstruction_residual;
  double unitarity_drift = 0.0;
  double max_norm_error = 0.0;
  double max_berry_imaginary_residue = 0.0;
  double max_equivalence_residual = 0.0;
  double max_d_norm = 0.0;
  double max_d_dot_norm = 0.0;
  double min_adiabatic_fidelity = 1.0;

  CriteriaFractions criteria;
  std::vector<double> max_abs_c;                 // per level
  std::vector<std::optional<double>> max_abs_q;  // empty at the tracked level
  std::vector<std::optional<double>> max_abs_r;
  std::vector<std::optional<double>> max_qac;

  double max_transition_amplitude = 0.0;  // max over t and m != n of |c_m|
  double max_qac_ratio = 0.0;
  bool adiabatic_approximation_holds = false;
  bool qac_violated = false;

  std::vector<Check> checks;
  bool passed() const;
  /// Name of the first failing check, empty if all pass.
  std::string first_failure() const;
};

RunReport make_report(const Scenario& scenario, const PipelineResult& result);

struct RunResult {
  PipelineResult pipeline;
  RunReport report;
};

RunResult run(const Scenario& scenario);

/// Column order: t; re_c_i, im_c_i, abs_c_i per level; abs_Q_m, abs_R_m,
/// qac_m, residual_m per m != n; beta_n, D_norm, Ddot_norm, lambda_residual,
/// norm_error. Levels are 1-based in headers.
std::string csv_header(std::size_t dim, std::size_t level);
void write_csv(std::ostream& out, const std::vector<DiagnosticsSample>& samples,
               std::size_t level);
void emit_csv(const std::vector<DiagnosticsSample>& samples, std::size_t level,
              const std::filesystem::path& path);

nlohmann::ordered_json report_json(const RunReport& report);
void emit_report(const RunReport& report, const std::filesystem::path& path);

/// Shortest decimal that round-trips, '.' radix, independent of locale.
std::string format_double(double x);

}  // namespace adiabat
