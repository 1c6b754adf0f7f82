#include "adiabat/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "adiabat/errors.hpp"

namespace adiabat {

namespace {

using Json = nlohmann::json;

const std::map<std::string, ModelKind>& model_names() {
  static const std::map<std::string, ModelKind> names{
      {"schwinger", ModelKind::Schwinger},
      {"marzlin-sanders", ModelKind::MarzlinSanders},
      {"static", ModelKind::Static},
      {"random-smooth", ModelKind::RandomSmooth},
  };
  return names;
}

std::string model_name(ModelKind kind) {
  for (const auto& [name, k] : model_names())
    if (k == kind) return name;
  return "unknown";
}

double get_number(const Json& doc, const std::string& key, const std::string& path) {
  const Json& v = doc.at(key);
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
  return x;
}

std::uint64_t get_unsigned(const Json& doc, const std::string& key, const std::string& path) {
  const Json& v = doc.at(key);
  if (!v.is_number_unsigned()) throw ConfigError(path, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

void require(const Json& doc, const std::string& key) {
  if (!doc.contains(key)) throw ConfigError(key, "missing required key");
}

HermitianOperator parse_matrix(const Json& v) {
  const std::string path = "hamiltonian";
  if (!v.is_object()) throw ConfigError(path, "expected an object with \"re\" and optional \"im\"");
  for (const auto& [key, _] : v.items())
    if (key != "re" && key != "im") throw ConfigError(path + "." + key, "unknown key");
  if (!v.contains("re")) throw ConfigError(path + ".re", "missing required key");

  auto rows = [&](const std::string& part) {
    const Json& m = v.at(part);
    const std::string where = path + "." + part;
    if (!m.is_array() || m.empty()) throw ConfigError(where, "expected a square array of numbers");
    std::vector<std::vector<double>> out;
    for (const Json& row : m) {
      if (!row.is_array() || row.size() != m.size())
        throw ConfigError(where, "expected a square array of numbers");
      std::vector<double> r;
      for (const Json& x : row) {
        if (!x.is_number()) throw ConfigError(where, "expected a square array of numbers");
        r.push_back(x.get<double>());
      }
      out.push_back(std::move(r));
    }
    return out;
  };

  const auto re = rows("re");
  const std::size_t n = re.size();
  std::vector<std::vector<double>> im(n, std::vector<double>(n, 0.0));
  if (v.contains("im")) {
    im = rows("im");
    if (im.size() != n) throw ConfigError(path + ".im", "must have the same shape as re");
  }
  if (n < 2 || n > 64) throw ConfigError(path, "dimension must lie in [2, 64]");
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex(re[i][j], im[i][j]);
  try {
    return HermitianOperator(m);
  } catch (const NotHermitian& e) {
    throw ConfigError(path, e.what());
  }
}

Thresholds parse_thresholds(const Json& v) {
  if (!v.is_object()) throw ConfigError("thresholds", "expected an object");
  Thresholds t;
  const std::map<std::string, double*> fields{
      {"criteria_margin", &t.criteria_margin},
      {"adiabatic_amplitude", &t.adiabatic_amplitude},
      {"qac_violation", &t.qac_violation},
      {"decomposition", &t.decomposition},
      {"lambda", &t.lambda},
      {"reconstruction", &t.reconstruction},
      {"unitarity", &t.unitarity},
      {"norm", &t.norm},
  };
  for (const auto& [key, _] : v.items()) {
    const auto it = fields.find(key);
    const std::string path = "thresholds." + key;
    if (it == fields.end()) throw ConfigError(path, "unknown key");
    const double x = get_number(v, key, path);
    if (!(x > 0.0)) throw ConfigError(path, "must be positive");
    *it->second = x;
  }
  return t;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("", "scenario document must be a JSON object");

  static const std::set<std::string> common{"schema_version", "name", "model", "t_start",
                                            "t_end", "steps", "n", "gauge", "outputs",
                                            "thresholds"};
  static const std::set<std::string> schwinger_keys{"omega0", "omega", "theta"};

  Scenario s;
  require(doc, "model");
  if (!doc["model"].is_string()) throw ConfigError("model", "expected a string");
  const std::string model = doc["model"].get<std::string>();
  const auto kind = model_names().find(model);
  if (kind == model_names().end()) throw ConfigError("model", "unknown model \"" + model + "\"");
  s.model.kind = kind->second;

  std::set<std::string> allowed = common;
  switch (s.model.kind) {
    case ModelKind::Schwinger:
    case ModelKind::MarzlinSanders:
      allowed.insert(schwinger_keys.begin(), schwinger_keys.end());
      break;
    case ModelKind::Static:
      allowed.insert("hamiltonian");
      break;
    case ModelKind::RandomSmooth:
      allowed.insert({"dim", "seed"});
      break;
  }
  for (const auto& [key, _] : doc.items()) {
    if (!allowed.contains(key)) {
      const bool known_elsewhere = schwinger_keys.contains(key) || key == "hamiltonian" ||
                                   key == "dim" || key == "seed";
      throw ConfigError(key, known_elsewhere ? "not applicable to model \"" + model + "\""
                                             : "unknown key");
    }
  }

  if (doc.contains("schema_version")) {
    if (!doc["schema_version"].is_number_integer() ||
        doc["schema_version"].get<int>() != kSchemaVersion) {
      throw ConfigError("schema_version", "unsupported version (expected " +
                                              std::to_string(kSchemaVersion) + ")");
    }
  }
  if (doc.contains("name")) {
    if (!doc["name"].is_string() || doc["name"].get<std::string>().empty())
      throw ConfigError("name", "expected a non-empty string");
    s.name = doc["name"].get<std::string>();
    if (s.name.find_first_of("/\\") != std::string::npos)
      throw ConfigError("name", "must not contain path separators");
  }

  switch (s.model.kind) {
    case ModelKind::Schwinger:
    case ModelKind::MarzlinSanders: {
      for (const auto& key : {"omega0", "omega", "theta"}) require(doc, key);
      s.model.schwinger.omega0 = get_number(doc, "omega0", "omega0");
      s.model.schwinger.omega = get_number(doc, "omega", "omega");
      s.model.schwinger.theta = get_number(doc, "theta", "theta");
      if (!(s.model.schwinger.omega0 > 0.0)) throw ConfigError("omega0", "must be positive");
      if (s.model.schwinger.omega < 0.0) throw ConfigError("omega", "must be non-negative");
      if (s.model.schwinger.theta < 0.0 || s.model.schwinger.theta > std::numbers::pi)
        throw ConfigError("theta", "must lie in [0, pi]");
      s.model.dim = 2;
      break;
    }
    case ModelKind::Static:
      require(doc, "hamiltonian");
      s.model.hamiltonian = parse_matrix(doc["hamiltonian"]);
      s.model.dim = s.model.hamiltonian->dim();
      break;
    case ModelKind::RandomSmooth: {
      require(doc, "dim");
      require(doc, "seed");
      const std::uint64_t dim = get_unsigned(doc, "dim", "dim");
      if (dim < 2 || dim > 64) throw ConfigError("dim", "must lie in [2, 64]");
      s.model.dim = static_cast<std::size_t>(dim);
      s.model.seed = get_unsigned(doc, "seed", "seed");
      break;
    }
  }

  const bool rotating = s.model.kind == ModelKind::Schwinger || s.model.kind == ModelKind::MarzlinSanders;
  require(doc, "t_end");
  if (!rotating) require(doc, "steps");
  require(doc, "n");
  if (doc.contains("t_start")) s.t_start = get_number(doc, "t_start", "t_start");
  s.t_end = get_number(doc, "t_end", "t_end");
  if (!(s.t_end > s.t_start)) throw ConfigError("t_end", "must exceed t_start");
  std::uint64_t steps = 0;
  if (doc.contains("steps")) {
    steps = get_unsigned(doc, "steps", "steps");
  } else {
    const double rate = std::max(s.model.schwinger.omega0, s.model.schwinger.omega);
    const double wanted = std::ceil(kDefaultStepsPerUnit * rate * (s.t_end - s.t_start));
    if (!(wanted <= 1e8)) throw ConfigError("steps", "default step count exceeds 1e8; give steps explicitly");
    steps = std::max<std::uint64_t>(kMinSteps, static_cast<std::uint64_t>(wanted));
  }
  if (steps < kMinSteps)
    throw ConfigError("steps", "must be at least " + std::to_string(kMinSteps));
  s.steps = static_cast<std::size_t>(steps);
  const std::uint64_t n = get_unsigned(doc, "n", "n");
  if (n < 1 || n > s.model.dim)
    throw ConfigError("n", "level must lie in [1, " + std::to_string(s.model.dim) + "]");
  s.level = static_cast<std::size_t>(n - 1);

  if (doc.contains("gauge")) {
    const Json& g = doc["gauge"];
    if (!g.is_string()) throw ConfigError("gauge", "expected a string");
    const std::string gauge = g.get<std::string>();
    if (gauge == "auto") {
      s.gauge = GaugeChoice::Auto;
    } else if (gauge == "analytic-reference") {
      if (s.model.kind == ModelKind::Static || s.model.kind == ModelKind::RandomSmooth)
        throw ConfigError("gauge", "model \"" + model + "\" has no analytic eigenbasis");
      s.gauge = GaugeChoice::AnalyticReference;
    } else {
      throw ConfigError("gauge", "expected \"auto\" or \"analytic-reference\"");
    }
  }

  if (doc.contains("outputs")) {
    const Json& o = doc["outputs"];
    if (!o.is_array()) throw ConfigError("outputs", "expected an array of strings");
    s.write_csv = false;
    s.write_report = false;
    for (std::size_t i = 0; i < o.size(); ++i) {
      const std::string path = "outputs[" + std::to_string(i) + "]";
      if (!o[i].is_string()) throw ConfigError(path, "expected a string");
      const std::string sel = o[i].get<std::string>();
      if (sel == "csv") {
        s.write_csv = true;
      } else if (sel == "report") {
        s.write_report = true;
      } else {
        throw ConfigError(path, "unknown output \"" + sel + "\" (expected csv or report)");
      }
    }
  }

  if (doc.contains("thresholds")) s.thresholds = parse_thresholds(doc["thresholds"]);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  Scenario s = parse_scenario(text);
  if (!Json::parse(text).contains("name")) s.name = path.stem().string();
  return s;
}

Model build_model(const Scenario& scenario) {
  const ModelSpec& spec = scenario.model;
  switch (spec.kind) {
    case ModelKind::Schwinger:
      return Model::schwinger(spec.schwinger);
    case ModelKind::MarzlinSanders:
      // Twice the run resolution so that every midpoint of the run grid is a
      // table entry.
      return Model::transformed(Model::schwinger(spec.schwinger), scenario.t_start,
                                scenario.t_end, 2 * scenario.steps);
    case ModelKind::Static:
      return static_model(*spec.hamiltonian);
    case ModelKind::RandomSmooth:
      return random_smooth_model(spec.dim, spec.seed);
  }
  throw InvalidInput("unknown model kind");
}

PipelineResult run_pipeline(const Model& model, const TimeGrid& grid, std::size_t level,
                            const GaugeReference& gauge, DerivativeMethod method,
                            const DiagnosticsOptions& options) {
  if (level >= model.dim()) throw InvalidInput("tracked level out of range");
  PipelineResult r{Trajectory{grid, {}, {}}, {}, {}, {}, 0.0};
  r.frames = track(model, grid, gauge);
  attach_derivatives(r.frames, model, grid, method);
  r.berry = berry_phase(r.frames, grid, level);
  r.trajectory = evolve(model, r.frames.front().eigenvectors[level], grid);
  r.unitarity_drift = unitarity_drift(model, grid);
  r.samples = diagnose(model, r.trajectory, r.frames, r.berry, level, options);
  return r;
}

// ------------------------------------------------------------------ reports

bool RunReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string RunReport::first_failure() const {
  for (const Check& c : checks)
    if (!c.passed) return c.name;
  return {};
}

RunReport make_report(const Scenario& scenario, const PipelineResult& result) {
  const std::size_t n = scenario.level;
  const std::size_t dim = result.frames.front().dim();
  RunReport rep;
  rep.scenario = scenario.name;
  rep.model = model_name(scenario.model.kind);
  rep.dim = dim;
  rep.level = n;
  rep.samples = result.samples.size();
  rep.unitarity_drift = result.unitarity_drift;
  rep.max_berry_imaginary_residue = result.berry.max_imaginary_residue;
  rep.max_abs_c.assign(dim, 0.0);
  rep.max_abs_q.assign(dim, std::nullopt);
  rep.max_abs_r.assign(dim, std::nullopt);
  rep.max_qac.assign(dim, std::nullopt);

  auto raise = [](std::optional<double>& slot, double x) { slot = std::max(slot.value_or(0.0), x); };
  std::size_t a_true = 0, a_defined = 0, b_true = 0, c_true = 0;
  for (const DiagnosticsSample& s : result.samples) {
    rep.max_lambda_residual = std::max(rep.max_lambda_residual, s.lambda_residual);
    rep.max_norm_error = std::max(rep.max_norm_error, s.norm_error);
    rep.max_equivalence_residual = std::max(rep.max_equivalence_residual, s.equivalence_residual);
    rep.max_d_norm = std::max(rep.max_d_norm, s.d_norm);
    rep.max_d_dot_norm = std::max(rep.max_d_dot_norm, s.d_dot_norm);
    rep.min_adiabatic_fidelity = std::min(rep.min_adiabatic_fidelity, s.adiabatic_fidelity);
    if (s.reconstruction_residual) raise(rep.max_reconstruction_residual, *s.reconstruction_residual);

    bool a_all = true, a_def = true, b_all = true, c_all = true;
    for (std::size_t m = 0; m < dim; ++m) {
      rep.max_abs_c[m] = std::max(rep.max_abs_c[m], std::abs(s.c[m]));
      if (m == n) continue;
      rep.max_transition_amplitude = std::max(rep.max_transition_amplitude, std::abs(s.c[m]));
      raise(rep.max_abs_q[m], std::abs(*s.q[m]));
      raise(rep.max_abs_r[m], std::abs(*s.r[m]));
      raise(rep.max_qac[m], *s.qac[m]);
      rep.max_qac_ratio = std::max(rep.max_qac_ratio, *s.qac[m]);
      rep.max_decomposition_residual =
          std::max(rep.max_decomposition_residual, *s.decomposition_residual[m]);
      const CriteriaFlags& f = *s.criteria[m];
      if (!f.difference_small) {
        a_def = false;
      } else if (!*f.difference_small) {
        a_all = false;
      }
      b_all = b_all && f.derivative_small;
      c_all = c_all && f.combination_small;
    }
    if (a_def) {
      ++a_defined;
      if (a_all) ++a_true;
    }
    if (b_all) ++b_true;
    if (c_all) ++c_true;
  }
  const double total = static_cast<double>(rep.samples);
  rep.criteria.difference_small = a_defined ? static_cast<double>(a_true) / a_defined : 0.0;
  rep.criteria.difference_undefined = static_cast<double>(rep.samples - a_defined) / total;
  rep.criteria.derivative_small = static_cast<double>(b_true) / total;
  rep.criteria.combination_small = static_cast<double>(c_true) / total;

  const Thresholds& th = scenario.thresholds;
  rep.adiabatic_approximation_holds = rep.max_transition_amplitude < th.adiabatic_amplitude;
  rep.qac_violated = rep.max_qac_ratio > th.qac_violation;

  auto check = [&](std::string name, double value, double threshold) {
    rep.checks.push_back({std::move(name), value, threshold, value <= threshold});
  };
  check("decomposition", rep.max_decomposition_residual, th.decomposition);
  check("lambda", rep.max_lambda_residual, th.lambda);
  if (rep.max_reconstruction_residual)
    check("reconstruction", *rep.max_reconstruction_residual, th.reconstruction);
  check("unitarity", rep.unitarity_drift, th.unitarity);
  check("norm", rep.max_norm_error, th.norm);
  return rep;
}

RunResult run(const Scenario& scenario) {
  const Model model = build_model(scenario);
  const GaugeReference gauge = scenario.gauge == GaugeChoice::AnalyticReference
                                   ? GaugeReference::analytic()
                                   : GaugeReference::first_component();
  DiagnosticsOptions options;
  options.criteria_margin = scenario.thresholds.criteria_margin;
  PipelineResult pipeline = run_pipeline(model, scenario.grid(), scenario.level, gauge,
                                         DerivativeMethod::Perturbative, options);
  RunReport report = make_report(scenario, pipeline);
  return RunResult{std::move(pipeline), std::move(report)};
}

// --------------------------------------------------------------------- CSV

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // drop the sign of negative zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string csv_header(std::size_t dim, std::size_t level) {
  std::string h = "t";
  for (std::size_t i = 1; i <= dim; ++i) {
    const std::string k = std::to_string(i);
    h += ",re_c_" + k + ",im_c_" + k + ",abs_c_" + k;
  }
  for (std::size_t m = 0; m < dim; ++m) {
    if (m == level) continue;
    const std::string k = std::to_string(m + 1);
    h += ",abs_Q_" + k + ",abs_R_" + k + ",qac_" + k + ",residual_" + k;
  }
  h += ",beta_" + std::to_string(level + 1) + ",D_norm,Ddot_norm,lambda_residual,norm_error";
  return h;
}

void write_csv(std::ostream& out, const std::vector<DiagnosticsSample>& samples,
               std::size_t level) {
  if (samples.empty()) return;
  const std::size_t dim = samples.front().c.size();
  std::string line = csv_header(dim, level);
  line += '\n';
  out << line;
  for (const DiagnosticsSample& s : samples) {
    line = format_double(s.t);
    auto field = [&line](double x) {
      line += ',';
      line += format_double(x);
    };
    for (const Complex& c : s.c) {
      field(c.real());
      field(c.imag());
      field(std::abs(c));
    }
    for (std::size_t m = 0; m < dim; ++m) {
      if (m == level) continue;
      field(std::abs(*s.q[m]));
      field(std::abs(*s.r[m]));
      field(*s.qac[m]);
      field(*s.decomposition_residual[m]);
    }
    field(s.beta_n);
    field(s.d_norm);
    field(s.d_dot_norm);
    field(s.lambda_residual);
    field(s.norm_error);
    line += '\n';
    out << line;
  }
}

void emit_csv(const std::vector<DiagnosticsSample>& samples, std::size_t level,
              const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  write_csv(out, samples, level);
  if (!out) throw Error("failed writing " + path.string());
}

nlohmann::ordered_json report_json(const RunReport& r) {
  using OJ = nlohmann::ordered_json;
  auto per_level = [](const std::vector<std::optional<double>>& v) {
    OJ arr = OJ::array();
    for (const auto& x : v) arr.push_back(x ? OJ(*x) : OJ(nullptr));
    return arr;
  };
  OJ j;
  j["schema_version"] = kSchemaVersion;
  j["scenario"] = r.scenario;
  j["model"] = r.model;
  j["dim"] = r.dim;
  j["n"] = r.level + 1;
  j["samples"] = r.samples;
  j["passed"] = r.passed();
  j["first_failure"] = r.first_failure().empty() ? OJ(nullptr) : OJ(r.first_failure());

  OJ checks = OJ::array();
  for (const Check& c : r.checks) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold},
                      {"passed", c.passed}});
  }
  j["checks"] = checks;

  j["max_residuals"] = {
      {"decomposition", r.max_decomposition_residual},
      {"lambda", r.max_lambda_residual},
      {"reconstruction",
       r.max_reconstruction_residual ? OJ(*r.max_reconstruction_residual) : OJ(nullptr)},
      {"unitarity", r.unitarity_drift},
      {"norm", r.max_norm_error},
      {"berry_imaginary", r.max_berry_imaginary_residue},
      {"equivalence", r.max_equivalence_residual},
  };
  j["criteria_fraction"] = {
      {"difference_small", r.criteria.difference_small},
      {"derivative_small", r.criteria.derivative_small},
      {"combination_small", r.criteria.combination_small},
      {"difference_undefined", r.criteria.difference_undefined},
  };
  j["max_abs_c"] = r.max_abs_c;
  j["max_abs_Q"] = per_level(r.max_abs_q);
  j["max_abs_R"] = per_level(r.max_abs_r);
  j["max_qac"] = per_level(r.max_qac);
  j["max_D_norm"] = r.max_d_norm;
  j["max_Ddot_norm"] = r.max_d_dot_norm;
  j["min_adiabatic_fidelity"] = r.min_adiabatic_fidelity;
  j["regime"] = {
      {"max_transition_amplitude", r.max_transition_amplitude},
      {"max_qac_ratio", r.max_qac_ratio},
      {"adiabatic_approximation_holds", r.adiabatic_approximation_holds},
      {"qac_violated", r.qac_violated},
  };
  return j;
}

void emit_report(const RunReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << report_json(report).dump(2) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace adiabat
