#include "adiabat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adiabat/errors.hpp"

namespace adiabat {

GaugeReference GaugeReference::initial(std::vector<StateVector> vectors) {
  GaugeReference g;
  g.mode_ = Mode::Initial;
  g.vectors_ = std::move(vectors);
  return g;
}

GaugeReference GaugeReference::analytic() {
  GaugeReference g;
  g.mode_ = Mode::Analytic;
  return g;
}

namespace {

constexpr double kDegeneracyTolerance = 1e-12;
constexpr double kMinOverlap = 0.5;

std::string at_sample(std::size_t k, double t) {
  return " at sample " + std::to_string(k) + " (t = " + std::to_string(t) + ")";
}

// Rotates v so that <ref|v> is real and non-negative.
void align_phase(StateVector& v, const StateVector& ref) {
  const Complex ov = inner(ref, v);
  const double mag = std::abs(ov);
  if (mag > 0.0) v *= std::conj(ov) / mag;
}

// perm[i] = index in `candidates` of the vector best overlapping refs[i].
std::vector<std::size_t> match_levels(const std::vector<StateVector>& refs,
                                      const std::vector<StateVector>& candidates,
                                      std::size_t k, double t) {
  const std::size_t n = refs.size();
  std::vector<std::size_t> perm(n);
  std::vector<bool> taken(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t best = 0;
    double best_ov = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double ov = std::abs(inner(refs[i], candidates[j]));
      if (ov > best_ov) {
        best_ov = ov;
        best = j;
      }
    }
    if (best_ov < kMinOverlap || taken[best]) {
      throw LevelCrossing("level crossing suspected for level " + std::to_string(i + 1) +
                              " (overlap " + std::to_string(best_ov) + ")" + at_sample(k, t),
                          k, t);
    }
    taken[best] = true;
    perm[i] = best;
  }
  return perm;
}

SpectralFrame diagonalize(const Model& model, std::size_t k, double t) {
  const HermitianOperator h = model.hamiltonian(t);
  EigenSystem es = hermitian_eigendecompose(h);
  const double gap = es.min_gap();
  if (gap <= kDegeneracyTolerance * h.matrix().frobenius_norm()) {
    throw Degeneracy("degenerate spectrum (gap " + std::to_string(gap) + ")" + at_sample(k, t), k,
                     t);
  }
  SpectralFrame f;
  f.t = t;
  f.eigenvalues = std::move(es.eigenvalues);
  f.eigenvectors = std::move(es.eigenvectors);
  f.min_gap = gap;
  return f;
}

void permute(SpectralFrame& f, const std::vector<std::size_t>& perm) {
  std::vector<double> values(perm.size());
  std::vector<StateVector> vectors(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    values[i] = f.eigenvalues[perm[i]];
    vectors[i] = std::move(f.eigenvectors[perm[i]]);
  }
  f.eigenvalues = std::move(values);
  f.eigenvectors = std::move(vectors);
}

}  // namespace

std::vector<SpectralFrame> track(const Model& model, const TimeGrid& grid,
                                 const GaugeReference& gauge) {
  if (gauge.mode() == GaugeReference::Mode::Initial && gauge.vectors().size() != model.dim()) {
    throw DimensionMismatch("gauge reference needs one vector per level");
  }
  if (gauge.mode() == GaugeReference::Mode::Analytic && !model.has_analytic_eigenbasis()) {
    throw InvalidInput("analytic gauge requested for a model without an analytic eigenbasis");
  }

  std::vector<SpectralFrame> frames;
  frames.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid.at(k);
    SpectralFrame f = diagonalize(model, k, t);

    const std::vector<StateVector>* reference = nullptr;
    std::vector<StateVector> analytic;
    if (gauge.mode() == GaugeReference::Mode::Analytic) {
      analytic = model.analytic_eigenbasis(t);
      reference = &analytic;
    } else if (k == 0 && gauge.mode() == GaugeReference::Mode::Initial) {
      reference = &gauge.vectors();
    }

    if (k > 0) permute(f, match_levels(frames.back().eigenvectors, f.eigenvectors, k, t));
    if (reference != nullptr) {
      if (k == 0) permute(f, match_levels(*reference, f.eigenvectors, k, t));
      for (std::size_t i = 0; i < f.dim(); ++i) align_phase(f.eigenvectors[i], (*reference)[i]);
    } else if (k > 0) {
      for (std::size_t i = 0; i < f.dim(); ++i)
        align_phase(f.eigenvectors[i], frames.back().eigenvectors[i]);
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

StateVector eigen_derivative_fd(std::span<const SpectralFrame> frames, const TimeGrid& grid,
                                std::size_t k, std::size_t level) {
  if (frames.size() != grid.size()) throw DimensionMismatch("frames do not match the grid");
  if (grid.steps() < 2) throw InvalidInput("finite differences need at least two steps");
  if (k >= frames.size()) throw InvalidInput("sample index out of range");
  if (level >= frames[k].dim()) throw InvalidInput("level index out of range");

  const double inv = 1.0 / (2.0 * grid.step());
  auto v = [&](std::size_t j) -> const StateVector& { return frames[j].eigenvectors[level]; };
  StateVector d(frames[k].dim());
  if (k == 0) {
    d = Complex(4.0) * (v(1) - v(0)) - (v(2) - v(0));
  } else if (k + 1 == frames.size()) {
    d = (v(k - 2) - v(k)) - Complex(4.0) * (v(k - 1) - v(k));
  } else {
    d = v(k + 1) - v(k - 1);
  }
  d *= inv;
  return d;
}

double checked_gap(const SpectralFrame& frame, std::size_t m, std::size_t n) {
  if (m >= frame.dim() || n >= frame.dim()) throw InvalidInput("level index out of range");
  double scale = 1.0;
  for (const double e : frame.eigenvalues) scale = std::max(scale, std::abs(e));
  const double gap = frame.eigenvalues[m] - frame.eigenvalues[n];
  if (std::abs(gap) <= kDegeneracyTolerance * scale) {
    throw Degeneracy("levels " + std::to_string(m + 1) + " and " + std::to_string(n + 1) +
                         " are degenerate at t = " + std::to_string(frame.t),
                     0, frame.t);
  }
  return gap;
}

StateVector eigen_derivative_pert(const SpectralFrame& frame, const HermitianOperator& hdot,
                                  std::size_t level) {
  if (hdot.dim() != frame.dim()) throw DimensionMismatch("eigen_derivative_pert: dimension");
  const StateVector& vi = frame.eigenvectors.at(level);
  const StateVector hdot_vi = hdot.matrix() * vi;
  StateVector d(frame.dim());
  for (std::size_t m = 0; m < frame.dim(); ++m) {
    if (m == level) continue;
    const double gap = -checked_gap(frame, m, level);  // E_i - E_m
    const Complex coeff = inner(frame.eigenvectors[m], hdot_vi) / gap;
    d += coeff * frame.eigenvectors[m];
  }
  return d;
}

void attach_derivatives(std::span<SpectralFrame> frames, const Model& model,
                        const TimeGrid& grid, DerivativeMethod method) {
  std::vector<std::vector<StateVector>> all(frames.size());
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const std::size_t dim = frames[k].dim();
    all[k].reserve(dim);
    if (method == DerivativeMethod::FiniteDifference) {
      for (std::size_t i = 0; i < dim; ++i) all[k].push_back(eigen_derivative_fd(frames, grid, k, i));
      continue;
    }
    const HermitianOperator hdot = model.derivative(frames[k].t);
    for (std::size_t i = 0; i < dim; ++i) {
      StateVector d = eigen_derivative_pert(frames[k], hdot, i);
      const StateVector fd = eigen_derivative_fd(frames, grid, k, i);
      const double connection = inner(frames[k].eigenvectors[i], fd).imag();
      d += Complex(0.0, connection) * frames[k].eigenvectors[i];
      all[k].push_back(std::move(d));
    }
  }
  for (std::size_t k = 0; k < frames.size(); ++k) frames[k].derivatives = std::move(all[k]);
}

BerryPhaseAccumulator berry_phase(std::span<const SpectralFrame> frames, const TimeGrid& grid,
                                  std::size_t level) {
  if (frames.size() != grid.size()) throw DimensionMismatch("frames do not match the grid");
  BerryPhaseAccumulator acc;
  acc.level = level;
  acc.beta.reserve(frames.size());
  acc.rate.reserve(frames.size());
  for (const SpectralFrame& f : frames) {
    if (f.derivatives.size() != f.dim()) throw InvalidInput("berry_phase needs eigenvector derivatives");
    const Complex connection = inner(f.eigenvectors.at(level), f.derivatives[level]);
    acc.rate.push_back(-f.eigenvalues[level] + kI * connection);
  }
  Complex integral = 0.0;
  acc.beta.push_back(0.0);
  for (std::size_t k = 1; k < frames.size(); ++k) {
    const double h = frames[k].t - frames[k - 1].t;
    integral += 0.5 * h * (acc.rate[k - 1] + acc.rate[k]);
    acc.beta.push_back(integral.real());
    acc.max_imaginary_residue = std::max(acc.max_imaginary_residue, std::abs(integral.imag()));
  }
  return acc;
}

double qac_ratio(const SpectralFrame& frame, std::size_t m, std::size_t n) {
  if (m == n) throw InvalidInput("qac_ratio needs two distinct levels");
  const double gap = checked_gap(frame, m, n);
  return std::abs(inner(frame.eigenvectors[m], frame.derivatives.at(n))) / std::abs(gap);
}

}  // namespace adiabat
