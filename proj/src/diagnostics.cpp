#include "adiabat/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adiabat/errors.hpp"

namespace adiabat {

std::vector<Complex> amplitudes(const SpectralFrame& frame, const StateVector& psi) {
  std::vector<Complex> c;
  c.reserve(frame.dim());
  for (const StateVector& v : frame.eigenvectors) c.push_back(inner(v, psi));
  return c;
}

AdiabaticState adiabatic_state(const SpectralFrame& frame, double beta_n, std::size_t n) {
  return {frame.t, std::exp(kI * beta_n) * frame.eigenvectors.at(n)};
}

StateVector difference_vector(const StateVector& psi, const AdiabaticState& adi) {
  return psi - adi.vector;
}

StateVector difference_vector_derivative(const HermitianOperator& h, const SpectralFrame& frame,
                                         const StateVector& psi, double beta_n, std::size_t n) {
  const StateVector& e_n = frame.eigenvectors.at(n);
  const StateVector& e_n_dot = frame.derivatives.at(n);
  const Complex phase = std::exp(kI * beta_n);
  const Complex beta_rate = -frame.eigenvalues[n] + kI * inner(e_n, e_n_dot);

  StateVector d_dot = -kI * (h.matrix() * psi);
  d_dot -= phase * e_n_dot;
  d_dot -= (kI * beta_rate * phase) * e_n;
  return d_dot;
}

Complex q_term(const SpectralFrame& frame, double beta_n, std::size_t m, std::size_t n) {
  if (m == n) throw InvalidInput("Q_m is undefined for m = n");
  const double gap = checked_gap(frame, m, n);
  return kI * std::exp(kI * beta_n) * inner(frame.eigenvectors[m], frame.derivatives.at(n)) / gap;
}

Complex r_term(const SpectralFrame& frame, const StateVector& d, const StateVector& d_dot,
               std::size_t m, std::size_t n) {
  if (m == n) throw InvalidInput("R_m is undefined for m = n");
  const double gap = checked_gap(frame, m, n);
  const StateVector& e_m = frame.eigenvectors[m];
  return (-frame.eigenvalues[n] * inner(e_m, d) + kI * inner(e_m, d_dot)) / gap;
}

double decomposition_residual(Complex c_m, Complex q_m, Complex r_m) {
  return std::abs(c_m - q_m - r_m);
}

bool energy_vanishes(const SpectralFrame& frame, std::size_t n) {
  double scale = 1.0;
  for (const double e : frame.eigenvalues) scale = std::max(scale, std::abs(e));
  return std::abs(frame.eigenvalues.at(n)) <= 1e-12 * scale;
}

namespace {

// i dD/dt - E_n D
StateVector combination(const StateVector& d, const StateVector& d_dot, double e_n) {
  return kI * d_dot - Complex(e_n) * d;
}

}  // namespace

CriteriaFlags criteria_check(const SpectralFrame& frame, const StateVector& d,
                             const StateVector& d_dot, std::size_t m, std::size_t n,
                             double margin) {
  if (m == n) throw InvalidInput("criteria need two distinct levels");
  const double gap = std::abs(checked_gap(frame, m, n));
  const double e_n = frame.eigenvalues[n];
  const StateVector& e_m = frame.eigenvectors[m];
  const StateVector comb = combination(d, d_dot, e_n);

  CriteriaFlags f;
  f.derivative_ratio = d_dot.norm() / gap;
  f.combination_ratio = comb.norm() / gap;
  f.projected_derivative_ratio = std::abs(inner(e_m, d_dot)) / gap;
  f.projected_combination_ratio = std::abs(inner(e_m, comb)) / gap;
  if (energy_vanishes(frame, n)) {
    f.difference_ratio = std::numeric_limits<double>::quiet_NaN();
    f.projected_difference_ratio = std::numeric_limits<double>::quiet_NaN();
  } else {
    f.difference_ratio = d.norm() * std::abs(e_n) / gap;
    f.projected_difference_ratio = std::abs(inner(e_m, d)) * std::abs(e_n) / gap;
    f.difference_small = f.difference_ratio < margin;
  }
  f.derivative_small = f.derivative_ratio < margin;
  f.combination_small = f.combination_ratio < margin;
  return f;
}

double equivalence_residual(const StateVector& d, const StateVector& d_dot, double e_n) {
  return combination(d, d_dot, e_n).norm();
}

std::optional<Complex> c_n_reconstruction(double beta_n, const StateVector& d_dot,
                                          const SpectralFrame& frame, std::size_t n) {
  if (energy_vanishes(frame, n)) return std::nullopt;
  return std::exp(kI * beta_n) +
         kI * inner(frame.eigenvectors[n], d_dot) / frame.eigenvalues[n];
}

Complex schiff_amplitude(const SpectralFrame& frame, double elapsed, std::size_t m,
                         std::size_t n) {
  if (m == n) throw InvalidInput("Schiff amplitude needs two distinct levels");
  const double gap = checked_gap(frame, m, n);
  const Complex bracket = std::exp(kI * (gap * elapsed)) - 1.0;
  return kI * inner(frame.eigenvectors[m], frame.derivatives.at(n)) / gap * bracket;
}

std::vector<DiagnosticsSample> diagnose(const Model& model, const Trajectory& trajectory,
                                        std::span<const SpectralFrame> frames,
                                        const BerryPhaseAccumulator& berry, std::size_t n,
                                        const DiagnosticsOptions& options) {
  if (frames.size() != trajectory.states.size() || berry.beta.size() != frames.size()) {
    throw DimensionMismatch("diagnose: frames, states and phases must cover the same grid");
  }
  if (berry.level != n) throw InvalidInput("diagnose: Berry phase accumulated for another level");
  if (n >= model.dim()) throw InvalidInput("diagnose: level index out of range");

  const double t0 = trajectory.grid.t_start();
  std::vector<DiagnosticsSample> out;
  out.reserve(frames.size());
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const SpectralFrame& f = frames[k];
    const StateVector& psi = trajectory.states[k];
    const std::size_t dim = f.dim();
    const double beta = berry.beta[k];
    const HermitianOperator h = model.hamiltonian(f.t);

    DiagnosticsSample s;
    s.t = f.t;
    s.beta_n = beta;
    s.c = amplitudes(f, psi);
    const AdiabaticState adi = adiabatic_state(f, beta, n);
    const StateVector d = difference_vector(psi, adi);
    const StateVector d_dot = difference_vector_derivative(h, f, psi, beta, n);
    s.d_norm = d.norm();
    s.d_dot_norm = d_dot.norm();

    const StateVector& e_n = f.eigenvectors[n];
    const double en = f.eigenvalues[n];
    s.lambda_residual = std::abs(inner(e_n, d_dot) + kI * en * inner(e_n, d));
    s.equivalence_residual = equivalence_residual(d, d_dot, en);
    if (const auto rec = c_n_reconstruction(beta, d_dot, f, n)) {
      s.reconstruction_residual = std::abs(*rec - s.c[n]);
    }
    double prob = 0.0;
    for (const Complex& ci : s.c) prob += std::norm(ci);
    s.norm_error = std::abs(prob - 1.0);
    s.adiabatic_fidelity = std::abs(inner(adi.vector, psi));

    s.q.resize(dim);
    s.r.resize(dim);
    s.schiff.resize(dim);
    s.qac.resize(dim);
    s.decomposition_residual.resize(dim);
    s.criteria.resize(dim);
    for (std::size_t m = 0; m < dim; ++m) {
      if (m == n) continue;
      const Complex q = q_term(f, beta, m, n);
      const Complex r = r_term(f, d, d_dot, m, n);
      s.q[m] = q;
      s.r[m] = r;
      s.decomposition_residual[m] = decomposition_residual(s.c[m], q, r);
      s.qac[m] = qac_ratio(f, m, n);
      s.schiff[m] = schiff_amplitude(f, f.t - t0, m, n);
      s.criteria[m] = criteria_check(f, d, d_dot, m, n, options.criteria_margin);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace adiabat
