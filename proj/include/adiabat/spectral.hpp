#pragma once

// Instantaneous eigensystems along a time grid with a continuous gauge,
// eigenvector time derivatives by two independent routes, Berry-phase
// accumulation and the quantitative adiabatic ratio.

#include <cstddef>
#include <span>
#include <vector>

#include "adiabat/linalg.hpp"
#include "adiabat/models.hpp"
#include "adiabat/propagator.hpp"

namespace adiabat {

struct SpectralFrame {
  double t = 0.0;
  std::vector<double> eigenvalues;
  std::vector<StateVector> eigenvectors;
  /// d|E_i>/dt; empty until attach_derivatives runs.
  std::vector<StateVector> derivatives;
  double min_gap = 0.0;

  std::size_t dim() const noexcept { return eigenvalues.size(); }
};

/// How the free phase of each eigenvector is fixed.
///
///  - FirstComponent: at t_start the first non-negligible component of each
///    vector is real positive; afterwards every vector is rotated so that its
///    overlap with the same level at the previous sample is real positive.
///  - Initial: as FirstComponent, but the t_start vectors are phase-aligned to
///    caller-supplied reference vectors.
///  - Analytic: every sample is phase-aligned to the model's analytic
///    eigenbasis at that time. This reproduces gauges with a nonzero
///    connection <E_n|dE_n/dt>, which successive-overlap transport cannot.
class GaugeReference {
 public:
  enum class Mode { FirstComponent, Initial, Analytic };

  GaugeReference() = default;
  static GaugeReference first_component() { return {}; }
  static GaugeReference initial(std::vector<StateVector> vectors);
  static GaugeReference analytic();

  Mode mode() const noexcept { return mode_; }
  const std::vector<StateVector>& vectors() const noexcept { return vectors_; }

 private:
  Mode mode_ = Mode::FirstComponent;
  std::vector<StateVector> vectors_;
};

/// Levels are followed by maximal overlap with the previous sample, so labels
/// stay attached to states even if eigenvalue order changes. Throws Degeneracy
/// when a gap drops to 1e-12 ||H||_F or below, and LevelCrossing when some
/// level's best overlap with the previous sample falls below 0.5.
std::vector<SpectralFrame> track(const Model& model, const TimeGrid& grid,
                                 const GaugeReference& gauge = {});

/// Central difference (v_i(t_{k+1}) - v_i(t_{k-1})) / 2h in the interior and
/// second-order one-sided stencils at k = 0 and k = steps. Needs steps >= 2.
StateVector eigen_derivative_fd(std::span<const SpectralFrame> frames, const TimeGrid& grid,
                                std::size_t k, std::size_t level);

/// sum_{m != i} <E_m|dH/dt|E_i> / (E_i - E_m) |E_m>: the part of d|E_i>/dt
/// orthogonal to |E_i>. Throws Degeneracy on a vanishing gap.
StateVector eigen_derivative_pert(const SpectralFrame& frame, const HermitianOperator& hdot,
                                  std::size_t level);

enum class DerivativeMethod {
  FiniteDifference,
  /// Off-level part from eigen_derivative_pert, plus the gauge component
  /// i Im<E_i|dE_i/dt> |E_i> taken from the finite difference.
  Perturbative,
};

void attach_derivatives(std::span<SpectralFrame> frames, const Model& model,
                        const TimeGrid& grid, DerivativeMethod method);

struct BerryPhaseAccumulator {
  std::size_t level = 0;
  /// beta_n(t_k) = -int E_n + i int <E_n|dE_n/dt>, trapezoidal; beta[0] = 0.
  std::vector<double> beta;
  /// Rates -E_n + i<E_n|dE_n/dt> at each sample (real for a smooth gauge).
  std::vector<Complex> rate;
  /// Largest |Im| of the accumulated complex integral.
  double max_imaginary_residue = 0.0;
};

/// Needs derivatives on every frame.
BerryPhaseAccumulator berry_phase(std::span<const SpectralFrame> frames, const TimeGrid& grid,
                                  std::size_t level);

/// |<E_m|dE_n/dt>| / |E_m - E_n|
double qac_ratio(const SpectralFrame& frame, std::size_t m, std::size_t n);

/// Throws Degeneracy if |E_m - E_n| <= 1e-12 * max(1, max_i |E_i|).
double checked_gap(const SpectralFrame& frame, std::size_t m, std::size_t n);

}  // namespace adiabat
