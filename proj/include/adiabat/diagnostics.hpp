#pragma once

// The exact amplitude decomposition c_m = Q_m + R_m and the quantities around
// it: adiabatic state, difference vector D and its derivative, the smallness
// criteria on D, the equivalence and lambda identities, the reconstruction of
// c_n from dD/dt, and Schiff's first-order amplitude.
//
// Levels are 0-based throughout the library.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "adiabat/linalg.hpp"
#include "adiabat/models.hpp"
#include "adiabat/propagator.hpp"
#include "adiabat/spectral.hpp"

namespace adiabat {

struct AdiabaticState {
  double t = 0.0;
  StateVector vector;  // e^{i beta_n} |E_n>
};

/// c_i = <E_i|psi>
std::vector<Complex> amplitudes(const SpectralFrame& frame, const StateVector& psi);

AdiabaticState adiabatic_state(const SpectralFrame& frame, double beta_n, std::size_t n);

/// D = psi - psi_adi
StateVector difference_vector(const StateVector& psi, const AdiabaticState& adi);

/// dD/dt = -i H psi - [e^{i beta} dE_n/dt + i beta' e^{i beta} E_n], with
/// beta' = -E_n + i<E_n|dE_n/dt>. Composed analytically from the frame; D is
/// never differenced.
StateVector difference_vector_derivative(const HermitianOperator& h, const SpectralFrame& frame,
                                         const StateVector& psi, double beta_n, std::size_t n);

/// i e^{i beta_n} <E_m|dE_n/dt> / (E_m - E_n)
Complex q_term(const SpectralFrame& frame, double beta_n, std::size_t m, std::size_t n);

/// [-E_n <E_m|D> + i <E_m|dD/dt>] / (E_m - E_n)
Complex r_term(const SpectralFrame& frame, const StateVector& d, const StateVector& d_dot,
               std::size_t m, std::size_t n);

/// |c_m - Q_m - R_m|
double decomposition_residual(Complex c_m, Complex q_m, Complex r_m);

struct CriteriaFlags {
  /// ||D|| < margin |(E_m - E_n)/E_n|; empty when E_n = 0.
  std::optional<bool> difference_small;
  /// ||dD/dt|| < margin |E_m - E_n|
  bool derivative_small = false;
  /// ||i dD/dt - E_n D|| < margin |E_m - E_n|
  bool combination_small = false;

  /// ||D|| |E_n| / |E_m - E_n| (NaN when E_n = 0)
  double difference_ratio = 0.0;
  double derivative_ratio = 0.0;
  double combination_ratio = 0.0;

  /// The same three ratios with the vector norms replaced by the modulus of
  /// the projection onto <E_m|.
  double projected_difference_ratio = 0.0;
  double projected_derivative_ratio = 0.0;
  double projected_combination_ratio = 0.0;
};

CriteriaFlags criteria_check(const SpectralFrame& frame, const StateVector& d,
                             const StateVector& d_dot, std::size_t m, std::size_t n,
                             double margin = 0.1);

/// ||i dD/dt - E_n D||
double equivalence_residual(const StateVector& d, const StateVector& d_dot, double e_n);

/// e^{i beta_n} + i <E_n|dD/dt> / E_n; empty when E_n = 0.
std::optional<Complex> c_n_reconstruction(double beta_n, const StateVector& d_dot,
                                          const SpectralFrame& frame, std::size_t n);

/// i <E_m|dE_n/dt> / (E_m - E_n) (e^{i (E_m - E_n) t} - 1), with t the time
/// elapsed since the start of the evolution.
Complex schiff_amplitude(const SpectralFrame& frame, double elapsed, std::size_t m,
                         std::size_t n);

/// True when |E_n| <= 1e-12 max(1, max_i |E_i|).
bool energy_vanishes(const SpectralFrame& frame, std::size_t n);

struct DiagnosticsSample {
  double t = 0.0;
  std::vector<Complex> c;
  double beta_n = 0.0;
  /// Indexed by level; empty at m = n.
  std::vector<std::optional<Complex>> q;
  std::vector<std::optional<Complex>> r;
  std::vector<std::optional<Complex>> schiff;
  std::vector<std::optional<double>> qac;
  std::vector<std::optional<double>> decomposition_residual;
  std::vector<std::optional<CriteriaFlags>> criteria;
  double d_norm = 0.0;
  double d_dot_norm = 0.0;
  double lambda_residual = 0.0;      // |<E_n|dD/dt> + i E_n <E_n|D>|
  double equivalence_residual = 0.0;
  std::optional<double> reconstruction_residual;  // |c_n - reconstructed c_n|
  double norm_error = 0.0;                        // |sum |c_i|^2 - 1|
  double adiabatic_fidelity = 0.0;                // |<psi_adi|psi>|
};

struct DiagnosticsOptions {
  double criteria_margin = 0.1;
};

/// Per-sample diagnostics for level n. `frames` must carry derivatives and
/// `berry` must be accumulated for the same level.
std::vector<DiagnosticsSample> diagnose(const Model& model, const Trajectory& trajectory,
                                        std::span<const SpectralFrame> frames,
                                        const BerryPhaseAccumulator& berry, std::size_t n,
                                        const DiagnosticsOptions& options = {});

}  // namespace adiabat
