#pragma once

// Time-dependent Hamiltonians: the rotating-field spin-1/2 (Schwinger) model
// with its closed-form eigensystem and amplitudes, the unitarily transformed
// system H_b = -U_a^dagger H_a U_a, and user-supplied callback models.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "adiabat/linalg.hpp"

namespace adiabat {

/// Field strength omega0 > 0, rotation rate omega >= 0, cone angle theta in [0, pi].
struct SchwingerParams {
  double omega0 = 1.0;
  double omega = 0.0;
  double theta = 0.0;

  /// Throws InvalidInput if any field is out of range or not finite.
  void validate() const;
  /// sqrt(omega0^2 + omega^2 - 2 omega0 omega cos theta)
  double omega_tilde() const;
};

/// (omega0/2) [[cos th, sin th e^{-i w t}], [sin th e^{i w t}, -cos th]]
HermitianOperator schwinger_hamiltonian(const SchwingerParams& p, double t);
HermitianOperator schwinger_hamiltonian_derivative(const SchwingerParams& p, double t);

struct SchwingerEigensystem {
  double e1 = 0.0;
  double e2 = 0.0;
  StateVector v1;
  StateVector v2;
};

/// Closed-form eigensystem in the gauge
///   v1 = (e^{-iwt/2} sin(th/2), -e^{iwt/2} cos(th/2)),
///   v2 = (e^{-iwt/2} cos(th/2),  e^{iwt/2} sin(th/2)).
SchwingerEigensystem schwinger_analytic_eigensystem(const SchwingerParams& p, double t);

struct AnalyticSolution {
  Complex c1;
  Complex c2;
  double omega_tilde = 0.0;
};

/// Exact amplitudes c_i = <E_i(t)|psi(t)> for psi(0) = |E_1(0)>, in the gauge
/// of schwinger_analytic_eigensystem.
AnalyticSolution schwinger_analytic_amplitudes(const SchwingerParams& p, double t);

/// -U_a^dagger H_a U_a
HermitianOperator transformed_hamiltonian(const UnitaryOperator& u_a,
                                          const HermitianOperator& h_a);
/// -U_a^dagger dH_a/dt U_a (the commutator terms from dU_a/dt cancel).
HermitianOperator transformed_hamiltonian_derivative(const UnitaryOperator& u_a,
                                                     const HermitianOperator& hdot_a);

/// Propagator of a model sampled on a uniform table. Values between table
/// points are reached with one midpoint-exponential step from the nearest
/// lower entry, so lookups at table points and half-points of a grid with
/// twice the table spacing are exact table reads.
class PropagatorTable;

/// A time-dependent Hamiltonian with its time derivative. Value type; copies
/// share immutable state and are safe to use from several threads.
class Model {
 public:
  enum class Kind { Schwinger, Transformed, Custom };

  using OperatorFn = std::function<HermitianOperator(double)>;
  /// Instantaneous eigenvectors in a chosen smooth gauge, ascending energy.
  using EigenbasisFn = std::function<std::vector<StateVector>(double)>;

  static Model schwinger(const SchwingerParams& params);

  /// Callback model. When `derivative` is empty, dH/dt is taken by central
  /// differences with step `fd_step`.
  static Model custom(std::size_t dim, OperatorFn hamiltonian, OperatorFn derivative = {},
                      double fd_step = 1e-5, EigenbasisFn eigenbasis = {});

  /// System B of the Marzlin-Sanders construction, H_b(t) = -U_a^dagger H_a U_a,
  /// with U_a tabulated from `base` on [t_start, t_end] using `table_steps`
  /// midpoint-exponential steps.
  static Model transformed(const Model& base, double t_start, double t_end,
                           std::size_t table_steps);

  Kind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }

  HermitianOperator hamiltonian(double t) const { return hamiltonian_(t); }
  HermitianOperator derivative(double t) const { return derivative_(t); }

  bool has_analytic_eigenbasis() const noexcept { return static_cast<bool>(eigenbasis_); }
  /// Throws InvalidInput when the model has no analytic eigenbasis.
  std::vector<StateVector> analytic_eigenbasis(double t) const;

  const std::optional<SchwingerParams>& schwinger_params() const noexcept {
    return schwinger_;
  }
  /// Propagator of the underlying system A for transformed models.
  std::shared_ptr<const PropagatorTable> base_propagator() const noexcept { return table_; }

 private:
  Model() = default;

  Kind kind_ = Kind::Custom;
  std::size_t dim_ = 0;
  OperatorFn hamiltonian_;
  OperatorFn derivative_;
  EigenbasisFn eigenbasis_;
  std::optional<SchwingerParams> schwinger_;
  std::shared_ptr<const PropagatorTable> table_;
};

class PropagatorTable {
 public:
  PropagatorTable(const Model& model, double t_start, double t_end, std::size_t steps);

  UnitaryOperator at(double t) const;
  double t_start() const noexcept { return t_start_; }
  double t_end() const noexcept { return t_end_; }

 private:
  Model model_;
  double t_start_;
  double t_end_;
  double h_;
  std::vector<UnitaryOperator> table_;
};

/// Seeded smooth Hermitian model of dimension `dim`:
///   H(t) = A0 + sin(0.7 t) A1 + cos(1.3 t) A2,
/// with A0 = diag(-dim+1, -dim+3, ..., dim-1) plus a small random Hermitian
/// part and A1, A2 small random Hermitian matrices. The same seed gives the
/// same model on every platform.
Model random_smooth_model(std::size_t dim, std::uint64_t seed);

/// Constant Hamiltonian.
Model static_model(const HermitianOperator& h);

}  // namespace adiabat
