#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "adiabat/linalg.hpp"
#include "adiabat/models.hpp"

namespace adiabat {

/// Uniform grid t_k = t_start + k h, k = 0..steps, endpoints inclusive.
class TimeGrid {
 public:
  TimeGrid(double t_start, double t_end, std::size_t steps);

  double t_start() const noexcept { return t_start_; }
  double t_end() const noexcept { return t_end_; }
  std::size_t steps() const noexcept { return steps_; }
  std::size_t size() const noexcept { return steps_ + 1; }
  double step() const noexcept { return h_; }
  /// The last sample is pinned to t_end exactly.
  double at(std::size_t k) const;

 private:
  double t_start_;
  double t_end_;
  std::size_t steps_;
  double h_;
};

struct Trajectory {
  TimeGrid grid;
  std::vector<StateVector> states;
  std::vector<UnitaryOperator> propagators;  // empty unless requested
};

/// Midpoint exponential rule psi_{k+1} = exp(-i h H(t_k + h/2)) psi_k.
/// psi0 must be normalized to 1e-10.
Trajectory evolve(const Model& model, const StateVector& psi0, const TimeGrid& grid);

/// U_0 = I, U_{k+1} = exp(-i h H(t_k + h/2)) U_k; `states` is left empty.
Trajectory propagator_matrix(const Model& model, const TimeGrid& grid);

/// max_k max|U_k^dagger U_k - I| along the same recursion, without storing U_k.
double unitarity_drift(const Model& model, const TimeGrid& grid);

}  // namespace adiabat
