#include "adiabat/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adiabat/errors.hpp"

namespace adiabat {

TimeGrid::TimeGrid(double t_start, double t_end, std::size_t steps)
    : t_start_(t_start), t_end_(t_end), steps_(steps) {
  if (!std::isfinite(t_start) || !std::isfinite(t_end) || !(t_end > t_start))
    throw InvalidInput("time grid needs finite t_start < t_end");
  if (steps == 0) throw InvalidInput("time grid needs at least one step");
  h_ = (t_end - t_start) / static_cast<double>(steps);
}

double TimeGrid::at(std::size_t k) const {
  if (k > steps_) throw InvalidInput("time sample " + std::to_string(k) + " out of range");
  if (k == steps_) return t_end_;
  return t_start_ + static_cast<double>(k) * h_;
}

namespace {

UnitaryOperator step_operator(const Model& model, const TimeGrid& grid, std::size_t k) {
  const double mid = grid.at(k) + 0.5 * grid.step();
  return unitary_exponential(model.hamiltonian(mid), grid.step());
}

}  // namespace

Trajectory evolve(const Model& model, const StateVector& psi0, const TimeGrid& grid) {
  if (psi0.dim() != model.dim()) throw DimensionMismatch("evolve: initial state dimension");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw InvalidInput("evolve: initial state is not normalized");

  Trajectory traj{grid, {}, {}};
  traj.states.reserve(grid.size());
  traj.states.push_back(psi0);
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    traj.states.push_back(step_operator(model, grid, k) * traj.states.back());
  }
  return traj;
}

Trajectory propagator_matrix(const Model& model, const TimeGrid& grid) {
  Trajectory traj{grid, {}, {}};
  traj.propagators.reserve(grid.size());
  traj.propagators.push_back(UnitaryOperator::identity(model.dim()));
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    traj.propagators.push_back(step_operator(model, grid, k) * traj.propagators.back());
  }
  return traj;
}

double unitarity_drift(const Model& model, const TimeGrid& grid) {
  UnitaryOperator u = UnitaryOperator::identity(model.dim());
  double drift = 0.0;
  for (std::size_t k = 0; k < grid.steps(); ++k) {
    u = step_operator(model, grid, k) * u;
    drift = std::max(drift, u.unitarity_defect());
  }
  return drift;
}

}  // namespace adiabat
