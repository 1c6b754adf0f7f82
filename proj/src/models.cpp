#include "adiabat/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "adiabat/errors.hpp"

namespace adiabat {

void SchwingerParams::validate() const {
  if (!std::isfinite(omega0) || omega0 <= 0.0)
    throw InvalidInput("omega0 must be a finite positive number");
  if (!std::isfinite(omega) || omega < 0.0)
    throw InvalidInput("omega must be a finite non-negative number");
  if (!std::isfinite(theta) || theta < 0.0 || theta > std::numbers::pi)
    throw InvalidInput("theta must lie in [0, pi]");
}

double SchwingerParams::omega_tilde() const {
  return std::sqrt(omega0 * omega0 + omega * omega - 2.0 * omega0 * omega * std::cos(theta));
}

HermitianOperator schwinger_hamiltonian(const SchwingerParams& p, double t) {
  p.validate();
  const double half = 0.5 * p.omega0;
  const Complex off = half * std::sin(p.theta) * std::exp(-kI * (p.omega * t));
  Matrix m{{half * std::cos(p.theta), off}, {std::conj(off), -half * std::cos(p.theta)}};
  return HermitianOperator(m);
}

HermitianOperator schwinger_hamiltonian_derivative(const SchwingerParams& p, double t) {
  p.validate();
  const Complex off =
      -kI * p.omega * 0.5 * p.omega0 * std::sin(p.theta) * std::exp(-kI * (p.omega * t));
  Matrix m{{0.0, off}, {std::conj(off), 0.0}};
  return HermitianOperator(m);
}

SchwingerEigensystem schwinger_analytic_eigensystem(const SchwingerParams& p, double t) {
  p.validate();
  const Complex down = std::exp(-kI * (0.5 * p.omega * t));
  const Complex up = std::exp(kI * (0.5 * p.omega * t));
  const double s = std::sin(0.5 * p.theta);
  const double c = std::cos(0.5 * p.theta);
  return SchwingerEigensystem{
      .e1 = -0.5 * p.omega0,
      .e2 = 0.5 * p.omega0,
      .v1 = StateVector{down * s, -up * c},
      .v2 = StateVector{down * c, up * s},
  };
}

AnalyticSolution schwinger_analytic_amplitudes(const SchwingerParams& p, double t) {
  p.validate();
  const double wt = p.omega_tilde();
  AnalyticSolution sol;
  sol.omega_tilde = wt;
  if (wt == 0.0) {
    // omega = omega0 and theta = 0: H is static in the rotating gauge.
    sol.c1 = Complex(1.0, 0.5 * (p.omega0 - p.omega * std::cos(p.theta)) * t);
    sol.c2 = 0.0;
    return sol;
  }
  const double half = 0.5 * wt * t;
  sol.c1 = Complex(std::cos(half), std::sin(half) * (p.omega0 - p.omega * std::cos(p.theta)) / wt);
  sol.c2 = kI * (p.omega / wt) * std::sin(p.theta) * std::sin(half);
  return sol;
}

HermitianOperator transformed_hamiltonian(const UnitaryOperator& u_a,
                                          const HermitianOperator& h_a) {
  if (u_a.dim() != h_a.dim()) throw DimensionMismatch("transformed_hamiltonian: dimension mismatch");
  return HermitianOperator(Complex(-1.0) * (u_a.matrix().adjoint() * h_a.matrix() * u_a.matrix()));
}

HermitianOperator transformed_hamiltonian_derivative(const UnitaryOperator& u_a,
                                                     const HermitianOperator& hdot_a) {
  return transformed_hamiltonian(u_a, hdot_a);
}

// ---------------------------------------------------------------------- Model

Model Model::schwinger(const SchwingerParams& params) {
  params.validate();
  Model m;
  m.kind_ = Kind::Schwinger;
  m.dim_ = 2;
  m.schwinger_ = params;
  m.hamiltonian_ = [params](double t) { return schwinger_hamiltonian(params, t); };
  m.derivative_ = [params](double t) { return schwinger_hamiltonian_derivative(params, t); };
  m.eigenbasis_ = [params](double t) {
    auto es = schwinger_analytic_eigensystem(params, t);
    return std::vector<StateVector>{std::move(es.v1), std::move(es.v2)};
  };
  return m;
}

Model Model::custom(std::size_t dim, OperatorFn hamiltonian, OperatorFn derivative,
                    double fd_step, EigenbasisFn eigenbasis) {
  if (dim < 2) throw InvalidInput("model dimension must be at least 2");
  if (!hamiltonian) throw InvalidInput("custom model needs a Hamiltonian callback");
  if (!derivative && !(fd_step > 0.0)) throw InvalidInput("fd_step must be positive");
  Model m;
  m.kind_ = Kind::Custom;
  m.dim_ = dim;
  m.hamiltonian_ = [dim, h = std::move(hamiltonian)](double t) {
    HermitianOperator op = h(t);
    if (op.dim() != dim) throw DimensionMismatch("custom Hamiltonian has the wrong dimension");
    return op;
  };
  if (derivative) {
    m.derivative_ = std::move(derivative);
  } else {
    m.derivative_ = [h = m.hamiltonian_, fd_step](double t) {
      Matrix d = h(t + fd_step).matrix() - h(t - fd_step).matrix();
      d *= 1.0 / (2.0 * fd_step);
      return HermitianOperator(d);
    };
  }
  m.eigenbasis_ = std::move(eigenbasis);
  return m;
}

Model Model::transformed(const Model& base, double t_start, double t_end,
                         std::size_t table_steps) {
  auto table = std::make_shared<const PropagatorTable>(base, t_start, t_end, table_steps);
  Model m;
  m.kind_ = Kind::Transformed;
  m.dim_ = base.dim();
  m.table_ = table;
  m.hamiltonian_ = [base, table](double t) {
    return transformed_hamiltonian(table->at(t), base.hamiltonian(t));
  };
  m.derivative_ = [base, table](double t) {
    return transformed_hamiltonian_derivative(table->at(t), base.derivative(t));
  };
  if (base.has_analytic_eigenbasis()) {
    // H_b U_a^dagger |E_i^a> = -E_i U_a^dagger |E_i^a>: the order reverses.
    m.eigenbasis_ = [base, table](double t) {
      const UnitaryOperator ua_dag = table->at(t).adjoint();
      std::vector<StateVector> a = base.analytic_eigenbasis(t);
      std::vector<StateVector> b;
      b.reserve(a.size());
      for (auto it = a.rbegin(); it != a.rend(); ++it) b.push_back(ua_dag * *it);
      return b;
    };
  }
  return m;
}

std::vector<StateVector> Model::analytic_eigenbasis(double t) const {
  if (!eigenbasis_) throw InvalidInput("model has no analytic eigenbasis");
  return eigenbasis_(t);
}

// ------------------------------------------------------------ PropagatorTable

PropagatorTable::PropagatorTable(const Model& model, double t_start, double t_end,
                                 std::size_t steps)
    : model_(model), t_start_(t_start), t_end_(t_end) {
  if (steps == 0 || !(t_end > t_start)) throw InvalidInput("propagator table needs a valid span");
  h_ = (t_end - t_start) / static_cast<double>(steps);
  table_.reserve(steps + 1);
  table_.push_back(UnitaryOperator::identity(model.dim()));
  for (std::size_t k = 0; k < steps; ++k) {
    const double mid = t_start + (static_cast<double>(k) + 0.5) * h_;
    table_.push_back(unitary_exponential(model.hamiltonian(mid), h_) * table_.back());
  }
}

UnitaryOperator PropagatorTable::at(double t) const {
  const double x = (t - t_start_) / h_;
  const double last = static_cast<double>(table_.size() - 1);
  if (x < -1.0 || x > last + 1.0) {
    throw InvalidInput("time " + std::to_string(t) + " lies outside the propagator table");
  }
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 && nearest >= 0.0 && nearest <= last) {
    return table_[static_cast<std::size_t>(nearest)];
  }
  const double j = std::clamp(std::floor(x), 0.0, last);
  const double tj = t_start_ + j * h_;
  const double delta = t - tj;
  return unitary_exponential(model_.hamiltonian(tj + 0.5 * delta), delta) *
         table_[static_cast<std::size_t>(j)];
}

// ------------------------------------------------------------ canned models

namespace {

// splitmix64: fixed output for a fixed seed on every platform.
class SeededUniform {
 public:
  explicit SeededUniform(std::uint64_t seed) : state_(seed) {}

  /// Uniform in [-1, 1).
  double next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    return 2.0 * (static_cast<double>(z >> 11) * 0x1.0p-53) - 1.0;
  }

 private:
  std::uint64_t state_;
};

Matrix random_hermitian(std::size_t dim, double scale, SeededUniform& rng) {
  Matrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    m(i, i) = scale * rng.next();
    for (std::size_t j = i + 1; j < dim; ++j) {
      const Complex z(scale * rng.next(), scale * rng.next());
      m(i, j) = z;
      m(j, i) = std::conj(z);
    }
  }
  return m;
}

}  // namespace

Model random_smooth_model(std::size_t dim, std::uint64_t seed) {
  if (dim < 2) throw InvalidInput("model dimension must be at least 2");
  SeededUniform rng(seed);
  Matrix a0 = random_hermitian(dim, 0.1, rng);
  for (std::size_t i = 0; i < dim; ++i)
    a0(i, i) += 2.0 * static_cast<double>(i) - static_cast<double>(dim - 1);
  const Matrix a1 = random_hermitian(dim, 0.25, rng);
  const Matrix a2 = random_hermitian(dim, 0.25, rng);
  constexpr double w1 = 0.7;
  constexpr double w2 = 1.3;

  auto h = [a0, a1, a2](double t) {
    return HermitianOperator(a0 + Complex(std::sin(w1 * t)) * a1 + Complex(std::cos(w2 * t)) * a2);
  };
  auto hdot = [a1, a2](double t) {
    return HermitianOperator(Complex(w1 * std::cos(w1 * t)) * a1 -
                             Complex(w2 * std::sin(w2 * t)) * a2);
  };
  return Model::custom(dim, h, hdot);
}

Model static_model(const HermitianOperator& h) {
  return Model::custom(
      h.dim(), [h](double) { return h; },
      [n = h.dim()](double) { return HermitianOperator::zero(n); });
}

}  // namespace adiabat
