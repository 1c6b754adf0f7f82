#include "adiabat/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "adiabat/errors.hpp"

namespace adiabat {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": dimension mismatch (" +
                            std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

// ---------------------------------------------------------------- StateVector

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw InvalidInput("basis index out of range");
  StateVector v(dim);
  v[index] = 1.0;
  return v;
}

double StateVector::squared_norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

double StateVector::norm() const { return std::sqrt(squared_norm()); }

StateVector& StateVector::operator+=(const StateVector& other) {
  require_same_dim(dim(), other.dim(), "StateVector +=");
  for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] += other.amps_[i];
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& other) {
  require_same_dim(dim(), other.dim(), "StateVector -=");
  for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] -= other.amps_[i];
  return *this;
}

StateVector& StateVector::operator*=(Complex scale) {
  for (auto& a : amps_) a *= scale;
  return *this;
}

StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
StateVector operator*(Complex scale, StateVector v) { return v *= scale; }

Complex inner(const StateVector& u, const StateVector& v) {
  require_same_dim(u.dim(), v.dim(), "inner");
  Complex s = 0.0;
  for (std::size_t i = 0; i < u.dim(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

// --------------------------------------------------------------------- Matrix

Matrix::Matrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : dim_(rows.size()), data_() {
  data_.reserve(dim_ * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) throw DimensionMismatch("Matrix: rows must form a square");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(std::size_t dim) {
  Matrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> entries) {
  Matrix m(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

Matrix Matrix::adjoint() const {
  Matrix r(dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) r(j, i) = std::conj((*this)(i, j));
  return r;
}

double Matrix::max_norm() const {
  double m = 0.0;
  for (const auto& x : data_) m = std::max(m, std::abs(x));
  return m;
}

double Matrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& x : data_) s += std::norm(x);
  return std::sqrt(s);
}

Complex Matrix::trace() const {
  Complex s = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) s += (*this)(i, i);
  return s;
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_dim(dim_, other.dim_, "Matrix +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_dim(dim_, other.dim_, "Matrix -=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(Complex scale) {
  for (auto& x : data_) x *= scale;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Complex scale, Matrix m) { return m *= scale; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  require_same_dim(a.dim(), b.dim(), "Matrix *");
  const std::size_t n = a.dim();
  Matrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

StateVector operator*(const Matrix& m, const StateVector& v) {
  require_same_dim(m.dim(), v.dim(), "Matrix * StateVector");
  StateVector r(v.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    Complex s = 0.0;
    for (std::size_t j = 0; j < m.dim(); ++j) s += m(i, j) * v[j];
    r[i] = s;
  }
  return r;
}

double max_abs_difference(const Matrix& a, const Matrix& b) {
  require_same_dim(a.dim(), b.dim(), "max_abs_difference");
  double m = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

// ---------------------------------------------------------- HermitianOperator

HermitianOperator::HermitianOperator(const Matrix& entries) : m_(entries.dim()) {
  const std::size_t n = entries.dim();
  const double tol = kTolerance * std::max(1.0, entries.max_norm());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const Complex a = entries(i, j);
      const Complex b = entries(j, i);
      if (std::abs(a - std::conj(b)) > tol) {
        throw NotHermitian("entry (" + std::to_string(i) + "," + std::to_string(j) +
                           ") differs from the conjugate of its transpose");
      }
      const Complex mean = 0.5 * (a + std::conj(b));
      if (i == j) {
        m_(i, i) = mean.real();
      } else {
        m_(i, j) = mean;
        m_(j, i) = std::conj(mean);
      }
    }
  }
}

HermitianOperator HermitianOperator::zero(std::size_t dim) {
  return HermitianOperator(Matrix(dim));
}

Complex HermitianOperator::expectation(const StateVector& u, const StateVector& v) const {
  return inner(u, m_ * v);
}

// ----------------------------------------------------------- UnitaryOperator

UnitaryOperator::UnitaryOperator(const Matrix& entries) : m_(entries) {
  if (unitarity_defect() > kTolerance) {
    throw InvalidInput("matrix is not unitary to 1e-10");
  }
}

UnitaryOperator UnitaryOperator::identity(std::size_t dim) {
  return trusted(Matrix::identity(dim));
}

UnitaryOperator UnitaryOperator::trusted(Matrix entries) {
  UnitaryOperator u;
  u.m_ = std::move(entries);
  return u;
}

UnitaryOperator UnitaryOperator::adjoint() const { return trusted(m_.adjoint()); }

double UnitaryOperator::unitarity_defect() const {
  return max_abs_difference(m_.adjoint() * m_, Matrix::identity(dim()));
}

UnitaryOperator operator*(const UnitaryOperator& a, const UnitaryOperator& b) {
  return UnitaryOperator::trusted(a.matrix() * b.matrix());
}

StateVector operator*(const UnitaryOperator& u, const StateVector& v) {
  return u.matrix() * v;
}

// ------------------------------------------------------------------ Jacobi

double EigenSystem::min_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < eigenvalues.size(); ++i)
    gap = std::min(gap, std::abs(eigenvalues[i] - eigenvalues[i - 1]));
  return gap;
}

void fix_phase_first_component(StateVector& v, double threshold) {
  for (std::size_t i = 0; i < v.dim(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag > threshold) {
      v *= std::conj(v[i]) / mag;
      v[i] = mag;
      return;
    }
  }
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// Annihilates a(p,q) with the unitary J = diag(1, e^{-i phi}) * R(c, s), where
// phi = arg a(p,q) and R is the real symmetric Jacobi rotation.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
  const Complex apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const Complex phase = apq / mag;  // e^{i phi}
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();

  const double tau = (aqq - app) / (2.0 * mag);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  const Complex j00 = c;
  const Complex j01 = s;
  const Complex j10 = -s * std::conj(phase);
  const Complex j11 = c * std::conj(phase);

  const std::size_t n = a.dim();
  for (std::size_t k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * j00 + akq * j10;
    a(k, q) = akp * j01 + akq * j11;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = std::conj(j00) * apk + std::conj(j10) * aqk;
    a(q, k) = std::conj(j01) * apk + std::conj(j11) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  for (std::size_t k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = vkp * j00 + vkq * j10;
    v(k, q) = vkp * j01 + vkq * j11;
  }
}

}  // namespace

EigenSystem hermitian_eigendecompose(const HermitianOperator& h, const JacobiOptions& options) {
  const std::size_t n = h.dim();
  Matrix a = h.matrix();
  Matrix v = Matrix::identity(n);
  const double scale = a.frobenius_norm();
  const double stop = options.relative_tolerance * scale;

  int sweep = 0;
  while (off_diagonal_norm(a) > stop) {
    if (sweep++ == options.max_sweeps) {
      throw ConvergenceFailure("Jacobi eigensolver did not converge in " +
                               std::to_string(options.max_sweeps) + " sweeps");
    }
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() < a(y, y).real();
  });

  EigenSystem es;
  es.eigenvalues.reserve(n);
  es.eigenvectors.reserve(n);
  for (const std::size_t k : order) {
    es.eigenvalues.push_back(a(k, k).real());
    StateVector col(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = v(i, k);
    fix_phase_first_component(col);
    es.eigenvectors.push_back(std::move(col));
  }
  return es;
}

UnitaryOperator unitary_exponential(const HermitianOperator& h, double s) {
  const std::size_t n = h.dim();
  if (s == 0.0) return UnitaryOperator::identity(n);
  const EigenSystem es = hermitian_eigendecompose(h);
  Matrix u(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Complex phase = std::exp(-kI * (s * es.eigenvalues[k]));
    const StateVector& vk = es.eigenvectors[k];
    for (std::size_t i = 0; i < n; ++i) {
      const Complex left = phase * vk[i];
      for (std::size_t j = 0; j < n; ++j) u(i, j) += left * std::conj(vk[j]);
    }
  }
  return UnitaryOperator::trusted(std::move(u));
}

}  // namespace adiabat
