#pragma once

// Dense complex linear algebra for small systems (2 <= N <= 64): state
// vectors, square matrices, a cyclic Jacobi Hermitian eigensolver and the
// unitary exponential exp(-i s H).

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace adiabat {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::size_t dim) : amps_(dim) {}
  explicit StateVector(std::vector<Complex> amps) : amps_(std::move(amps)) {}
  StateVector(std::initializer_list<Complex> amps) : amps_(amps) {}

  static StateVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const noexcept { return amps_.size(); }
  Complex& operator[](std::size_t i) { return amps_[i]; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

  std::span<const Complex> amplitudes() const noexcept { return amps_; }
  auto begin() const noexcept { return amps_.begin(); }
  auto end() const noexcept { return amps_.end(); }

  double norm() const;
  double squared_norm() const;

  StateVector& operator+=(const StateVector& other);
  StateVector& operator-=(const StateVector& other);
  StateVector& operator*=(Complex scale);

 private:
  std::vector<Complex> amps_;
};

StateVector operator+(StateVector a, const StateVector& b);
StateVector operator-(StateVector a, const StateVector& b);
StateVector operator*(Complex scale, StateVector v);

/// <u|v>: conjugate-linear in u, linear in v.
Complex inner(const StateVector& u, const StateVector& v);

/// Square complex matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}
  Matrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static Matrix identity(std::size_t dim);
  static Matrix diagonal(std::span<const double> entries);

  std::size_t dim() const noexcept { return dim_; }
  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const {
    return data_[i * dim_ + j];
  }

  Matrix adjoint() const;
  /// Largest absolute entry.
  double max_norm() const;
  double frobenius_norm() const;
  Complex trace() const;

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(Complex scale);

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Complex scale, Matrix m);
Matrix operator*(const Matrix& a, const Matrix& b);
StateVector operator*(const Matrix& m, const StateVector& v);

/// max |(A - B)_ij|; throws DimensionMismatch on shape mismatch.
double max_abs_difference(const Matrix& a, const Matrix& b);

/// Hermitian N x N operator. Construction validates the entries against their
/// conjugate transpose (1e-12, scaled by max(1, max-norm)) and then stores the
/// exactly Hermitian part.
class HermitianOperator {
 public:
  static constexpr double kTolerance = 1e-12;

  HermitianOperator() = default;
  explicit HermitianOperator(const Matrix& entries);

  static HermitianOperator zero(std::size_t dim);

  std::size_t dim() const noexcept { return m_.dim(); }
  const Matrix& matrix() const noexcept { return m_; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  /// <u|H|v>
  Complex expectation(const StateVector& u, const StateVector& v) const;

 private:
  Matrix m_;
};

/// Unitary operator. The public constructor verifies U^dagger U = I to 1e-10.
class UnitaryOperator {
 public:
  static constexpr double kTolerance = 1e-10;

  UnitaryOperator() = default;
  explicit UnitaryOperator(const Matrix& entries);

  static UnitaryOperator identity(std::size_t dim);
  /// Wraps a product of unitaries without re-checking.
  static UnitaryOperator trusted(Matrix entries);

  std::size_t dim() const noexcept { return m_.dim(); }
  const Matrix& matrix() const noexcept { return m_; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  UnitaryOperator adjoint() const;
  /// max |(U^dagger U - I)_ij|
  double unitarity_defect() const;

 private:
  Matrix m_;
};

UnitaryOperator operator*(const UnitaryOperator& a, const UnitaryOperator& b);
StateVector operator*(const UnitaryOperator& u, const StateVector& v);

struct EigenSystem {
  std::vector<double> eigenvalues;  // ascending
  std::vector<StateVector> eigenvectors;

  /// Smallest distance between consecutive eigenvalues.
  double min_gap() const;
};

struct JacobiOptions {
  double relative_tolerance = 1e-14;
  int max_sweeps = 100;
};

/// Cyclic Jacobi diagonalization. Eigenvectors are orthonormal, sorted by
/// ascending eigenvalue, and phase-fixed so that their first component with
/// modulus above 1e-12 is real positive. Throws ConvergenceFailure if the
/// off-diagonal norm has not dropped below tolerance * ||H||_F after
/// max_sweeps sweeps.
EigenSystem hermitian_eigendecompose(const HermitianOperator& h,
                                     const JacobiOptions& options = {});

/// exp(-i s H) built from the eigendecomposition of H.
UnitaryOperator unitary_exponential(const HermitianOperator& h, double s);

/// Multiplies v by the unit phase that makes its first component with
/// modulus above `threshold` real positive.
void fix_phase_first_component(StateVector& v, double threshold = 1e-12);

}  // namespace adiabat
