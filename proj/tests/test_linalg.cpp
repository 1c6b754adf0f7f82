#include <doctest.h>

#include <cmath>
#include <numbers>

#include "adiabat/errors.hpp"
#include "adiabat/linalg.hpp"
#include "adiabat/models.hpp"
#include "oracles.hpp"

using namespace adiabat;

namespace {

double reconstruction_error(const HermitianOperator& h, const EigenSystem& es) {
  Matrix r(h.dim());
  for (std::size_t k = 0; k < h.dim(); ++k)
    for (std::size_t i = 0; i < h.dim(); ++i)
      for (std::size_t j = 0; j < h.dim(); ++j)
        r(i, j) += es.eigenvalues[k] * es.eigenvectors[k][i] * std::conj(es.eigenvectors[k][j]);
  return max_abs_difference(r, h.matrix());
}

}  // namespace

TEST_CASE("inner product on basis vectors") {
  const auto e1 = StateVector::basis(2, 0);
  const auto e2 = StateVector::basis(2, 1);
  CHECK(inner(e1, e1) == Complex(1.0));
  CHECK(inner(e1, e2) == Complex(0.0));
}

TEST_CASE("inner product against a hand-expanded sum") {
  // u = (i, 0); v = H (0, 1) with H the Hadamard-like mix (1/sqrt2)[[1, 1], [1, -1]]
  // so v = (1/sqrt2, -1/sqrt2). <u|v> = conj(i) / sqrt2 = -i / sqrt2.
  const double r = 1.0 / std::sqrt(2.0);
  const StateVector u{Complex(0.0, 1.0), 0.0};
  const StateVector v{r, -r};
  const Complex got = inner(u, v);
  CHECK(got.real() == doctest::Approx(0.0));
  CHECK(got.imag() == doctest::Approx(-r));
}

TEST_CASE("inner product rejects mismatched dimensions") {
  CHECK_THROWS_AS(inner(StateVector(2), StateVector(3)), DimensionMismatch);
}

TEST_CASE("inner product is conjugate symmetric and conjugate-linear in the bra") {
  const StateVector u{Complex(0.3, -1.2), Complex(2.0, 0.5), Complex(-0.7, 0.1)};
  const StateVector v{Complex(1.1, 0.4), Complex(-0.2, 0.9), Complex(0.6, -0.6)};
  const Complex a(0.4, -2.5);
  CHECK(std::abs(inner(u, v) - std::conj(inner(v, u))) < 1e-15);
  CHECK(std::abs(inner(a * u, v) - std::conj(a) * inner(u, v)) < 1e-14);
  CHECK(std::abs(inner(u, a * v) - a * inner(u, v)) < 1e-14);
  CHECK(inner(u, u).imag() == 0.0);
  CHECK(inner(u, u).real() >= 0.0);
}

TEST_CASE("Hermitian operator validation") {
  CHECK_THROWS_AS(HermitianOperator(Matrix{{1.0, 2.0}, {3.0, 1.0}}), NotHermitian);
  CHECK_THROWS_AS(HermitianOperator(Matrix{{Complex(1.0, 0.1), 0.0}, {0.0, 1.0}}), NotHermitian);
  const HermitianOperator h(Matrix{{1.0, Complex(0.0, 2.0)}, {Complex(0.0, -2.0), -1.0}});
  CHECK(h(0, 1) == Complex(0.0, 2.0));
}

TEST_CASE("eigendecomposition of a diagonal matrix") {
  const double d[] = {0.5, -0.5};
  const EigenSystem es = hermitian_eigendecompose(HermitianOperator(Matrix::diagonal(d)));
  CHECK(es.eigenvalues[0] == doctest::Approx(-0.5));
  CHECK(es.eigenvalues[1] == doctest::Approx(0.5));
  CHECK(std::abs(es.eigenvectors[0][1] - 1.0) < 1e-15);
  CHECK(std::abs(es.eigenvectors[1][0] - 1.0) < 1e-15);
}

TEST_CASE("eigendecomposition of the rotating-field Hamiltonian at t = 0") {
  const SchwingerParams p{1.0, 0.3, std::numbers::pi / 3};
  const EigenSystem es = hermitian_eigendecompose(schwinger_hamiltonian(p, 0.0));
  CHECK(es.eigenvalues[0] == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(es.eigenvalues[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("eigendecomposition of a seeded random 4x4 Hermitian matrix") {
  const HermitianOperator h(oracle::random_hermitian(4, 42));
  const EigenSystem es = hermitian_eigendecompose(h);
  const double scale = h.matrix().max_norm();

  double trace = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    trace += es.eigenvalues[i];
    const StateVector residual = h.matrix() * es.eigenvectors[i] - es.eigenvalues[i] * es.eigenvectors[i];
    CHECK(oracle::max_abs(residual) <= 1e-10 * scale);
    for (std::size_t j = 0; j < 4; ++j) {
      const Complex ov = inner(es.eigenvectors[i], es.eigenvectors[j]);
      CHECK(std::abs(ov - (i == j ? 1.0 : 0.0)) <= 1e-10);
    }
    if (i > 0) CHECK(es.eigenvalues[i] > es.eigenvalues[i - 1]);
  }
  CHECK(std::abs(trace - h.matrix().trace().real()) <= 1e-12);
}

TEST_CASE("eigendecomposition reconstructs random Hermitian matrices") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::size_t n = 2 + seed % 15;
    const HermitianOperator h(oracle::random_hermitian(n, seed));
    const EigenSystem es = hermitian_eigendecompose(h);
    CHECK(reconstruction_error(h, es) <= 1e-10 * h.matrix().max_norm());
  }
}

TEST_CASE("eigendecomposition handles the largest supported dimension") {
  const HermitianOperator h(oracle::random_hermitian(64, 7));
  const EigenSystem es = hermitian_eigendecompose(h);
  CHECK(reconstruction_error(h, es) <= 1e-10 * h.matrix().max_norm());
}

TEST_CASE("eigendecomposition of the zero matrix") {
  const EigenSystem es = hermitian_eigendecompose(HermitianOperator::zero(3));
  for (double e : es.eigenvalues) CHECK(e == 0.0);
  CHECK(es.min_gap() == 0.0);
}

TEST_CASE("eigensolver reports non-convergence") {
  JacobiOptions opts;
  opts.max_sweeps = 0;
  CHECK_THROWS_AS(hermitian_eigendecompose(HermitianOperator(oracle::random_hermitian(5, 3)), opts),
                  ConvergenceFailure);
}

TEST_CASE("unitary exponential at s = 0 is the identity") {
  const HermitianOperator h(oracle::random_hermitian(3, 11));
  CHECK(max_abs_difference(unitary_exponential(h, 0.0).matrix(), Matrix::identity(3)) == 0.0);
}

TEST_CASE("unitary exponential of a diagonal operator") {
  const double d[] = {-0.5, 0.5};
  const UnitaryOperator u = unitary_exponential(HermitianOperator(Matrix::diagonal(d)), std::numbers::pi);
  const Matrix expected{{oracle::I, 0.0}, {0.0, -oracle::I}};
  CHECK(max_abs_difference(u.matrix(), expected) < 1e-14);
}

TEST_CASE("unitary exponential of sigma_x matches the closed form") {
  const double w0 = 1.3;
  const HermitianOperator h(Matrix{{0.0, 0.5 * w0}, {0.5 * w0, 0.0}});
  for (double t : {0.1, 1.0, 2.7, 10.0}) {
    CHECK(max_abs_difference(unitary_exponential(h, t).matrix(), oracle::pauli_x_exponential(w0, t)) <
          1e-13);
  }
}

TEST_CASE("unitary exponential: group property and norm preservation") {
  const HermitianOperator h(oracle::random_hermitian(5, 99));
  const double s1 = 0.37;
  const double s2 = 1.91;
  const UnitaryOperator a = unitary_exponential(h, s1);
  const UnitaryOperator b = unitary_exponential(h, s2);
  CHECK(max_abs_difference((a * b).matrix(), unitary_exponential(h, s1 + s2).matrix()) <= 1e-10);
  CHECK(a.unitarity_defect() <= 1e-10);

  StateVector v{Complex(1, 2), Complex(-0.5, 0.1), Complex(0.3, 0.3), Complex(0, -1), Complex(2, 0)};
  CHECK(std::abs((a * v).norm() - v.norm()) <= 1e-10);
}

TEST_CASE("UnitaryOperator rejects non-unitary matrices") {
  CHECK_THROWS_AS(UnitaryOperator(Matrix{{1.0, 0.1}, {0.0, 1.0}}), InvalidInput);
  CHECK_NOTHROW(UnitaryOperator(oracle::pauli_x_exponential(1.0, 0.4)));
}
