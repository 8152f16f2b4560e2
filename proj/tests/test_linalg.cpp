#include <doctest.h>

#include <random>

#include "dephasim/errors.hpp"
#include "dephasim/linalg.hpp"

using namespace dephasim;

namespace {

Matrix random_hermitian(long d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(d, d);
  for (long r = 0; r < d; ++r)
    for (long c = 0; c < d; ++c) a(r, c) = Complex(u(rng), u(rng));
  return Matrix(0.5 * (a + a.adjoint()));
}

}  // namespace

TEST_CASE("flat index codec: subsystem 1 is the slowest digit") {
  const std::vector<int> dims{3, 2, 3};
  CHECK(dims_product(dims) == 18);
  CHECK(flat_index({0, 0, 0}, dims) == 0);
  CHECK(flat_index({0, 0, 1}, dims) == 1);
  CHECK(flat_index({0, 1, 0}, dims) == 3);
  CHECK(flat_index({1, 0, 2}, dims) == 8);
  CHECK(flat_index({2, 1, 2}, dims) == 17);
  for (long f = 0; f < 18; ++f)
    CHECK(flat_index(unflatten_index(f, dims), dims) == f);
}

TEST_CASE("kron matches the blockwise definition and index convention") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix a(2, 2), b(3, 3);
  for (long r = 0; r < 2; ++r)
    for (long c = 0; c < 2; ++c) a(r, c) = Complex(u(rng), u(rng));
  for (long r = 0; r < 3; ++r)
    for (long c = 0; c < 3; ++c) b(r, c) = Complex(u(rng), u(rng));

  const Matrix k = kron(a, b);
  REQUIRE(k.rows() == 6);
  const std::vector<int> dims{2, 3};
  for (long i = 0; i < 2; ++i)
    for (long j = 0; j < 2; ++j)
      for (long p = 0; p < 3; ++p)
        for (long q = 0; q < 3; ++q) {
          const long r = flat_index({static_cast<int>(i), static_cast<int>(p)}, dims);
          const long c = flat_index({static_cast<int>(j), static_cast<int>(q)}, dims);
          CHECK(std::abs(k(r, c) - a(i, j) * b(p, q)) == 0.0);
        }
}

TEST_CASE("hermiticity defect and min eigenvalue") {
  Matrix h(2, 2);
  h << Complex(1, 0), Complex(0, 1), Complex(0, -1), Complex(-2, 0);
  CHECK(hermiticity_defect(h) == 0.0);
  // eigenvalues of [[1, i], [-i, -2]]: (-1 +- sqrt(13)) / 2
  CHECK(min_eigenvalue(h) == doctest::Approx((-1.0 - std::sqrt(13.0)) / 2).epsilon(1e-12));

  Matrix g = h;
  g(0, 1) = Complex(0.5, 1);
  CHECK(hermiticity_defect(g) == doctest::Approx(0.5));
}

TEST_CASE("partial trace of a product splits the factors") {
  std::mt19937_64 rng(11);
  Matrix a = random_hermitian(2, rng);
  Matrix b = random_hermitian(3, rng);
  b /= b.trace();
  const Matrix rho = kron(a, b);
  const std::vector<int> dims{2, 3};

  const Matrix ta = partial_trace(rho, dims, {1});
  CHECK((ta - a).cwiseAbs().maxCoeff() < 1e-14);
  const Matrix tb = partial_trace(rho, dims, {0});
  CHECK((tb - a.trace() * b).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("partial trace keeps the remaining order and the total trace") {
  std::mt19937_64 rng(13);
  const std::vector<int> dims{2, 3, 2};
  Matrix rho = random_hermitian(12, rng);
  rho = rho * rho.adjoint();
  rho /= rho.trace();

  const Matrix mid = partial_trace(rho, dims, {0, 2});
  REQUIRE(mid.rows() == 3);
  CHECK(std::abs(mid.trace() - Complex(1.0)) < 1e-13);

  // tracing in two steps agrees with one step
  const Matrix step1 = partial_trace(rho, dims, {2});
  const Matrix step2 = partial_trace(step1, {2, 3}, {0});
  CHECK((step2 - mid).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("density matrix gate") {
  Matrix ok = Matrix::Identity(2, 2) * 0.5;
  CHECK_NOTHROW(validate_density_matrix(ok));

  Matrix bad_trace = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(validate_density_matrix(bad_trace), ValidationError);

  Matrix not_herm = ok;
  not_herm(0, 1) = Complex(0.0, 0.3);
  CHECK_THROWS_AS(validate_density_matrix(not_herm), ValidationError);

  Matrix neg(2, 2);
  neg << Complex(1.5, 0), Complex(0, 0), Complex(0, 0), Complex(-0.5, 0);
  CHECK_THROWS_AS(validate_density_matrix(neg), NotPositiveSemidefinite);

  Matrix rect(2, 3);
  rect.setZero();
  CHECK_THROWS_AS(validate_density_matrix(rect), DimensionMismatch);
}
