#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "dephasim/entangle.hpp"
#include "dephasim/exact.hpp"
#include "dephasim/linalg.hpp"

using namespace dephasim;

namespace {

double urand(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * ((rng() >> 11) * 0x1.0p-53);
}

Matrix random_density(long d, std::mt19937_64& rng) {
  Matrix b(d, d);
  for (long r = 0; r < d; ++r)
    for (long c = 0; c < d; ++c)
      b(r, c) = Complex(urand(rng, -1.0, 1.0), urand(rng, -1.0, 1.0));
  Matrix rho = b * b.adjoint();
  rho /= rho.trace().real();
  return rho;
}

ModelSpec random_qubit_model(std::mt19937_64& rng, int n) {
  ModelSpec m;
  for (int i = 0; i < n; ++i) m.subsystems.push_back({1.0, -1.0});
  Matrix a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      a(r, c) = Complex(urand(rng, -1.0, 1.0), urand(rng, -1.0, 1.0));
  m.gamma = 0.4 * (a * a.adjoint());
  m.h = RealMatrix::Zero(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = r; c < n; ++c) m.h(c, r) = m.h(r, c) = urand(rng, -0.5, 0.5);
  return validate_model(m);
}

Matrix qubit_herm(std::mt19937_64& rng) {
  Matrix a(2, 2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      a(r, c) = Complex(urand(rng, -1.0, 1.0), urand(rng, -1.0, 1.0));
  return Matrix(0.5 * (a + a.adjoint()));
}

// closed form of the transposed-dynamics generator on qubit registers: block
// structure of the swap in the rate tensor. System-system untouched;
// bath-bath conjugated; on the cross block the real dissipative part and the
// coherent coupling swap roles with a sign.
TildeGenerator analytic_tilde(const ModelSpec& m, const SplitSpec& sp) {
  const int n = m.subsystem_count();
  std::vector<bool> bath(n, false);
  for (int b : sp.bath) bath[b] = true;
  TildeGenerator tg;
  tg.h = RealMatrix::Zero(n, n);
  tg.gamma = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (bath[i] == bath[j]) {
        tg.gamma(i, j) = bath[i] ? std::conj(m.gamma(i, j)) : m.gamma(i, j);
        if (i != j) tg.h(i, j) = bath[i] ? -m.h(i, j) : m.h(i, j);
      } else {
        const double h_sym = 0.5 * (m.h(i, j) + m.h(j, i));
        tg.gamma(i, j) = Complex(-m.gamma(i, j).real(), bath[j] ? -h_sym : h_sym);
        const int si = bath[i] ? j : i;
        const int bi = bath[i] ? i : j;
        tg.h(i, j) = -m.gamma(si, bi).imag();
      }
    }
  return tg;
}

ModelSpec with_generator(const ModelSpec& m, const TildeGenerator& tg) {
  ModelSpec out;
  out.subsystems = m.subsystems;
  out.h = tg.h;
  out.gamma = tg.gamma;  // may be indefinite on purpose; not validated
  return out;
}

}  // namespace

TEST_CASE("partial transpose: involution, trace, action on product operators") {
  std::mt19937_64 rng(41);
  ModelSpec m;
  m.subsystems = {{1.0, -1.0}, {1.0, -1.0}, {1.0, -1.0}};
  m.h = RealMatrix::Zero(3, 3);
  m.gamma = Matrix::Zero(3, 3);
  const SplitSpec sp{{1}, {0, 2}};

  const Matrix a = qubit_herm(rng), b = qubit_herm(rng), c = qubit_herm(rng);
  const Matrix rho = kron(kron(a, b), c);
  const Matrix pt = partial_transpose(rho, m, sp);

  const Matrix expected = kron(kron(a.transpose().eval(), b), c.transpose().eval());
  CHECK((pt - expected).cwiseAbs().maxCoeff() == 0.0);
  CHECK((partial_transpose(pt, m, sp) - rho).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::abs(pt.trace() - rho.trace()) == 0.0);

  Matrix bad(4, 4);
  bad.setZero();
  CHECK_THROWS_AS(partial_transpose(bad, m, sp), DimensionMismatch);
}

TEST_CASE("partial transpose flags the maximally entangled pair") {
  ModelSpec m;
  m.subsystems = {{1.0, -1.0}, {1.0, -1.0}};
  m.h = RealMatrix::Zero(2, 2);
  m.gamma = Matrix::Zero(2, 2);
  Matrix rho = Matrix::Zero(4, 4);
  rho(0, 0) = rho(0, 3) = rho(3, 0) = rho(3, 3) = 0.5;
  const Matrix pt = partial_transpose(rho, m, SplitSpec{{0}, {1}});
  CHECK(min_eigenvalue(pt) == doctest::Approx(-0.5).epsilon(1e-12));

  // separable input stays positive under transposition
  Matrix plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  const Matrix prod = kron(plus, plus);
  CHECK(min_eigenvalue(partial_transpose(prod, m, SplitSpec{{0}, {1}})) > -1e-12);
}

TEST_CASE("tilde generator reproduces the bath-transposed evolution") {
  std::mt19937_64 rng(42);
  struct Layout {
    int n;
    SplitSpec sp;
  };
  const std::vector<Layout> layouts = {
      {2, {{0}, {1}}}, {2, {{1}, {0}}}, {3, {{1}, {0, 2}}}};
  for (const auto& lay : layouts) {
    for (int rep = 0; rep < 4; ++rep) {
      const ModelSpec m = random_qubit_model(rng, lay.n);
      const TildeGenerator tg = tilde_generator(m, lay.sp);
      CHECK(hermiticity_defect(tg.gamma) < 1e-12);
      CHECK((tg.h - tg.h.transpose()).cwiseAbs().maxCoeff() < 1e-12);

      const ModelSpec mt = with_generator(m, tg);
      const Matrix rho0 = random_density(m.total_dimension(), rng);
      for (const double t : {0.3, 0.9}) {
        const Matrix lhs = partial_transpose(evolve(m, rho0, t), m, lay.sp);
        const Matrix rhs = evolve(mt, partial_transpose(rho0, m, lay.sp), t);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-11);
      }
    }
  }
}

TEST_CASE("tilde generator matches the block closed form on qubits") {
  std::mt19937_64 rng(43);
  const std::vector<SplitSpec> splits = {{{0}, {1}}, {{1}, {0, 2}}, {{0, 2}, {1}}};
  const std::vector<int> ns = {2, 3, 3};
  for (size_t k = 0; k < splits.size(); ++k) {
    for (int rep = 0; rep < 3; ++rep) {
      const ModelSpec m = random_qubit_model(rng, ns[k]);
      const TildeGenerator fit = tilde_generator(m, splits[k]);
      const TildeGenerator ref = analytic_tilde(m, splits[k]);
      CHECK((fit.gamma - ref.gamma).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((fit.h - ref.h).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("real couplings: tilde equals the sign conjugation, same spectrum") {
  std::mt19937_64 rng(44);
  const int n = 3;
  ModelSpec m;
  for (int i = 0; i < n; ++i) m.subsystems.push_back({1.0, -1.0});
  RealMatrix re(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) re(r, c) = urand(rng, -0.7, 0.7);
  m.gamma = (0.3 * (re * re.transpose())).cast<Complex>();
  for (int i = 0; i < n; ++i) m.gamma(i, i) += 0.4;
  m.h = RealMatrix::Zero(n, n);
  m = validate_model(m);

  const SplitSpec sp{{0}, {1, 2}};
  const TildeGenerator tg = tilde_generator(m, sp);
  CHECK(tg.h.cwiseAbs().maxCoeff() < 1e-9);

  RealVector d(n);
  d << 1.0, -1.0, -1.0;
  const Matrix conjugated = d.asDiagonal() * m.gamma * d.asDiagonal();
  CHECK((tg.gamma - conjugated).cwiseAbs().maxCoeff() < 1e-9);

  Eigen::SelfAdjointEigenSolver<Matrix> orig(m.gamma), tilde(tg.gamma);
  CHECK((orig.eigenvalues() - tilde.eigenvalues()).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(min_eigenvalue(tg.gamma) > -1e-10);
}

TEST_CASE("two-qubit ring: transposition shifts the coupling into the drift") {
  for (const double chi : {-0.9, -0.3, 0.3, 0.95}) {
    const ModelSpec m = ring_model({2, 1.0, chi, 0.5});
    const TildeGenerator tg = tilde_generator(m, SplitSpec{{0}, {1}});
    CHECK(std::abs(tg.gamma(0, 0) - Complex(1.0)) < 1e-9);
    CHECK(std::abs(tg.gamma(1, 1) - Complex(1.0)) < 1e-9);
    CHECK(std::abs(tg.gamma(0, 1)) < 1e-9);
    CHECK(tg.h(0, 1) == doctest::Approx(chi).epsilon(1e-9));
    CHECK(min_eigenvalue(tg.gamma) > -1e-10);
  }
}

TEST_CASE("three-ring tilde matrix, threshold at chi/gamma = 1/sqrt(2)") {
  const double gamma = 0.8, chi = 0.4;
  const ModelSpec m = ring_model({3, gamma, chi, 0.75});
  const SplitSpec sp{{0}, {1, 2}};
  const TildeGenerator tg = tilde_generator(m, sp);

  Matrix expected(3, 3);
  expected << gamma, 0.0, chi,
              0.0, gamma, Complex(0.0, chi),
              chi, Complex(0.0, -chi), gamma;
  CHECK((tg.gamma - expected).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(tg.h(0, 1) == doctest::Approx(chi).epsilon(1e-9));
  CHECK(std::abs(tg.h(0, 2)) < 1e-9);
  CHECK(min_eigenvalue(tg.gamma) ==
        doctest::Approx(gamma - std::sqrt(2.0) * chi).epsilon(1e-8));

  // above the threshold the transposed generator turns indefinite
  const ModelSpec hot = ring_model({3, 0.8, 0.7, 0.75});
  CHECK(min_eigenvalue(tilde_generator(hot, sp).gamma) < -1e-3);

  const auto rows = entanglement_region_scan({2, 3}, 1.0, 1e-4);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].n == 2);
  CHECK(!rows[0].chi_star_over_gamma.has_value());
  CHECK(rows[0].lower_bound == doctest::Approx(-1.0));
  CHECK(rows[0].upper_bound == doctest::Approx(1.0));
  REQUIRE(rows[1].chi_star_over_gamma.has_value());
  CHECK(*rows[1].chi_star_over_gamma ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-3));
  CHECK(rows[1].lower_bound == doctest::Approx(-0.5));
}

TEST_CASE("negativity scan separates the two sides of the threshold") {
  Matrix plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  const Matrix rho0 = kron(kron(plus, plus), plus);
  const SplitSpec sp{{0}, {1, 2}};
  std::vector<double> times;
  for (int k = 1; k <= 60; ++k) times.push_back(0.05 * k);

  const ModelSpec hot = ring_model({3, 1.0, 0.95, 0.75});
  const PTScanResult entangling = negativity_scan(hot, sp, rho0, times);
  CHECK(entangling.first_negative_time.has_value());

  const ModelSpec cold = ring_model({3, 1.0, 0.5, 0.75});
  const PTScanResult separable = negativity_scan(cold, sp, rho0, times);
  CHECK(!separable.first_negative_time.has_value());
  for (const double lam : separable.min_eigenvalues) CHECK(lam > -1e-9);

  CHECK_THROWS_AS(negativity_scan(hot, sp, rho0, times, /*dim_cap=*/4),
                  DimensionMismatch);
}
