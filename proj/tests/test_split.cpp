#include <doctest.h>

#include <cmath>
#include <random>

#include "dephasim/split.hpp"

using namespace dephasim;

namespace {

ModelSpec fig_model(double gamma, double beta, double chi_re, double chi_im,
                    double h_cross) {
  ModelSpec m;
  m.subsystems = {{1.0, -1.0}, {1.0, -1.0}};
  m.gamma = Matrix(2, 2);
  m.gamma << gamma, Complex(chi_re, chi_im), Complex(chi_re, -chi_im), beta;
  m.h = RealMatrix::Zero(2, 2);
  m.h(0, 1) = m.h(1, 0) = h_cross;
  return validate_model(m);
}

ModelSpec random_qubit_model(std::mt19937_64& rng, int n, double scale = 0.3) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ModelSpec m;
  m.subsystems.assign(n, {1.0, -1.0});
  Matrix a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = Complex(u(rng), u(rng));
  m.gamma = a * a.adjoint() * scale;
  m.h = RealMatrix(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) m.h(r, c) = scale * u(rng);
  return validate_model(m);
}

Matrix random_density(long d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix b(d, d);
  for (long r = 0; r < d; ++r)
    for (long c = 0; c < d; ++c) b(r, c) = Complex(u(rng), u(rng));
  Matrix rho = b * b.adjoint();
  rho /= rho.trace();
  return rho;
}

Matrix diag_from(const std::vector<double>& q) {
  Matrix d = Matrix::Zero(q.size(), q.size());
  for (size_t i = 0; i < q.size(); ++i) d(i, i) = q[i];
  return d;
}

}  // namespace

TEST_CASE("split validation") {
  std::mt19937_64 rng(3);
  const ModelSpec m = random_qubit_model(rng, 4);

  CHECK_NOTHROW(validate_split({{0, 2}, {1, 3}}, m));
  CHECK_THROWS_AS(validate_split({{0, 4}, {1, 2, 3}}, m), InvalidSplit);
  CHECK_THROWS_AS(validate_split({{0, 1}, {1, 2, 3}}, m), InvalidSplit);
  CHECK_THROWS_AS(validate_split({{0}, {2, 3}}, m), InvalidSplit);     // 1 missing
  CHECK_THROWS_AS(validate_split({{2, 0}, {1, 3}}, m), InvalidSplit);  // not increasing
}

TEST_CASE("dims and merge respect the interleaving") {
  ModelSpec m;
  m.subsystems = {{1.0, -1.0}, {1.0, 0.0, -1.0}, {1.0, -1.0}};
  m.gamma = Matrix::Identity(3, 3);
  m.h = RealMatrix::Zero(3, 3);
  m = validate_model(m);
  const SplitSpec sp = validate_split({{1}, {0, 2}}, m);
  CHECK(system_dims(m, sp) == std::vector<int>{3});
  CHECK(bath_dims(m, sp) == std::vector<int>{2, 2});
  const MultiIndex full = merge_split_index(m, sp, {2}, {1, 0});
  CHECK(full.positions == std::vector<int>{1, 2, 0});
}

TEST_CASE("split decomposition recombines to the full rate") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 6; ++rep) {
    const ModelSpec m = random_qubit_model(rng, 3);
    const SplitSpec sp = validate_split(rep % 2 ? SplitSpec{{1}, {0, 2}}
                                                : SplitSpec{{0, 2}, {1}},
                                        m);
    const long ds = dims_product(system_dims(m, sp));
    const long db = dims_product(bath_dims(m, sp));
    for (long st = 0; st < ds; ++st)
      for (long s = 0; s < ds; ++s)
        for (long bt = 0; bt < db; ++bt)
          for (long b = 0; b < db; ++b) {
            const auto stp = unflatten_index(st, system_dims(m, sp));
            const auto sp_ = unflatten_index(s, system_dims(m, sp));
            const auto btp = unflatten_index(bt, bath_dims(m, sp));
            const auto bp = unflatten_index(b, bath_dims(m, sp));
            const SplitPhi parts = split_phi(m, sp, stp, sp_, btp, bp);
            const Complex whole =
                phi(m, merge_split_index(m, sp, stp, btp),
                    merge_split_index(m, sp, sp_, bp));
            CHECK(std::abs(parts.system_part + parts.bath_part + parts.cross_part -
                           whole) < 1e-13);
          }
  }
}

TEST_CASE("bath-diagonal rate of the two-qubit model") {
  const ModelSpec m = fig_model(0.7, 0.5, 0.2, 0.3, 0.1);
  const SplitSpec sp = validate_split({{0}, {1}}, m);
  const std::vector<int> up{0}, down{1};

  // system part is pure decay at 2 gamma
  CHECK(std::abs(system_block_phi(m, sp, up, down) - Complex(1.4)) < 1e-15);

  // linear coefficient 2i (h_sym - Im chi)
  const auto c = cross_coefficients(m, sp, up, down);
  REQUIRE(c.size() == 1);
  CHECK(std::abs(c[0] - Complex(0.0, -0.4)) < 1e-15);

  CHECK(std::abs(partial_diagonal_phi(m, sp, up, down, {0}) - Complex(1.4, -0.4)) <
        1e-15);
  CHECK(std::abs(partial_diagonal_phi(m, sp, up, down, {1}) - Complex(1.4, 0.4)) <
        1e-15);

  // agrees with the decomposition at equal bath indices and with the full rate
  for (int b : {0, 1}) {
    const SplitPhi parts = split_phi(m, sp, up, down, {b}, {b});
    CHECK(std::abs(parts.bath_part) < 1e-15);
    CHECK(std::abs(parts.system_part + parts.cross_part -
                   partial_diagonal_phi(m, sp, up, down, {b})) < 1e-15);
    CHECK(std::abs(phi(m, merge_split_index(m, sp, up, {b}),
                       merge_split_index(m, sp, down, {b})) -
                   partial_diagonal_phi(m, sp, up, down, {b})) < 1e-15);
  }
}

TEST_CASE("two-qubit coherence factor hits the dressed closed form") {
  const ModelSpec m = fig_model(0.7, 0.5, 0.2, 0.3, 0.1);
  const SplitSpec sp = validate_split({{0}, {1}}, m);
  EnvPopulations env;
  env.product = {{{0.35, 0.65}}};
  env = validate_env(env, m, sp);

  const double chi_bar = 0.3 - 0.1;  // Im chi minus the coherent shift
  for (double t : {0.0, 0.2, 0.9, 2.3}) {
    const Complex f = coherence_factor(m, sp, env, {0}, {1}, t);
    const Complex want = std::exp(-2.0 * 0.7 * t) *
                         (0.35 * std::exp(Complex(0.0, 2.0 * chi_bar * t)) +
                          0.65 * std::exp(Complex(0.0, -2.0 * chi_bar * t)));
    CHECK(std::abs(f - want) < 1e-14);
  }
}

TEST_CASE("coherence factors are bounded by one") {
  std::mt19937_64 rng(9);
  for (int rep = 0; rep < 8; ++rep) {
    const ModelSpec m = random_qubit_model(rng, 3);
    const SplitSpec sp = validate_split({{0}, {1, 2}}, m);
    EnvPopulations env;
    env.product = {{{0.3, 0.7}, {0.55, 0.45}}};
    for (double t : {0.0, 0.1, 0.5, 1.0, 2.0, 5.0})
      CHECK(std::abs(coherence_factor(m, sp, env, {0}, {1}, t)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("factorized evaluation equals the direct configuration sum") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0.2, 0.8);

  SUBCASE("twelve bath qubits") {
    const int nb = 12;
    const ModelSpec m = random_qubit_model(rng, nb + 1, 0.1);
    const SplitSpec sp = [&] {
      SplitSpec s;
      s.system = {0};
      for (int j = 1; j <= nb; ++j) s.bath.push_back(j);
      return validate_split(s, m);
    }();

    EnvPopulations prod;
    prod.product.emplace();
    for (int j = 0; j < nb; ++j) {
      const double p = u(rng);
      prod.product->push_back({p, 1.0 - p});
    }
    EnvPopulations full;
    full.full.emplace(1 << nb, 0.0);
    const auto bdims = bath_dims(m, sp);
    for (long bf = 0; bf < (1 << nb); ++bf)
      (*full.full)[bf] = env_weight(prod, unflatten_index(bf, bdims), bdims);

    for (double t : {0.3, 1.1}) {
      const Complex fp = coherence_factor(m, sp, prod, {0}, {1}, t);
      const Complex ff = coherence_factor(m, sp, full, {0}, {1}, t);
      CHECK(std::abs(fp - ff) < 1e-12);
    }
  }

  SUBCASE("mixed dimensions") {
    ModelSpec m;
    m.subsystems = {{1.0, -1.0}, {0.8, -0.1, -0.9}, {1.0, -1.0}};
    std::uniform_real_distribution<double> v(-1.0, 1.0);
    Matrix a(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) a(r, c) = Complex(v(rng), v(rng));
    m.gamma = a * a.adjoint() * 0.2;
    m.h = RealMatrix::Zero(3, 3);
    m.h(0, 1) = 0.4;
    m = validate_model(m);
    const SplitSpec sp = validate_split({{0}, {1, 2}}, m);

    EnvPopulations prod;
    prod.product = {{{0.2, 0.5, 0.3}, {0.6, 0.4}}};
    EnvPopulations full;
    full.full.emplace();
    for (double qa : {0.2, 0.5, 0.3})
      for (double qb : {0.6, 0.4}) full.full->push_back(qa * qb);

    for (double t : {0.4, 1.6}) {
      const Complex fp = coherence_factor(m, sp, prod, {0}, {1}, t);
      const Complex ff = coherence_factor(m, sp, full, {0}, {1}, t);
      CHECK(std::abs(fp - ff) < 1e-13);
    }
  }
}

TEST_CASE("no cross couplings means a single exponential") {
  ModelSpec m;
  m.subsystems = {{1.0, -1.0}, {1.0, -1.0}, {1.0, -1.0}};
  Matrix g(3, 3);
  g << 0.8, 0.1, 0.0, 0.1, 0.6, 0.2, 0.0, 0.2, 0.9;  // real symmetric PSD
  m.gamma = g;
  m.h = RealMatrix::Zero(3, 3);
  m.h(1, 2) = m.h(2, 1) = 0.5;  // intra-bath only
  m = validate_model(m);
  const SplitSpec sp = validate_split({{0}, {1, 2}}, m);

  CHECK_FALSE(memory_necessary_condition(m, sp));

  EnvPopulations env;
  env.product = {{{0.3, 0.7}, {0.8, 0.2}}};
  const Complex block = system_block_phi(m, sp, {0}, {1});
  for (int k = 0; k < 10; ++k) {
    const double t = 0.25 * k;
    const Complex f = coherence_factor(m, sp, env, {0}, {1}, t);
    CHECK(std::abs(f - std::exp(-t * block)) < 1e-12);
    // also the merged-index full rate, at an arbitrary bath configuration
    const Complex whole = phi(m, merge_split_index(m, sp, {0}, {1, 0}),
                              merge_split_index(m, sp, {1}, {1, 0}));
    CHECK(std::abs(f - std::exp(-t * whole)) < 1e-12);
  }
}

TEST_CASE("memory necessary condition and its witnesses") {
  SUBCASE("symmetric h cross coupling") {
    const ModelSpec m = fig_model(0.7, 0.5, 0.0, 0.0, 0.25);
    const SplitSpec sp = validate_split({{0}, {1}}, m);
    std::vector<MemoryWitnessPair> w;
    CHECK(memory_necessary_condition(m, sp, &w));
    REQUIRE(w.size() == 1);
    CHECK(w[0].system_index == 0);
    CHECK(w[0].bath_index == 1);
    CHECK(std::abs(w[0].coupling - Complex(0.0, 0.25)) < 1e-15);
  }
  SUBCASE("antisymmetric rate coupling") {
    const ModelSpec m = fig_model(0.7, 0.5, 0.2, 0.3, 0.0);
    const SplitSpec sp = validate_split({{0}, {1}}, m);
    std::vector<MemoryWitnessPair> w;
    CHECK(memory_necessary_condition(m, sp, &w));
    REQUIRE(w.size() == 1);
    // coupling = -(Gamma_01 - Gamma_10)/2 = -i Im Gamma_01
    CHECK(std::abs(w[0].coupling - Complex(0.0, -0.3)) < 1e-15);
  }
  SUBCASE("real symmetric coupling carries no memory") {
    const ModelSpec m = fig_model(0.7, 0.5, 0.4, 0.0, 0.0);
    const SplitSpec sp = validate_split({{0}, {1}}, m);
    CHECK_FALSE(memory_necessary_condition(m, sp));
  }
  SUBCASE("threshold separates structural zeros") {
    const ModelSpec m = fig_model(0.7, 0.5, 0.0, 1e-15, 0.0);
    const SplitSpec sp = validate_split({{0}, {1}}, m);
    CHECK_FALSE(memory_necessary_condition(m, sp));
    CHECK(memory_necessary_condition(m, sp, nullptr, 1e-16));
  }
}

TEST_CASE("reduced states match partial traces of the full evolution") {
  std::mt19937_64 rng(17);
  const ModelSpec m = random_qubit_model(rng, 2);
  const std::vector<double> q{0.35, 0.65};

  SUBCASE("system on slot 1, bath on slot 0") {
    const SplitSpec sp = validate_split({{1}, {0}}, m);
    EnvPopulations env;
    env.product = {{q}};
    const Matrix rho_s = random_density(2, rng);
    const Matrix full0 = kron(diag_from(q), rho_s);
    for (double t : {0.4, 1.3}) {
      const Matrix red = partial_trace(evolve(m, full0, t), m.dims(), {0});
      const Matrix sys = system_state(m, sp, rho_s, env, t);
      CHECK((red - sys).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  SUBCASE("environment state with bath coherences") {
    const SplitSpec sp = validate_split({{0}, {1}}, m);
    const std::vector<double> p{0.25, 0.75};
    const Matrix rho_e = random_density(2, rng);
    const Matrix full0 = kron(diag_from(p), rho_e);
    for (double t : {0.4, 1.3}) {
      const Matrix red = partial_trace(evolve(m, full0, t), m.dims(), {0});
      const Matrix envst = environment_state(m, sp, p, rho_e, t);
      CHECK((red - envst).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("coherence factor derivative is the mixture derivative") {
  std::mt19937_64 rng(19);
  const ModelSpec m = random_qubit_model(rng, 3);
  const SplitSpec sp = validate_split({{0}, {1, 2}}, m);

  EnvPopulations prod;
  prod.product = {{{0.3, 0.7}, {0.5, 0.5}}};
  EnvPopulations full;
  full.full = {{0.1, 0.3, 0.2, 0.4}};

  const double h = 1e-5;
  for (const EnvPopulations& env : {prod, full}) {
    for (double t : {0.3, 1.2}) {
      const Complex num = (coherence_factor(m, sp, env, {0}, {1}, t + h) -
                           coherence_factor(m, sp, env, {0}, {1}, t - h)) /
                          (2.0 * h);
      const Complex exact_d = coherence_factor_derivative(m, sp, env, {0}, {1}, t);
      CHECK(std::abs(num - exact_d) < 1e-8);
    }
  }
}

TEST_CASE("environment population validation") {
  std::mt19937_64 rng(25);
  const ModelSpec m = random_qubit_model(rng, 3);
  const SplitSpec sp = validate_split({{0}, {1, 2}}, m);

  EnvPopulations both;
  both.full = {{0.25, 0.25, 0.25, 0.25}};
  both.product = {{{0.5, 0.5}, {0.5, 0.5}}};
  CHECK_THROWS_AS(validate_env(both, m, sp), InvalidPopulations);
  CHECK_THROWS_AS(validate_env(EnvPopulations{}, m, sp), InvalidPopulations);

  EnvPopulations short_full;
  short_full.full = {{0.5, 0.5}};
  CHECK_THROWS_AS(validate_env(short_full, m, sp), InvalidPopulations);

  EnvPopulations negative;
  negative.full = {{0.5, 0.7, -0.2, 0.0}};
  CHECK_THROWS_AS(validate_env(negative, m, sp), InvalidPopulations);

  EnvPopulations unnormalized;
  unnormalized.product = {{{0.5, 0.4}, {0.5, 0.5}}};
  CHECK_THROWS_AS(validate_env(unnormalized, m, sp), InvalidPopulations);

  EnvPopulations wrong_len;
  wrong_len.product = {{{0.5, 0.5}}};
  CHECK_THROWS_AS(validate_env(wrong_len, m, sp), InvalidPopulations);

  EnvPopulations ok;
  ok.product = {{{0.5, 0.5}, {0.1, 0.9}}};
  CHECK_NOTHROW(validate_env(ok, m, sp));
  CHECK(env_weight(ok, {1, 0}, bath_dims(m, sp)) == doctest::Approx(0.5 * 0.1));

  EnvPopulations okf;
  okf.full = {{0.1, 0.2, 0.3, 0.4}};
  CHECK_NOTHROW(validate_env(okf, m, sp));
  CHECK(env_weight(okf, {1, 0}, bath_dims(m, sp)) == doctest::Approx(0.3));
}
