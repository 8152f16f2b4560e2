#include "dephasim/model.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <string>

namespace dephasim {

std::vector<int> ModelSpec::dims() const {
  std::vector<int> d(subsystems.size());
  for (size_t i = 0; i < subsystems.size(); ++i)
    d[i] = static_cast<int>(subsystems[i].size());
  return d;
}

long ModelSpec::total_dimension() const { return dims_product(dims()); }

ModelSpec validate_model(const ModelSpec& m) {
  const int n = m.subsystem_count();
  if (n == 0) throw EmptySpectrum("model: no subsystems");
  for (int i = 0; i < n; ++i)
    if (m.subsystems[i].empty())
      throw EmptySpectrum("subsystems[" + std::to_string(i) + "]: empty spectrum");

  if (m.h.rows() != n || m.h.cols() != n)
    throw DimensionMismatch("h: expected " + std::to_string(n) + "x" +
                            std::to_string(n));
  if (m.gamma.rows() != n || m.gamma.cols() != n)
    throw DimensionMismatch("gamma: expected " + std::to_string(n) + "x" +
                            std::to_string(n));

  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (std::abs(m.gamma(i, j) - std::conj(m.gamma(j, i))) > 1e-12)
        throw NonHermitianGamma("gamma[" + std::to_string(i) + "][" +
                                std::to_string(j) + "]: not Hermitian");

  const double min_eig = min_eigenvalue(m.gamma);
  if (min_eig < -1e-10)
    throw NotPositiveSemidefinite("gamma: min eigenvalue " + std::to_string(min_eig));

  ModelSpec out = m;
  out.h = 0.5 * (m.h + m.h.transpose());
  return out;
}

Matrix ring_gamma(const RingCouplingParams& p) {
  if (p.n < 1) throw DimensionMismatch("ring: n must be >= 1");
  Matrix g(p.n, p.n);
  const double base = 2.0 * std::numbers::pi * p.lambda / p.n;
  for (int j = 0; j < p.n; ++j)
    for (int k = 0; k < p.n; ++k) {
      g(j, k) = p.chi * std::exp(Complex(0.0, base * (j - k)));
      if (j == k) g(j, k) += p.gamma - p.chi;
    }
  return g;
}

std::pair<double, double> chi_bounds(int n, double gamma) {
  return {-gamma / (n - 1), gamma};
}

ModelSpec ring_model(const RingCouplingParams& p) {
  ModelSpec m;
  m.subsystems.assign(p.n, {1.0, -1.0});
  m.h = RealMatrix::Zero(p.n, p.n);
  m.gamma = ring_gamma(p);
  return m;
}

std::vector<int> GeneralizedModelSpec::dims() const {
  std::vector<int> d(subsystems.size());
  for (size_t i = 0; i < subsystems.size(); ++i)
    d[i] = static_cast<int>(subsystems[i].size());
  return d;
}

long GeneralizedModelSpec::total_dimension() const { return dims_product(dims()); }

namespace {

void check_multi_index(const std::vector<int>& mu, int n, const char* where) {
  if (static_cast<int>(mu.size()) != n)
    throw UnknownMultiIndex(std::string(where) + ": multi-index length mismatch");
  for (int v : mu)
    if (v != 0 && v != 1)
      throw UnknownMultiIndex(std::string(where) + ": entries must be 0/1");
}

}  // namespace

GeneralizedModelSpec validate_generalized_model(const GeneralizedModelSpec& g) {
  const int n = g.subsystem_count();
  if (n == 0) throw EmptySpectrum("generalized model: no subsystems");
  for (int i = 0; i < n; ++i)
    if (g.subsystems[i].empty())
      throw EmptySpectrum("subsystems[" + std::to_string(i) + "]: empty spectrum");

  for (const auto& [mu, w] : g.h_mu) {
    check_multi_index(mu, n, "h_mu");
    (void)w;
  }

  std::set<std::vector<int>> support;
  for (const auto& [key, val] : g.gamma_munu) {
    check_multi_index(key.first, n, "gamma_munu");
    check_multi_index(key.second, n, "gamma_munu");
    support.insert(key.first);
    support.insert(key.second);
    auto swapped = g.gamma_munu.find({key.second, key.first});
    const Complex other = swapped == g.gamma_munu.end() ? Complex(0) : swapped->second;
    if (std::abs(val - std::conj(other)) > 1e-12)
      throw NonHermitianGamma("gamma_munu: (mu,nu) entry not conjugate to (nu,mu)");
  }

  if (!support.empty()) {
    std::vector<std::vector<int>> idx(support.begin(), support.end());
    Matrix gm = Matrix::Zero(idx.size(), idx.size());
    for (size_t a = 0; a < idx.size(); ++a)
      for (size_t b = 0; b < idx.size(); ++b) {
        auto it = g.gamma_munu.find({idx[a], idx[b]});
        if (it != g.gamma_munu.end()) gm(a, b) = it->second;
      }
    if (min_eigenvalue(gm) < -1e-10)
      throw NotPositiveSemidefinite("gamma_munu: negative eigenvalue on support");
  }
  return g;
}

GeneralizedModelSpec embed_pairwise(const ModelSpec& m) {
  const int n = m.subsystem_count();
  GeneralizedModelSpec g;
  g.subsystems = m.subsystems;

  auto unit = [n](int i) {
    std::vector<int> mu(n, 0);
    mu[i] = 1;
    return mu;
  };
  const std::vector<int> zero(n, 0);

  // Off-diagonal Hamiltonian terms: S(i)S(j) is the weight-2 index e_i + e_j.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double w = m.h(i, j) + m.h(j, i);
      if (w == 0.0) continue;
      std::vector<int> mu(n, 0);
      mu[i] = mu[j] = 1;
      g.h_mu[mu] += w;
    }

  // Diagonal h_ii (S(i))^2 terms need s^2 affine in s per subsystem.
  for (int i = 0; i < n; ++i) {
    if (m.h(i, i) == 0.0) continue;
    const auto& spec = m.subsystems[i];
    bool const_sq = true;
    for (double s : spec)
      if (std::abs(s * s - spec[0] * spec[0]) > 0.0) const_sq = false;
    if (const_sq) {
      g.h_mu[zero] += m.h(i, i) * spec[0] * spec[0];
    } else if (spec.size() == 2) {
      // s in {a, b}  =>  s^2 = (a + b) s - a b
      const double a = spec[0], b = spec[1];
      g.h_mu[unit(i)] += m.h(i, i) * (a + b);
      g.h_mu[zero] += -m.h(i, i) * a * b;
    } else {
      throw std::invalid_argument(
          "embed_pairwise: h[" + std::to_string(i) + "][" + std::to_string(i) +
          "] needs a spectrum whose square is affine in the spectrum");
    }
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (m.gamma(i, j) != Complex(0.0)) g.gamma_munu[{unit(i), unit(j)}] = m.gamma(i, j);

  return g;
}

}  // namespace dephasim
