#include "dephasim/exact.hpp"

#include <cmath>

namespace dephasim {

std::vector<double> MultiIndex::values(const ModelSpec& m) const {
  std::vector<double> v(positions.size());
  for (size_t i = 0; i < positions.size(); ++i)
    v[i] = m.subsystems[i][positions[i]];
  return v;
}

double omega(const ModelSpec& m, const MultiIndex& s) {
  const int n = m.subsystem_count();
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double si = s.value(m, i);
    for (int j = 0; j < n; ++j) acc += m.h(i, j) * si * s.value(m, j);
  }
  return 0.5 * acc;
}

Complex upsilon(const ModelSpec& m, const MultiIndex& sTilde, const MultiIndex& s) {
  const int n = m.subsystem_count();
  Complex acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double ti = sTilde.value(m, i), si = s.value(m, i);
    for (int j = 0; j < n; ++j) {
      const double tj = sTilde.value(m, j), sj = s.value(m, j);
      acc += (ti - si) * (0.5 * m.gamma(i, j)) * (tj - sj);
      acc += (0.5 * m.gamma(i, j)) * (tj * si - ti * sj);
    }
  }
  return acc;
}

Complex phi(const ModelSpec& m, const MultiIndex& sTilde, const MultiIndex& s) {
  return Complex(0.0, omega(m, sTilde) - omega(m, s)) + upsilon(m, sTilde, s);
}

double omega_restricted(const ModelSpec& m, const std::vector<int>& idx,
                        const std::vector<double>& vals) {
  double acc = 0.0;
  for (size_t a = 0; a < idx.size(); ++a)
    for (size_t b = 0; b < idx.size(); ++b)
      acc += m.h(idx[a], idx[b]) * vals[a] * vals[b];
  return 0.5 * acc;
}

Complex upsilon_restricted(const ModelSpec& m, const std::vector<int>& idx,
                           const std::vector<double>& tilde_vals,
                           const std::vector<double>& vals) {
  Complex acc = 0.0;
  for (size_t a = 0; a < idx.size(); ++a)
    for (size_t b = 0; b < idx.size(); ++b) {
      const Complex g = 0.5 * m.gamma(idx[a], idx[b]);
      acc += (tilde_vals[a] - vals[a]) * g * (tilde_vals[b] - vals[b]);
      acc += g * (tilde_vals[b] * vals[a] - tilde_vals[a] * vals[b]);
    }
  return acc;
}

PhiTensor::PhiTensor(const ModelSpec& m, long cache_cap)
    : model_(m), dims_(m.dims()), d_(m.total_dimension()) {
  if (d_ <= cache_cap) {
    cache_.resize(d_, d_);
    for (long r = 0; r < d_; ++r) {
      const MultiIndex mr = MultiIndex::from_flat(r, dims_);
      for (long c = 0; c < d_; ++c)
        cache_(r, c) = phi(model_, mr, MultiIndex::from_flat(c, dims_));
    }
    cached_ = true;
  }
}

Complex PhiTensor::operator()(long flatTilde, long flat) const {
  if (cached_) return cache_(flatTilde, flat);
  return phi(model_, MultiIndex::from_flat(flatTilde, dims_),
             MultiIndex::from_flat(flat, dims_));
}

Matrix evolve(const ModelSpec& m, const Matrix& rho0, double t) {
  const long d = m.total_dimension();
  if (rho0.rows() != d || rho0.cols() != d)
    throw DimensionMismatch("evolve: state dimension does not match model");
  const auto dims = m.dims();
  Matrix out(d, d);
  for (long r = 0; r < d; ++r) {
    const MultiIndex mr = MultiIndex::from_flat(r, dims);
    for (long c = 0; c < d; ++c) {
      const Complex p = phi(m, mr, MultiIndex::from_flat(c, dims));
      out(r, c) = rho0(r, c) * std::exp(-p * t);
    }
  }
  return out;
}

double lambda_weight(const GeneralizedModelSpec& g, const std::vector<int>& mu,
                     const MultiIndex& s) {
  double w = 1.0;
  for (size_t i = 0; i < mu.size(); ++i)
    if (mu[i] == 1) w *= g.subsystems[i][s.positions[i]];
  return w;
}

Complex generalized_phi(const GeneralizedModelSpec& g, const MultiIndex& sTilde,
                        const MultiIndex& s) {
  const int n = g.subsystem_count();
  if (static_cast<int>(sTilde.positions.size()) != n ||
      static_cast<int>(s.positions.size()) != n)
    throw DimensionMismatch("generalized_phi: index length mismatch");

  double w_tilde = 0.0, w_plain = 0.0;
  for (const auto& [mu, hm] : g.h_mu) {
    w_tilde += lambda_weight(g, mu, sTilde) * hm;
    w_plain += lambda_weight(g, mu, s) * hm;
  }

  Complex ups = 0.0;
  for (const auto& [key, gm] : g.gamma_munu) {
    const double lt_mu = lambda_weight(g, key.first, sTilde);
    const double lt_nu = lambda_weight(g, key.second, sTilde);
    const double ls_mu = lambda_weight(g, key.first, s);
    const double ls_nu = lambda_weight(g, key.second, s);
    ups += gm * (0.5 * lt_mu * lt_nu + 0.5 * ls_mu * ls_nu - lt_mu * ls_nu);
  }
  return Complex(0.0, 0.5 * (w_tilde - w_plain)) + ups;
}

Matrix generalized_evolve(const GeneralizedModelSpec& g, const Matrix& rho0, double t) {
  const long d = g.total_dimension();
  if (rho0.rows() != d || rho0.cols() != d)
    throw DimensionMismatch("generalized_evolve: state dimension mismatch");
  const auto dims = g.dims();
  Matrix out(d, d);
  for (long r = 0; r < d; ++r) {
    const MultiIndex mr = MultiIndex::from_flat(r, dims);
    for (long c = 0; c < d; ++c) {
      const Complex p = generalized_phi(g, mr, MultiIndex::from_flat(c, dims));
      out(r, c) = rho0(r, c) * std::exp(-p * t);
    }
  }
  return out;
}

}  // namespace dephasim
