#pragma once

#include "dephasim/model.hpp"

namespace dephasim {

/// One product-basis label: position k into each subsystem's spectrum.
/// Flat ordering is lexicographic with subsystem 1 slowest.
struct MultiIndex {
  std::vector<int> positions;

  static MultiIndex from_flat(long flat, const std::vector<int>& dims) {
    return MultiIndex{unflatten_index(flat, dims)};
  }
  long to_flat(const std::vector<int>& dims) const {
    return flat_index(positions, dims);
  }
  double value(const ModelSpec& m, int i) const {
    return m.subsystems[i][positions[i]];
  }
  std::vector<double> values(const ModelSpec& m) const;
};

/// Omega_s = 1/2 sum_ij h_ij s_i s_j.
double omega(const ModelSpec& m, const MultiIndex& s);

/// Upsilon_{s~,s} = sum_ij (s~_i - s_i)(Gamma_ij/2)(s~_j - s_j)
///                + sum_ij (Gamma_ij/2)(s~_j s_i - s~_i s_j).
Complex upsilon(const ModelSpec& m, const MultiIndex& sTilde, const MultiIndex& s);

/// Phi_{s~,s} = i (Omega_{s~} - Omega_s) + Upsilon_{s~,s}.
Complex phi(const ModelSpec& m, const MultiIndex& sTilde, const MultiIndex& s);

/// Same sums restricted to an index subset (0-based subsystem positions);
/// values given per subset slot. Used by the system/bath decomposition.
double omega_restricted(const ModelSpec& m, const std::vector<int>& idx,
                        const std::vector<double>& vals);
Complex upsilon_restricted(const ModelSpec& m, const std::vector<int>& idx,
                           const std::vector<double>& tilde_vals,
                           const std::vector<double>& vals);

/// Dense d x d cache of Phi over flat index pairs; lazily usable for d beyond
/// the cache cap by falling back to per-element evaluation.
class PhiTensor {
 public:
  explicit PhiTensor(const ModelSpec& m, long cache_cap = 256);
  Complex operator()(long flatTilde, long flat) const;
  long dimension() const { return d_; }

 private:
  ModelSpec model_;
  std::vector<int> dims_;
  long d_ = 0;
  Matrix cache_;
  bool cached_ = false;
};

/// rho_t elementwise: <s~|rho_t|s> = <s~|rho_0|s> exp(-Phi_{s~,s} t).
Matrix evolve(const ModelSpec& m, const Matrix& rho0, double t);

/// lambda_s^mu = prod_i [mu_i s_i + (1 - mu_i)].
double lambda_weight(const GeneralizedModelSpec& g, const std::vector<int>& mu,
                     const MultiIndex& s);

/// omega_s = 1/2 sum_mu lambda_s^mu h_mu;
/// Upsilon_{s~,s} = sum_{mu,nu} Gamma_{mu,nu}
///   (1/2 lambda_{s~}^mu lambda_{s~}^nu + 1/2 lambda_s^mu lambda_s^nu
///    - lambda_{s~}^mu lambda_s^nu).
Complex generalized_phi(const GeneralizedModelSpec& g, const MultiIndex& sTilde,
                        const MultiIndex& s);

Matrix generalized_evolve(const GeneralizedModelSpec& g, const Matrix& rho0, double t);

}  // namespace dephasim
