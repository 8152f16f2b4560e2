#pragma once

#include <map>
#include <utility>
#include <vector>

#include "dephasim/errors.hpp"
#include "dephasim/linalg.hpp"

namespace dephasim {

/// n mutually commuting dephasing channels: one Hermitian operator per
/// subsystem, each diagonal in its own eigenbasis, coupled through a real
/// frequency matrix h and a complex rate matrix gamma.
struct ModelSpec {
  std::vector<std::vector<double>> subsystems;  // eigenvalue spectra
  RealMatrix h;                                 // n x n, symmetrized on validation
  Matrix gamma;                                 // n x n, Hermitian PSD

  int subsystem_count() const { return static_cast<int>(subsystems.size()); }
  int dim(int i) const { return static_cast<int>(subsystems[i].size()); }
  std::vector<int> dims() const;
  long total_dimension() const;
};

/// Checks spectra are non-empty, h and gamma are n x n, gamma is Hermitian
/// (entrywise 1e-12) and PSD (min eigenvalue >= -1e-10). Returns a copy with
/// h replaced by its symmetric part.
ModelSpec validate_model(const ModelSpec& m);

struct RingCouplingParams {
  int n = 0;
  double gamma = 0.0;
  double chi = 0.0;
  double lambda = 0.0;
};

/// gamma_jk = (gamma - chi) delta_jk + chi exp(2 pi i (j - k) lambda / n).
Matrix ring_gamma(const RingCouplingParams& p);

/// PSD interval for chi at fixed gamma (independent of lambda: the coherent
/// part is rank one with norm n).
std::pair<double, double> chi_bounds(int n, double gamma);

/// Ring model over n qubits (spectra {+1,-1}), h = 0.
ModelSpec ring_model(const RingCouplingParams& p);

/// Coupling channels indexed by binary multi-indices: operator mu acts with
/// the subsystem operator on every position where mu_i = 1.
struct GeneralizedModelSpec {
  std::vector<std::vector<double>> subsystems;
  std::map<std::vector<int>, double> h_mu;  // real weights, 1/2 sum convention
  std::map<std::pair<std::vector<int>, std::vector<int>>, Complex> gamma_munu;

  int subsystem_count() const { return static_cast<int>(subsystems.size()); }
  std::vector<int> dims() const;
  long total_dimension() const;
};

/// Hermiticity ((mu,nu) entry conjugate to (nu,mu)) and PSD over the support
/// of listed multi-indices; multi-index lengths and binary entries.
GeneralizedModelSpec validate_generalized_model(const GeneralizedModelSpec& g);

/// Express a pairwise model on weight-1 multi-indices. Diagonal h_ii terms
/// fold into weight-1 / all-zeros indices when each spectrum's square is
/// affine in the spectrum (always true for dims <= 2 and for constant-square
/// spectra); otherwise throws.
GeneralizedModelSpec embed_pairwise(const ModelSpec& m);

}  // namespace dephasim
