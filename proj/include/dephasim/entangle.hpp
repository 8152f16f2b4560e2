#pragma once

#include <optional>

#include "dephasim/split.hpp"

namespace dephasim {

/// Transpose the bath indices of a full-space matrix:
/// out(s~ b~, s b) = in(s~ b, s b~). Works for arbitrary interleaved splits.
Matrix partial_transpose(const Matrix& rho, const ModelSpec& m, const SplitSpec& sp);

struct PTScanResult {
  std::vector<double> times;
  std::vector<double> min_eigenvalues;
  std::optional<double> first_negative_time;  // min eigenvalue < -1e-9
};

/// Evolve rho0 on the full space, partial-transpose, record the minimum
/// eigenvalue per grid point.
PTScanResult negativity_scan(const ModelSpec& m, const SplitSpec& sp,
                             const Matrix& rho0, const std::vector<double>& times,
                             long dim_cap = 4096);

/// Generator of the partially transposed dynamics: (h~, Gamma~) such that the
/// rate tensor with bath indices swapped, Phi~(u~,u) = Phi(swap_B(u~,u)),
/// is reproduced by the same parametric form. Solved by minimum-norm linear
/// identification over index pairs; Gamma~ Hermitian by construction;
/// residual rechecked on held-out pairs (IdentificationFailure if violated).
struct TildeGenerator {
  RealMatrix h;
  Matrix gamma;
};

TildeGenerator tilde_generator(const ModelSpec& m, const SplitSpec& sp);

struct RegionScanRow {
  int n;
  std::optional<double> chi_star_over_gamma;  // empty: no negativity in range
  double lower_bound;  // PSD interval for chi/gamma
  double upper_bound;
};

/// Ring family (lambda = n/4), first qubit vs rest: smallest chi/gamma where
/// Gamma~ acquires a negative eigenvalue (< -1e-10), bisected to `tol`.
std::vector<RegionScanRow> entanglement_region_scan(const std::vector<int>& ns,
                                                    double gamma = 1.0,
                                                    double tol = 1e-4);

}  // namespace dephasim
