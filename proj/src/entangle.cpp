#include "dephasim/entangle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "dephasim/exact.hpp"

namespace dephasim {

Matrix partial_transpose(const Matrix& rho, const ModelSpec& m, const SplitSpec& sp) {
  validate_split(sp, m);
  const auto dims = m.dims();
  const long d = dims_product(dims);
  if (rho.rows() != d || rho.cols() != d)
    throw DimensionMismatch("partial_transpose: matrix dimension mismatch");
  Matrix out(d, d);
  for (long u = 0; u < d; ++u) {
    auto up = unflatten_index(u, dims);
    for (long v = 0; v < d; ++v) {
      auto vp = unflatten_index(v, dims);
      auto rp = up, cp = vp;
      for (int b : sp.bath) std::swap(rp[b], cp[b]);
      out(u, v) = rho(flat_index(rp, dims), flat_index(cp, dims));
    }
  }
  return out;
}

PTScanResult negativity_scan(const ModelSpec& m, const SplitSpec& sp,
                             const Matrix& rho0, const std::vector<double>& times,
                             long dim_cap) {
  validate_split(sp, m);
  const auto dims = m.dims();
  const long d = dims_product(dims);
  if (d > dim_cap)
    throw DimensionMismatch("negativity_scan: dimension exceeds cap");
  if (rho0.rows() != d || rho0.cols() != d)
    throw DimensionMismatch("negativity_scan: state dimension mismatch");

  PhiTensor pt(m, std::min<long>(d, 2048));
  PTScanResult res;
  res.times = times;
  res.min_eigenvalues.reserve(times.size());
  for (double t : times) {
    Matrix evolved(d, d);
    for (long r = 0; r < d; ++r)
      for (long c = 0; c < d; ++c)
        evolved(r, c) = rho0(r, c) * std::exp(-pt(r, c) * t);
    const double lam = min_eigenvalue(partial_transpose(evolved, m, sp));
    res.min_eigenvalues.push_back(lam);
    if (!res.first_negative_time && lam < -1e-9) res.first_negative_time = t;
  }
  return res;
}

namespace {

// swap bath coordinates between the row and column labels
std::pair<MultiIndex, MultiIndex> bath_swapped(const SplitSpec& sp,
                                               const MultiIndex& row,
                                               const MultiIndex& col) {
  MultiIndex r = row, c = col;
  for (int b : sp.bath) std::swap(r.positions[b], c.positions[b]);
  return {r, c};
}

}  // namespace

TildeGenerator tilde_generator(const ModelSpec& m, const SplitSpec& sp) {
  validate_split(sp, m);
  const auto dims = m.dims();
  const int n = m.subsystem_count();

  // unknowns: symmetric h~ (upper triangle incl. diagonal), then Hermitian
  // Gamma~ as n real diagonals plus (re, im) per off-diagonal pair
  const int n_h = n * (n + 1) / 2;
  const int n_g = n * n;
  const int P = n_h + n_g;

  std::vector<std::pair<int, int>> h_slots, g_off_slots;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) h_slots.emplace_back(i, j);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g_off_slots.emplace_back(i, j);

  std::mt19937_64 rng(0x5eed5eedULL);
  auto random_index = [&]() {
    MultiIndex mi;
    mi.positions.resize(n);
    for (int i = 0; i < n; ++i)
      mi.positions[i] =
          static_cast<int>(rng() % static_cast<unsigned long>(dims[i]));
    return mi;
  };

  const int K = std::max(64, 6 * P);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * K, P);
  Eigen::VectorXd b(2 * K);

  auto fill_row = [&](int k, const MultiIndex& row, const MultiIndex& col) {
    const auto tv = row.values(m);
    const auto v = col.values(m);
    std::vector<Complex> coeff(P, Complex(0.0));
    for (int q = 0; q < n_h; ++q) {
      const auto [i, j] = h_slots[q];
      const double w = (i == j) ? 0.5 * (tv[i] * tv[i] - v[i] * v[i])
                                : (tv[i] * tv[j] - v[i] * v[j]);
      coeff[q] = Complex(0.0, w);
    }
    auto M = [&](int a, int c) {
      return 0.5 * tv[a] * tv[c] + 0.5 * v[a] * v[c] - tv[a] * v[c];
    };
    for (int i = 0; i < n; ++i) coeff[n_h + i] = M(i, i);
    for (size_t q = 0; q < g_off_slots.size(); ++q) {
      const auto [i, j] = g_off_slots[q];
      coeff[n_h + n + 2 * q] = M(i, j) + M(j, i);
      coeff[n_h + n + 2 * q + 1] = Complex(0.0, 1.0) * (M(i, j) - M(j, i));
    }
    const auto [sr, sc] = bath_swapped(sp, row, col);
    const Complex target = phi(m, sr, sc);
    for (int p = 0; p < P; ++p) {
      A(2 * k, p) = coeff[p].real();
      A(2 * k + 1, p) = coeff[p].imag();
    }
    b(2 * k) = target.real();
    b(2 * k + 1) = target.imag();
  };

  std::vector<std::pair<MultiIndex, MultiIndex>> pairs;
  pairs.reserve(K);
  for (int k = 0; k < K; ++k) pairs.emplace_back(random_index(), random_index());
  for (int k = 0; k < K; ++k) fill_row(k, pairs[k].first, pairs[k].second);

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  const Eigen::VectorXd theta = cod.solve(b);

  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if ((A * theta - b).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw IdentificationFailure(
        "tilde_generator: transposed dynamics not representable in-family");

  TildeGenerator out;
  out.h = RealMatrix::Zero(n, n);
  out.gamma = Matrix::Zero(n, n);
  for (int q = 0; q < n_h; ++q) {
    const auto [i, j] = h_slots[q];
    out.h(i, j) = theta(q);
    out.h(j, i) = theta(q);
  }
  for (int i = 0; i < n; ++i) out.gamma(i, i) = theta(n_h + i);
  for (size_t q = 0; q < g_off_slots.size(); ++q) {
    const auto [i, j] = g_off_slots[q];
    const Complex val(theta(n_h + n + 2 * q), theta(n_h + n + 2 * q + 1));
    out.gamma(i, j) = val;
    out.gamma(j, i) = std::conj(val);
  }

  // held-out check: the reconstructed generator must reproduce the swapped
  // rate tensor on pairs not used for the fit
  ModelSpec rebuilt;
  rebuilt.subsystems = m.subsystems;
  rebuilt.h = out.h;
  rebuilt.gamma = out.gamma;
  double worst = 0.0, ref = 1.0;
  for (int k = 0; k < 64; ++k) {
    const MultiIndex row = random_index(), col = random_index();
    const auto [sr, sc] = bath_swapped(sp, row, col);
    const Complex target = phi(m, sr, sc);
    worst = std::max(worst, std::abs(phi(rebuilt, row, col) - target));
    ref = std::max(ref, std::abs(target));
  }
  if (worst > 1e-9 * ref)
    throw IdentificationFailure("tilde_generator: held-out residual too large");

  return out;
}

std::vector<RegionScanRow> entanglement_region_scan(const std::vector<int>& ns,
                                                    double gamma, double tol) {
  if (gamma <= 0.0)
    throw std::invalid_argument("entanglement_region_scan: gamma must be positive");

  std::vector<RegionScanRow> rows;
  for (int n : ns) {
    if (n < 2)
      throw std::invalid_argument("entanglement_region_scan: ring needs n >= 2");
    SplitSpec sp;
    sp.system = {0};
    for (int i = 1; i < n; ++i) sp.bath.push_back(i);

    auto negative_at = [&](double chi) {
      const ModelSpec m =
          ring_model(RingCouplingParams{n, gamma, chi, n / 4.0});
      return min_eigenvalue(tilde_generator(m, sp).gamma) < -1e-10;
    };

    RegionScanRow row;
    row.n = n;
    row.lower_bound = -1.0 / (n - 1);
    row.upper_bound = 1.0;
    if (negative_at(gamma)) {
      double lo = 0.0, hi = gamma;
      while (hi - lo > tol * gamma) {
        const double mid = 0.5 * (lo + hi);
        (negative_at(mid) ? hi : lo) = mid;
      }
      row.chi_star_over_gamma = hi / gamma;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dephasim
