#include "dephasim/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "dephasim/split.hpp"

namespace dephasim {

namespace {

constexpr double kBranchTol = 1e-14;

// diagonal of one subsystem operator lifted to the full product space
Eigen::VectorXd lifted_diagonal(const std::vector<std::vector<double>>& spectra,
                                const std::vector<int>& dims, int which) {
  const long d = dims_product(dims);
  Eigen::VectorXd out(d);
  for (long a = 0; a < d; ++a)
    out(a) = spectra[which][unflatten_index(a, dims)[which]];
  return out;
}

Eigen::VectorXd multi_diagonal(const std::vector<std::vector<double>>& spectra,
                               const std::vector<int>& dims,
                               const std::vector<int>& mu) {
  const long d = dims_product(dims);
  Eigen::VectorXd out = Eigen::VectorXd::Ones(d);
  for (long a = 0; a < d; ++a) {
    const auto pos = unflatten_index(a, dims);
    for (size_t i = 0; i < mu.size(); ++i)
      if (mu[i] == 1) out(a) *= spectra[i][pos[i]];
  }
  return out;
}

struct DissipatorTerm {
  Complex weight;
  Eigen::VectorXd left;   // jump operator applied from the left
  Eigen::VectorXd right;  // jump operator applied from the right
  Eigen::VectorXd anti;   // diagonal of S_right S_left
};

Matrix rhs(const Eigen::VectorXd& hdiag, const std::vector<DissipatorTerm>& terms,
           const Matrix& rho) {
  const long d = rho.rows();
  Matrix out(d, d);
  const Complex* src = rho.data();
  Complex* dst = out.data();
  for (long c = 0; c < d; ++c) {
    for (long r = 0; r < d; ++r) {
      const Complex rc = src[c * d + r];
      // -i [H, rho] with diagonal H
      Complex acc = Complex(0.0, -(hdiag(r) - hdiag(c))) * rc;
      // S_l rho S_r - 1/2 {S_r S_l, rho}, term by term
      for (const auto& tm : terms)
        acc += tm.weight *
               ((tm.left(r) * tm.right(c) - 0.5 * (tm.anti(r) + tm.anti(c))) * rc);
      dst[c * d + r] = acc;
    }
  }
  return out;
}

Matrix rk4_run(const Eigen::VectorXd& hdiag, const std::vector<DissipatorTerm>& terms,
               const Matrix& rho0, double t, long steps) {
  const double dt = t / static_cast<double>(steps);
  Matrix rho = rho0;
  for (long s = 0; s < steps; ++s) {
    const Matrix k1 = rhs(hdiag, terms, rho);
    const Matrix k2 = rhs(hdiag, terms, rho + 0.5 * dt * k1);
    const Matrix k3 = rhs(hdiag, terms, rho + 0.5 * dt * k2);
    const Matrix k4 = rhs(hdiag, terms, rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return rho;
}

Matrix integrate_terms(const Eigen::VectorXd& hdiag,
                       const std::vector<DissipatorTerm>& terms, const Matrix& rho0,
                       double t, double rate_bound, const IntegratorConfig& cfg) {
  if (t == 0.0) return rho0;
  long steps = cfg.initial_steps;
  if (steps <= 0)
    steps = std::clamp<long>(static_cast<long>(std::ceil(2.0 * t * rate_bound)), 16,
                             1 << 20);
  Matrix coarse = rk4_run(hdiag, terms, rho0, t, steps);
  for (int r = 0; r < cfg.max_refinements; ++r) {
    steps *= 2;
    Matrix fine = rk4_run(hdiag, terms, rho0, t, steps);
    if ((fine - coarse).cwiseAbs().maxCoeff() < cfg.refine_tol) return fine;
    coarse = std::move(fine);
  }
  throw NoConvergence("integrate_lindblad: refinement did not converge");
}

}  // namespace

Matrix integrate_lindblad(const ModelSpec& m, const Matrix& rho0, double t,
                          const IntegratorConfig& cfg) {
  const auto dims = m.dims();
  const long d = dims_product(dims);
  if (d > cfg.dim_cap)
    throw DimensionMismatch("integrate_lindblad: dimension exceeds cap");
  if (rho0.rows() != d || rho0.cols() != d)
    throw DimensionMismatch("integrate_lindblad: state dimension mismatch");

  const int n = m.subsystem_count();
  std::vector<Eigen::VectorXd> diag(n);
  for (int i = 0; i < n; ++i) diag[i] = lifted_diagonal(m.subsystems, dims, i);

  Eigen::VectorXd hdiag = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (m.h(i, j) != 0.0)
        hdiag += 0.5 * m.h(i, j) * diag[i].cwiseProduct(diag[j]);

  std::vector<DissipatorTerm> terms;
  double rate_bound = hdiag.cwiseAbs().maxCoeff() * 2.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (m.gamma(i, j) == Complex(0.0)) continue;
      DissipatorTerm tm;
      tm.weight = m.gamma(i, j);
      tm.left = diag[i];
      tm.right = diag[j];
      tm.anti = diag[j].cwiseProduct(diag[i]);
      rate_bound += 2.0 * std::abs(m.gamma(i, j)) * diag[i].cwiseAbs().maxCoeff() *
                    diag[j].cwiseAbs().maxCoeff();
      terms.push_back(std::move(tm));
    }
  rate_bound = std::max(rate_bound, 1e-3);

  return integrate_terms(hdiag, terms, rho0, t, rate_bound, cfg);
}

Matrix integrate_lindblad_generalized(const GeneralizedModelSpec& g,
                                      const Matrix& rho0, double t,
                                      const IntegratorConfig& cfg) {
  const auto dims = g.dims();
  const long d = dims_product(dims);
  if (d > cfg.dim_cap)
    throw DimensionMismatch("integrate_lindblad_generalized: dimension exceeds cap");
  if (rho0.rows() != d || rho0.cols() != d)
    throw DimensionMismatch("integrate_lindblad_generalized: state dimension mismatch");

  Eigen::VectorXd hdiag = Eigen::VectorXd::Zero(d);
  for (const auto& [mu, w] : g.h_mu)
    hdiag += 0.5 * w * multi_diagonal(g.subsystems, dims, mu);

  std::vector<DissipatorTerm> terms;
  double rate_bound = hdiag.size() ? hdiag.cwiseAbs().maxCoeff() * 2.0 : 0.0;
  for (const auto& [key, w] : g.gamma_munu) {
    if (w == Complex(0.0)) continue;
    DissipatorTerm tm;
    tm.weight = w;
    tm.left = multi_diagonal(g.subsystems, dims, key.first);
    tm.right = multi_diagonal(g.subsystems, dims, key.second);
    tm.anti = tm.right.cwiseProduct(tm.left);
    rate_bound += 2.0 * std::abs(w) * tm.left.cwiseAbs().maxCoeff() *
                  tm.right.cwiseAbs().maxCoeff();
    terms.push_back(std::move(tm));
  }
  rate_bound = std::max(rate_bound, 1e-3);

  return integrate_terms(hdiag, terms, rho0, t, rate_bound, cfg);
}

namespace {

// operator on the system block, identity on the bath, arbitrary interleaving
Matrix lift_system_operator(const ModelSpec& m, const SplitSpec& sp, const Matrix& op) {
  const auto dims = m.dims();
  const auto sdims = system_dims(m, sp);
  const long d = dims_product(dims);
  Matrix out = Matrix::Zero(d, d);
  for (long u = 0; u < d; ++u) {
    const auto up = unflatten_index(u, dims);
    std::vector<int> us(sp.system.size()), ub(sp.bath.size());
    for (size_t a = 0; a < sp.system.size(); ++a) us[a] = up[sp.system[a]];
    for (size_t a = 0; a < sp.bath.size(); ++a) ub[a] = up[sp.bath[a]];
    const long su = flat_index(us, sdims);
    for (long v = 0; v < d; ++v) {
      const auto vp = unflatten_index(v, dims);
      bool bath_match = true;
      for (size_t a = 0; a < sp.bath.size() && bath_match; ++a)
        bath_match = vp[sp.bath[a]] == ub[a];
      if (!bath_match) continue;
      std::vector<int> vs(sp.system.size());
      for (size_t a = 0; a < sp.system.size(); ++a) vs[a] = vp[sp.system[a]];
      out(u, v) = op(su, flat_index(vs, sdims));
    }
  }
  return out;
}

}  // namespace

OutcomeTable measurement_statistics_bruteforce(const ModelSpec& m, const SplitSpec& sp,
                                               const Matrix& rho0_se,
                                               const MeasurementScheme& sch, double t,
                                               double tau, const IntegratorConfig& cfg) {
  const long ds = dims_product(system_dims(m, sp));
  validate_scheme(sch, ds);

  OutcomeTable table;
  table.t = t;
  table.tau = tau;
  for (const auto& mo : sch.last) table.z_values.push_back(mo.value);
  for (const auto& mo : sch.intermediate) table.y_values.push_back(mo.value);
  for (const auto& mo : sch.first) table.x_values.push_back(mo.value);
  table.p.assign(sch.last.size() * sch.intermediate.size() * sch.first.size(), 0.0);

  std::vector<Matrix> Pix, Piy, Ez;
  for (const auto& mo : sch.first) Pix.push_back(lift_system_operator(m, sp, mo.op));
  for (const auto& mo : sch.intermediate)
    Piy.push_back(lift_system_operator(m, sp, mo.op));
  for (const auto& mo : sch.last) {
    const Matrix lifted = lift_system_operator(m, sp, mo.op);
    Ez.push_back(lifted.adjoint() * lifted);
  }

  for (size_t ix = 0; ix < Pix.size(); ++ix) {
    const Matrix ex = Pix[ix].adjoint() * Pix[ix];
    const double px = std::real((ex * rho0_se).trace());
    if (px < kBranchTol) {
      table.dropped_branches.push_back("x=" + sch.first[ix].label);
      continue;
    }
    const Matrix rho_x = Pix[ix] * rho0_se * Pix[ix].adjoint() / px;
    const Matrix rho_x_t = integrate_lindblad(m, rho_x, t, cfg);
    for (size_t iy = 0; iy < Piy.size(); ++iy) {
      const Matrix ey = Piy[iy].adjoint() * Piy[iy];
      const double pyx = std::real((ey * rho_x_t).trace());
      if (pyx < kBranchTol) {
        table.dropped_branches.push_back("y=" + sch.intermediate[iy].label +
                                         "|x=" + sch.first[ix].label);
        continue;
      }
      const Matrix rho_yx = Piy[iy] * rho_x_t * Piy[iy].adjoint() / pyx;
      const Matrix rho_yx_tau = integrate_lindblad(m, rho_yx, tau, cfg);
      for (size_t iz = 0; iz < Ez.size(); ++iz) {
        const double pz = std::real((Ez[iz] * rho_yx_tau).trace());
        table.at(iz, iy, ix) = pz * pyx * px;
      }
    }
  }
  return table;
}

Matrix mixture_state(const MarkovMixture& mix, const Matrix& rho0_s, double t) {
  if (mix.components.empty())
    throw std::invalid_argument("mixture_state: empty mixture");
  const long ds = mix.components.front().rates.rows();
  if (rho0_s.rows() != ds || rho0_s.cols() != ds)
    throw DimensionMismatch("mixture_state: state dimension mismatch");
  Matrix out = Matrix::Zero(ds, ds);
  for (const auto& comp : mix.components) {
    if (comp.weight == 0.0) continue;
    out += comp.weight *
           (rho0_s.array() * (-t * comp.rates.array()).exp()).matrix();
  }
  return out;
}

OutcomeTable simulate_mixture(const MarkovMixture& mix, const Matrix& rho0_s,
                              const MeasurementScheme& sch, double t, double tau) {
  if (mix.components.empty())
    throw std::invalid_argument("simulate_mixture: empty mixture");
  const long ds = mix.components.front().rates.rows();
  if (rho0_s.rows() != ds || rho0_s.cols() != ds)
    throw DimensionMismatch("simulate_mixture: state dimension mismatch");
  validate_scheme(sch, ds);

  OutcomeTable table;
  table.t = t;
  table.tau = tau;
  for (const auto& mo : sch.last) table.z_values.push_back(mo.value);
  for (const auto& mo : sch.intermediate) table.y_values.push_back(mo.value);
  for (const auto& mo : sch.first) table.x_values.push_back(mo.value);
  table.p.assign(sch.last.size() * sch.intermediate.size() * sch.first.size(), 0.0);

  std::vector<double> px(sch.first.size(), 0.0);
  std::vector<Matrix> rho_x(sch.first.size());
  for (size_t ix = 0; ix < sch.first.size(); ++ix) {
    const Matrix& op = sch.first[ix].op;
    px[ix] = std::real(((op.adjoint() * op) * rho0_s).trace());
    if (px[ix] < kBranchTol) {
      table.dropped_branches.push_back("x=" + sch.first[ix].label);
      continue;
    }
    rho_x[ix] = op * rho0_s * op.adjoint() / px[ix];
  }

  for (const auto& comp : mix.components) {
    if (comp.weight == 0.0) continue;
    const Eigen::ArrayXXcd decay_t = (-t * comp.rates.array()).exp();
    const Eigen::ArrayXXcd decay_tau = (-tau * comp.rates.array()).exp();
    for (size_t ix = 0; ix < sch.first.size(); ++ix) {
      if (px[ix] < kBranchTol) continue;
      const Matrix evolved_x = (rho_x[ix].array() * decay_t).matrix();
      for (size_t iy = 0; iy < sch.intermediate.size(); ++iy) {
        const Matrix& piy = sch.intermediate[iy].op;
        // unnormalized branch state; the 1/p(y|x) of the conditional state
        // cancels against the p(y|x) factor of the joint probability
        const Matrix branch_y = piy * evolved_x * piy.adjoint();
        const Matrix evolved_y = (branch_y.array() * decay_tau).matrix();
        for (size_t iz = 0; iz < sch.last.size(); ++iz) {
          const Matrix& piz = sch.last[iz].op;
          const double pzy = std::real(((piz.adjoint() * piz) * evolved_y).trace());
          table.at(iz, iy, ix) += comp.weight * pzy * px[ix];
        }
      }
    }
  }
  return table;
}

}  // namespace dephasim
