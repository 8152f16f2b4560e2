#include "dephasim/operational.hpp"

#include <cmath>
#include <string>

namespace dephasim {

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

Matrix effect(const MeasurementOperator& mo) { return mo.op.adjoint() * mo.op; }

// sum_{s~,s} E(s,s~) rho(s~,s) W(s~,s)
Complex bracket(const Matrix& E, const Matrix& rho, const Matrix& W) {
  return (E.transpose().array() * rho.array() * W.array()).sum();
}

constexpr double kBranchTol = 1e-14;

}  // namespace

void validate_scheme(const MeasurementScheme& sch, long sys_dim) {
  auto check_stage = [&](const std::vector<MeasurementOperator>& stage,
                         const char* name, bool projective_rank1) {
    if (stage.empty())
      throw InvalidScheme(std::string(name) + ": stage must be non-empty");
    Matrix sum = Matrix::Zero(sys_dim, sys_dim);
    for (const auto& mo : stage) {
      if (mo.op.rows() != sys_dim || mo.op.cols() != sys_dim)
        throw InvalidScheme(std::string(name) + ": operator dimension mismatch");
      sum += effect(mo);
    }
    if ((sum - Matrix::Identity(sys_dim, sys_dim)).cwiseAbs().maxCoeff() > 1e-12)
      throw InvalidScheme(std::string(name) + ": completeness sum differs from I");
    if (projective_rank1) {
      for (size_t a = 0; a < stage.size(); ++a) {
        const Matrix& P = stage[a].op;
        if ((P - P.adjoint()).cwiseAbs().maxCoeff() > 1e-12 ||
            (P * P - P).cwiseAbs().maxCoeff() > 1e-12)
          throw InvalidScheme(std::string(name) + ": operator " + std::to_string(a) +
                              " is not an orthogonal projector");
        if (std::abs(P.trace() - Complex(1.0)) > 1e-12)
          throw InvalidScheme(std::string(name) + ": operator " + std::to_string(a) +
                              " must be rank-1 (fixed post-measurement state)");
        for (size_t b = a + 1; b < stage.size(); ++b)
          if ((P * stage[b].op).cwiseAbs().maxCoeff() > 1e-12)
            throw InvalidScheme(std::string(name) + ": operators " +
                                std::to_string(a) + "," + std::to_string(b) +
                                " are not mutually orthogonal");
      }
    }
  };
  check_stage(sch.first, "scheme.first", false);
  check_stage(sch.intermediate, "scheme.intermediate", true);
  check_stage(sch.last, "scheme.last", false);
}

MeasurementScheme xnx_scheme(double phi) {
  auto projector = [](Complex a, Complex b) {
    Eigen::Vector2cd v;
    v << a, b;
    v.normalize();
    return Matrix(v * v.adjoint());
  };
  const Complex e_phi = std::exp(Complex(0.0, phi));
  MeasurementScheme sch;
  sch.first = {{projector(1.0, 1.0), +1.0, "x+"}, {projector(1.0, -1.0), -1.0, "x-"}};
  sch.intermediate = {{projector(1.0, e_phi), +1.0, "n+"},
                      {projector(1.0, -e_phi), -1.0, "n-"}};
  sch.last = sch.first;
  return sch;
}

double OutcomeTable::total() const {
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

OutcomeTable joint_probability(const ModelSpec& m, const SplitSpec& sp,
                               const EnvPopulations& env, const Matrix& rho0_s,
                               const MeasurementScheme& sch, double t, double tau) {
  const auto sdims = system_dims(m, sp);
  const long ds = dims_product(sdims);
  if (rho0_s.rows() != ds || rho0_s.cols() != ds)
    throw DimensionMismatch("joint_probability: system state dimension mismatch");
  validate_scheme(sch, ds);

  OutcomeTable table;
  table.t = t;
  table.tau = tau;
  for (const auto& mo : sch.last) table.z_values.push_back(mo.value);
  for (const auto& mo : sch.intermediate) table.y_values.push_back(mo.value);
  for (const auto& mo : sch.first) table.x_values.push_back(mo.value);
  table.p.assign(sch.last.size() * sch.intermediate.size() * sch.first.size(), 0.0);

  // first-stage branches
  std::vector<double> px(sch.first.size());
  std::vector<Matrix> rho_x(sch.first.size());
  std::vector<bool> dropped(sch.first.size(), false);
  for (size_t ix = 0; ix < sch.first.size(); ++ix) {
    const Matrix& op = sch.first[ix].op;
    px[ix] = std::real((effect(sch.first[ix]).transpose().array() * rho0_s.array()).sum());
    if (px[ix] < kBranchTol) {
      dropped[ix] = true;
      table.dropped_branches.push_back("x=" + sch.first[ix].label);
      continue;
    }
    rho_x[ix] = op * rho0_s * op.adjoint() / px[ix];
  }

  // fixed post-measurement states of the rank-1 intermediate stage
  std::vector<Matrix> rho_y(sch.intermediate.size());
  for (size_t iy = 0; iy < sch.intermediate.size(); ++iy)
    rho_y[iy] = sch.intermediate[iy].op;

  std::vector<Matrix> Ez(sch.last.size()), Ey(sch.intermediate.size());
  for (size_t iz = 0; iz < sch.last.size(); ++iz) Ez[iz] = effect(sch.last[iz]);
  for (size_t iy = 0; iy < sch.intermediate.size(); ++iy)
    Ey[iy] = effect(sch.intermediate[iy]);

  // per system pair: block rate and the per-bath-subsystem linear coefficients
  std::vector<Complex> phiS(ds * ds);
  std::vector<std::vector<Complex>> cj(ds * ds);
  for (long r = 0; r < ds; ++r) {
    const auto rp = unflatten_index(r, sdims);
    for (long c = 0; c < ds; ++c) {
      const auto cp = unflatten_index(c, sdims);
      phiS[r * ds + c] = system_block_phi(m, sp, rp, cp);
      cj[r * ds + c] = cross_coefficients(m, sp, rp, cp);
    }
  }

  if (env.is_product()) {
    // exponent of the bracket product stays linear in each b_j
    for (size_t ix = 0; ix < sch.first.size(); ++ix) {
      if (dropped[ix]) continue;
      for (size_t iy = 0; iy < sch.intermediate.size(); ++iy) {
        for (size_t iz = 0; iz < sch.last.size(); ++iz) {
          Complex acc = 0.0;
          for (long a = 0; a < ds * ds; ++a) {
            const long at = a / ds, ap = a % ds;  // (s~, s)
            const Complex mz = Ez[iz](ap, at) * rho_y[iy](at, ap);
            if (mz == Complex(0.0)) continue;
            for (long b = 0; b < ds * ds; ++b) {
              const long bt = b / ds, bp = b % ds;
              const Complex my = Ey[iy](bp, bt) * rho_x[ix](bt, bp);
              if (my == Complex(0.0)) continue;
              Complex term = mz * my * std::exp(-tau * phiS[a] - t * phiS[b]);
              for (size_t j = 0; j < sp.bath.size(); ++j) {
                const auto& spec = m.subsystems[sp.bath[j]];
                Complex gj = 0.0;
                for (size_t k = 0; k < spec.size(); ++k)
                  gj += (*env.product)[j][k] *
                        std::exp(-(tau * cj[a][j] + t * cj[b][j]) * spec[k]);
                term *= gj;
              }
              acc += term;
            }
          }
          table.at(iz, iy, ix) = std::real(acc) * px[ix];
        }
      }
    }
    return table;
  }

  // full-form populations: direct sum over bath configurations
  const auto bdims = bath_dims(m, sp);
  const long db = dims_product(bdims);
  Matrix Wt(ds, ds), Wtau(ds, ds);
  for (long bf = 0; bf < db; ++bf) {
    const double wb = (*env.full)[bf];
    if (wb == 0.0) continue;
    const auto bpos = unflatten_index(bf, bdims);
    for (long r = 0; r < ds; ++r)
      for (long c = 0; c < ds; ++c) {
        Complex rate = phiS[r * ds + c];
        for (size_t j = 0; j < bpos.size(); ++j)
          rate += cj[r * ds + c][j] * m.subsystems[sp.bath[j]][bpos[j]];
        Wt(r, c) = std::exp(-t * rate);
        Wtau(r, c) = std::exp(-tau * rate);
      }
    for (size_t ix = 0; ix < sch.first.size(); ++ix) {
      if (dropped[ix]) continue;
      for (size_t iy = 0; iy < sch.intermediate.size(); ++iy) {
        const Complex my = bracket(Ey[iy], rho_x[ix], Wt);
        for (size_t iz = 0; iz < sch.last.size(); ++iz) {
          const Complex mz = bracket(Ez[iz], rho_y[iy], Wtau);
          table.at(iz, iy, ix) += wb * std::real(mz * my) * px[ix];
        }
      }
    }
  }
  return table;
}

double markov_residual(const OutcomeTable& table) {
  const size_t nz = table.z_values.size(), ny = table.y_values.size(),
               nx = table.x_values.size();
  std::vector<double> pyx(ny * nx, 0.0), pzy(nz * ny, 0.0);
  std::vector<double> px(nx, 0.0), py(ny, 0.0);
  for (size_t iz = 0; iz < nz; ++iz)
    for (size_t iy = 0; iy < ny; ++iy)
      for (size_t ix = 0; ix < nx; ++ix) {
        const double v = table.at(iz, iy, ix);
        pyx[iy * nx + ix] += v;
        pzy[iz * ny + iy] += v;
        px[ix] += v;
        py[iy] += v;
      }
  double worst = 0.0;
  for (size_t iz = 0; iz < nz; ++iz)
    for (size_t iy = 0; iy < ny; ++iy)
      for (size_t ix = 0; ix < nx; ++ix) {
        if (px[ix] < kBranchTol || py[iy] < kBranchTol) continue;
        const double factored =
            (pzy[iz * ny + iy] / py[iy]) * (pyx[iy * nx + ix] / px[ix]) * px[ix];
        worst = std::max(worst, std::abs(table.at(iz, iy, ix) - factored));
      }
  return worst;
}

double cpf_correlation(const OutcomeTable& table, int y_index) {
  const size_t nz = table.z_values.size(), nx = table.x_values.size();
  double py = 0.0;
  for (size_t iz = 0; iz < nz; ++iz)
    for (size_t ix = 0; ix < nx; ++ix) py += table.at(iz, y_index, ix);
  if (py < kBranchTol) return 0.0;
  double e_zx = 0.0, e_z = 0.0, e_x = 0.0;
  for (size_t iz = 0; iz < nz; ++iz)
    for (size_t ix = 0; ix < nx; ++ix) {
      const double pc = table.at(iz, y_index, ix) / py;
      e_zx += table.z_values[iz] * table.x_values[ix] * pc;
      e_z += table.z_values[iz] * pc;
      e_x += table.x_values[ix] * pc;
    }
  return e_zx - e_z * e_x;
}

double closed_form_cpf_bipartite(double q_plus, double q_minus, double chi_bar,
                                 double gamma, double phi, double t, double tau) {
  const double s = std::sin(phi);
  return -4.0 * q_plus * q_minus * s * s * std::exp(-2.0 * gamma * (t + tau)) *
         std::sin(2.0 * t * chi_bar) * std::sin(2.0 * tau * chi_bar);
}

double closed_form_cpf_ring(int n, double gamma, double chi, double phi, double t,
                            double tau) {
  const int nbar = n / 2;
  auto f = [&](double u) {
    return std::exp(-2.0 * gamma * u) * ipow(std::cos(2.0 * chi * u), nbar);
  };
  const double f_phi_t = f(t) * std::cos(phi);
  const double f_phi_tau = f(tau) * std::cos(phi);
  const double joint =
      0.5 * std::exp(-2.0 * gamma * (t + tau)) *
      (ipow(std::cos(2.0 * chi * (t + tau)), nbar) +
       std::cos(2.0 * phi) * ipow(std::cos(2.0 * chi * (t - tau)), nbar));
  return joint - f_phi_t * f_phi_tau;
}

OutcomeTable random_selection_protocol(const ModelSpec& m, const SplitSpec& sp,
                                       const EnvPopulations& env,
                                       const Matrix& rho0_s,
                                       const MeasurementScheme& sch,
                                       const RealMatrix& selection_kernel,
                                       double t, double tau) {
  const auto sdims = system_dims(m, sp);
  const long ds = dims_product(sdims);
  if (rho0_s.rows() != ds || rho0_s.cols() != ds)
    throw DimensionMismatch("random_selection_protocol: state dimension mismatch");
  validate_scheme(sch, ds);
  const size_t ny = sch.intermediate.size(), nx = sch.first.size();
  if (selection_kernel.rows() != static_cast<long>(ny) ||
      selection_kernel.cols() != static_cast<long>(nx))
    throw DimensionMismatch("selection kernel: expected |y| x |x|");
  for (long ix = 0; ix < selection_kernel.cols(); ++ix) {
    double colsum = 0.0;
    for (long iy = 0; iy < selection_kernel.rows(); ++iy) {
      if (selection_kernel(iy, ix) < -1e-14)
        throw InvalidPopulations("selection kernel: negative entry");
      colsum += selection_kernel(iy, ix);
    }
    if (std::abs(colsum - 1.0) > 1e-12)
      throw InvalidPopulations("selection kernel: columns must sum to 1");
  }

  OutcomeTable table;
  table.t = t;
  table.tau = tau;
  for (const auto& mo : sch.last) table.z_values.push_back(mo.value);
  for (const auto& mo : sch.intermediate) table.y_values.push_back(mo.value);
  for (const auto& mo : sch.first) table.x_values.push_back(mo.value);
  table.p.assign(sch.last.size() * ny * nx, 0.0);

  // the first bracket collapses to 1 once E_y -> I, so only the last stage
  // sees the environment: P(z|y) = sum_{s~,s} E_z(s,s~) rho_y(s~,s) f_{s~s}(tau)
  Matrix F(ds, ds);
  for (long r = 0; r < ds; ++r) {
    const auto rp = unflatten_index(r, sdims);
    for (long c = 0; c < ds; ++c)
      F(r, c) = coherence_factor(m, sp, env, rp, unflatten_index(c, sdims), tau);
  }

  for (size_t ix = 0; ix < nx; ++ix) {
    const double px =
        std::real((effect(sch.first[ix]).transpose().array() * rho0_s.array()).sum());
    if (px < kBranchTol) {
      table.dropped_branches.push_back("x=" + sch.first[ix].label);
      continue;
    }
    for (size_t iy = 0; iy < ny; ++iy) {
      const Matrix& rho_y = sch.intermediate[iy].op;
      for (size_t iz = 0; iz < sch.last.size(); ++iz) {
        const Complex pz = bracket(effect(sch.last[iz]), rho_y, F);
        table.at(iz, iy, ix) = std::real(pz) * selection_kernel(iy, ix) * px;
      }
    }
  }
  return table;
}

MarkovMixture as_markov_mixture(const ModelSpec& m, const SplitSpec& sp,
                                const EnvPopulations& env) {
  const auto sdims = system_dims(m, sp);
  const auto bdims = bath_dims(m, sp);
  const long ds = dims_product(sdims);
  const long db = dims_product(bdims);
  if (db > 4096)
    throw std::invalid_argument("as_markov_mixture: bath configuration space too large");

  MarkovMixture mix;
  mix.components.reserve(db);
  for (long bf = 0; bf < db; ++bf) {
    const auto bpos = unflatten_index(bf, bdims);
    MixtureComponent comp;
    comp.weight = env_weight(env, bpos, bdims);
    comp.rates.resize(ds, ds);
    for (long r = 0; r < ds; ++r) {
      const auto rp = unflatten_index(r, sdims);
      for (long c = 0; c < ds; ++c)
        comp.rates(r, c) =
            partial_diagonal_phi(m, sp, rp, unflatten_index(c, sdims), bpos);
    }
    mix.components.push_back(std::move(comp));
  }
  return mix;
}

}  // namespace dephasim
