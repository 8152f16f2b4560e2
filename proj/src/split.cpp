#include "dephasim/split.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dephasim {

namespace {

std::vector<double> slot_values(const ModelSpec& m, const std::vector<int>& idx,
                                const std::vector<int>& positions) {
  std::vector<double> v(idx.size());
  for (size_t a = 0; a < idx.size(); ++a) v[a] = m.subsystems[idx[a]][positions[a]];
  return v;
}

}  // namespace

SplitSpec validate_split(const SplitSpec& sp, const ModelSpec& m) {
  const int n = m.subsystem_count();
  std::vector<int> seen(n, 0);
  auto check_side = [&](const std::vector<int>& side, const char* name) {
    for (size_t a = 0; a < side.size(); ++a) {
      if (side[a] < 0 || side[a] >= n)
        throw InvalidSplit(std::string(name) + ": index out of range");
      if (a > 0 && side[a] <= side[a - 1])
        throw InvalidSplit(std::string(name) + ": indices must be strictly increasing");
      ++seen[side[a]];
    }
  };
  check_side(sp.system, "split.system");
  check_side(sp.bath, "split.bath");
  for (int i = 0; i < n; ++i)
    if (seen[i] != 1)
      throw InvalidSplit("split: subsystem " + std::to_string(i + 1) +
                         " must appear exactly once");
  return sp;
}

std::vector<int> system_dims(const ModelSpec& m, const SplitSpec& sp) {
  std::vector<int> d(sp.system.size());
  for (size_t a = 0; a < sp.system.size(); ++a) d[a] = m.dim(sp.system[a]);
  return d;
}

std::vector<int> bath_dims(const ModelSpec& m, const SplitSpec& sp) {
  std::vector<int> d(sp.bath.size());
  for (size_t a = 0; a < sp.bath.size(); ++a) d[a] = m.dim(sp.bath[a]);
  return d;
}

MultiIndex merge_split_index(const ModelSpec& m, const SplitSpec& sp,
                             const std::vector<int>& sys_positions,
                             const std::vector<int>& bath_positions) {
  MultiIndex full;
  full.positions.assign(m.subsystem_count(), 0);
  for (size_t a = 0; a < sp.system.size(); ++a)
    full.positions[sp.system[a]] = sys_positions[a];
  for (size_t a = 0; a < sp.bath.size(); ++a)
    full.positions[sp.bath[a]] = bath_positions[a];
  return full;
}

EnvPopulations validate_env(const EnvPopulations& env, const ModelSpec& m,
                            const SplitSpec& sp) {
  const auto bdims = bath_dims(m, sp);
  if (env.full.has_value() == env.product.has_value())
    throw InvalidPopulations("env: exactly one of full/product must be given");
  if (env.full) {
    const long db = dims_product(bdims);
    if (static_cast<long>(env.full->size()) != db)
      throw InvalidPopulations("env.full: expected " + std::to_string(db) + " entries");
    double sum = 0.0;
    for (double q : *env.full) {
      if (q < -1e-14) throw InvalidPopulations("env.full: negative probability");
      sum += q;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw InvalidPopulations("env.full: probabilities must sum to 1");
  } else {
    if (env.product->size() != bdims.size())
      throw InvalidPopulations("env.product: one vector per bath subsystem expected");
    for (size_t j = 0; j < bdims.size(); ++j) {
      const auto& q = (*env.product)[j];
      if (static_cast<int>(q.size()) != bdims[j])
        throw InvalidPopulations("env.product[" + std::to_string(j) +
                                 "]: length must match bath subsystem dimension");
      double sum = 0.0;
      for (double v : q) {
        if (v < -1e-14)
          throw InvalidPopulations("env.product[" + std::to_string(j) +
                                   "]: negative probability");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-12)
        throw InvalidPopulations("env.product[" + std::to_string(j) +
                                 "]: probabilities must sum to 1");
    }
  }
  return env;
}

double env_weight(const EnvPopulations& env, const std::vector<int>& bath_positions,
                  const std::vector<int>& bdims) {
  if (env.full) return (*env.full)[flat_index(bath_positions, bdims)];
  double w = 1.0;
  for (size_t j = 0; j < bath_positions.size(); ++j)
    w *= (*env.product)[j][bath_positions[j]];
  return w;
}

SplitPhi split_phi(const ModelSpec& m, const SplitSpec& sp,
                   const std::vector<int>& sTilde, const std::vector<int>& s,
                   const std::vector<int>& bTilde, const std::vector<int>& b) {
  const auto tv = slot_values(m, sp.system, sTilde);
  const auto sv = slot_values(m, sp.system, s);
  const auto tb = slot_values(m, sp.bath, bTilde);
  const auto bv = slot_values(m, sp.bath, b);

  SplitPhi out;
  out.system_part =
      Complex(0.0, omega_restricted(m, sp.system, tv) - omega_restricted(m, sp.system, sv)) +
      upsilon_restricted(m, sp.system, tv, sv);
  out.bath_part =
      Complex(0.0, omega_restricted(m, sp.bath, tb) - omega_restricted(m, sp.bath, bv)) +
      upsilon_restricted(m, sp.bath, tb, bv);

  Complex cross = 0.0;
  for (size_t a = 0; a < sp.system.size(); ++a) {
    const int i = sp.system[a];
    for (size_t c = 0; c < sp.bath.size(); ++c) {
      const int j = sp.bath[c];
      const double h_sym = 0.5 * (m.h(i, j) + m.h(j, i));
      const Complex g_sym = 0.5 * (m.gamma(i, j) + m.gamma(j, i));
      const Complex g_asym = 0.5 * (m.gamma(i, j) - m.gamma(j, i));
      cross += Complex(0.0, h_sym) * (tv[a] * tb[c] - sv[a] * bv[c]);
      cross += (tv[a] - sv[a]) * g_sym * (tb[c] - bv[c]);
      cross += g_asym * (tb[c] * sv[a] - tv[a] * bv[c]);
    }
  }
  out.cross_part = cross;
  return out;
}

Complex system_block_phi(const ModelSpec& m, const SplitSpec& sp,
                         const std::vector<int>& sTilde, const std::vector<int>& s) {
  const auto tv = slot_values(m, sp.system, sTilde);
  const auto sv = slot_values(m, sp.system, s);
  return Complex(0.0, omega_restricted(m, sp.system, tv) -
                          omega_restricted(m, sp.system, sv)) +
         upsilon_restricted(m, sp.system, tv, sv);
}

std::vector<Complex> cross_coefficients(const ModelSpec& m, const SplitSpec& sp,
                                        const std::vector<int>& sTilde,
                                        const std::vector<int>& s) {
  const auto tv = slot_values(m, sp.system, sTilde);
  const auto sv = slot_values(m, sp.system, s);
  std::vector<Complex> c(sp.bath.size(), Complex(0.0));
  for (size_t jslot = 0; jslot < sp.bath.size(); ++jslot) {
    const int j = sp.bath[jslot];
    Complex acc = 0.0;
    for (size_t a = 0; a < sp.system.size(); ++a) {
      const int i = sp.system[a];
      const double h_sym = 0.5 * (m.h(i, j) + m.h(j, i));
      const Complex g_asym = 0.5 * (m.gamma(i, j) - m.gamma(j, i));
      acc += (Complex(0.0, h_sym) - g_asym) * (tv[a] - sv[a]);
    }
    c[jslot] = acc;
  }
  return c;
}

Complex partial_diagonal_phi(const ModelSpec& m, const SplitSpec& sp,
                             const std::vector<int>& sTilde,
                             const std::vector<int>& s, const std::vector<int>& b) {
  const auto coeff = cross_coefficients(m, sp, sTilde, s);
  Complex acc = system_block_phi(m, sp, sTilde, s);
  for (size_t jslot = 0; jslot < sp.bath.size(); ++jslot)
    acc += coeff[jslot] * m.subsystems[sp.bath[jslot]][b[jslot]];
  return acc;
}

Complex coherence_factor(const ModelSpec& m, const SplitSpec& sp,
                         const EnvPopulations& env, const std::vector<int>& sTilde,
                         const std::vector<int>& s, double t) {
  const Complex base = std::exp(-t * system_block_phi(m, sp, sTilde, s));
  const auto coeff = cross_coefficients(m, sp, sTilde, s);
  if (env.is_product()) {
    Complex prod = base;
    for (size_t j = 0; j < sp.bath.size(); ++j) {
      const auto& spec = m.subsystems[sp.bath[j]];
      Complex g = 0.0;
      for (size_t k = 0; k < spec.size(); ++k)
        g += (*env.product)[j][k] * std::exp(-t * coeff[j] * spec[k]);
      prod *= g;
    }
    return prod;
  }
  const auto bdims = bath_dims(m, sp);
  const long db = dims_product(bdims);
  Complex acc = 0.0;
  for (long bf = 0; bf < db; ++bf) {
    const auto bpos = unflatten_index(bf, bdims);
    Complex expo = 0.0;
    for (size_t j = 0; j < bpos.size(); ++j)
      expo += coeff[j] * m.subsystems[sp.bath[j]][bpos[j]];
    acc += (*env.full)[bf] * std::exp(-t * expo);
  }
  return base * acc;
}

Complex coherence_factor_derivative(const ModelSpec& m, const SplitSpec& sp,
                                    const EnvPopulations& env,
                                    const std::vector<int>& sTilde,
                                    const std::vector<int>& s, double t) {
  const Complex phiS = system_block_phi(m, sp, sTilde, s);
  const auto coeff = cross_coefficients(m, sp, sTilde, s);
  const Complex base = std::exp(-t * phiS);
  if (env.is_product()) {
    const size_t nb = sp.bath.size();
    std::vector<Complex> g(nb, Complex(0.0)), gp(nb, Complex(0.0));
    for (size_t j = 0; j < nb; ++j) {
      const auto& spec = m.subsystems[sp.bath[j]];
      for (size_t k = 0; k < spec.size(); ++k) {
        const Complex e = (*env.product)[j][k] * std::exp(-t * coeff[j] * spec[k]);
        g[j] += e;
        gp[j] += -coeff[j] * spec[k] * e;
      }
    }
    // prefix/suffix products so a vanishing g_j cannot poison the derivative
    std::vector<Complex> pre(nb + 1, Complex(1.0)), suf(nb + 1, Complex(1.0));
    for (size_t j = 0; j < nb; ++j) pre[j + 1] = pre[j] * g[j];
    for (size_t j = nb; j-- > 0;) suf[j] = suf[j + 1] * g[j];
    Complex rest = -phiS * pre[nb];
    for (size_t j = 0; j < nb; ++j) rest += gp[j] * pre[j] * suf[j + 1];
    return base * rest;
  }
  const auto bdims = bath_dims(m, sp);
  const long db = dims_product(bdims);
  Complex acc = 0.0;
  for (long bf = 0; bf < db; ++bf) {
    const auto bpos = unflatten_index(bf, bdims);
    Complex expo = phiS;
    for (size_t j = 0; j < bpos.size(); ++j)
      expo += coeff[j] * m.subsystems[sp.bath[j]][bpos[j]];
    acc += (*env.full)[bf] * (-expo) * std::exp(-t * expo);
  }
  return acc;
}

Matrix system_state(const ModelSpec& m, const SplitSpec& sp, const Matrix& rho0_s,
                    const EnvPopulations& env, double t) {
  const auto sdims = system_dims(m, sp);
  const long ds = dims_product(sdims);
  if (rho0_s.rows() != ds || rho0_s.cols() != ds)
    throw DimensionMismatch("system_state: state dimension mismatch");
  Matrix out(ds, ds);
  for (long r = 0; r < ds; ++r) {
    const auto rp = unflatten_index(r, sdims);
    for (long c = 0; c < ds; ++c) {
      const auto cp = unflatten_index(c, sdims);
      out(r, c) = rho0_s(r, c) * coherence_factor(m, sp, env, rp, cp, t);
    }
  }
  return out;
}

Matrix environment_state(const ModelSpec& m, const SplitSpec& sp,
                         const std::vector<double>& sys_populations,
                         const Matrix& rho0_e, double t) {
  const auto sdims = system_dims(m, sp);
  const auto bdims = bath_dims(m, sp);
  const long ds = dims_product(sdims);
  const long db = dims_product(bdims);
  if (static_cast<long>(sys_populations.size()) != ds)
    throw DimensionMismatch("environment_state: populations length mismatch");
  if (rho0_e.rows() != db || rho0_e.cols() != db)
    throw DimensionMismatch("environment_state: state dimension mismatch");

  Matrix out(db, db);
  for (long r = 0; r < db; ++r) {
    const auto bt = unflatten_index(r, bdims);
    for (long c = 0; c < db; ++c) {
      const auto bp = unflatten_index(c, bdims);
      Complex F = 0.0;
      for (long sflat = 0; sflat < ds; ++sflat) {
        if (sys_populations[sflat] == 0.0) continue;
        const auto spos = unflatten_index(sflat, sdims);
        const SplitPhi parts = split_phi(m, sp, spos, spos, bt, bp);
        const Complex p = parts.system_part + parts.bath_part + parts.cross_part;
        F += sys_populations[sflat] * std::exp(-t * p);
      }
      out(r, c) = rho0_e(r, c) * F;
    }
  }
  return out;
}

bool memory_necessary_condition(const ModelSpec& m, const SplitSpec& sp,
                                std::vector<MemoryWitnessPair>* witnesses,
                                double threshold) {
  bool found = false;
  for (int i : sp.system)
    for (int j : sp.bath) {
      const double h_sym = 0.5 * (m.h(i, j) + m.h(j, i));
      const Complex g_asym = 0.5 * (m.gamma(i, j) - m.gamma(j, i));
      if (std::abs(h_sym) > threshold || std::abs(g_asym) > threshold) {
        found = true;
        if (witnesses)
          witnesses->push_back({i, j, Complex(0.0, h_sym) - g_asym});
      }
    }
  return found;
}

}  // namespace dephasim
