#pragma once

#include "dephasim/model.hpp"
#include "dephasim/operational.hpp"

namespace dephasim {

/// Brute-force integrator settings. Fixed-step RK4, re-run with doubled step
/// count until two refinements agree elementwise below refine_tol.
struct IntegratorConfig {
  int initial_steps = 0;       // 0: heuristic from coupling magnitudes
  double refine_tol = 1e-10;
  int max_refinements = 24;
  long dim_cap = 256;
};

/// Term-by-term RK4 integration of the master equation with every subsystem
/// operator realized as a diagonal matrix from its spectrum. Never touches
/// the closed-form rate algebra.
Matrix integrate_lindblad(const ModelSpec& m, const Matrix& rho0, double t,
                          const IntegratorConfig& cfg = {});

Matrix integrate_lindblad_generalized(const GeneralizedModelSpec& g,
                                      const Matrix& rho0, double t,
                                      const IntegratorConfig& cfg = {});

/// Literal state-machine execution of the three-measurement protocol on the
/// full system+environment space: project, renormalize, RK4-evolve, repeat.
OutcomeTable measurement_statistics_bruteforce(const ModelSpec& m, const SplitSpec& sp,
                                               const Matrix& rho0_se,
                                               const MeasurementScheme& sch,
                                               double t, double tau,
                                               const IntegratorConfig& cfg = {});

/// Drive the same protocol through a statistical mixture of Markovian
/// dephasing channels (fixed rate tensor per component).
OutcomeTable simulate_mixture(const MarkovMixture& mix, const Matrix& rho0_s,
                              const MeasurementScheme& sch, double t, double tau);

/// Mixture-averaged system state at time t.
Matrix mixture_state(const MarkovMixture& mix, const Matrix& rho0_s, double t);

}  // namespace dephasim
