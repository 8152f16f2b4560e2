#pragma once

#include <string>

#include "dephasim/split.hpp"

namespace dephasim {

struct MeasurementOperator {
  Matrix op;          // acts on the system block
  double value;       // numeric outcome label
  std::string label;
};

/// Three-stage scheme: first and last stages are general POVM-compatible
/// operator sets (completeness sum Pi^dag Pi = I); the intermediate stage is
/// a complete set of rank-1 orthogonal projectors, so each outcome collapses
/// the system to a fixed state.
struct MeasurementScheme {
  std::vector<MeasurementOperator> first;
  std::vector<MeasurementOperator> intermediate;
  std::vector<MeasurementOperator> last;
};

void validate_scheme(const MeasurementScheme& sch, long sys_dim);

/// Equatorial qubit scheme: first/last along x, intermediate in the xy plane
/// at angle phi from x. Outcome values are +1 (along axis) and -1 (opposite).
MeasurementScheme xnx_scheme(double phi);

struct OutcomeTable {
  std::vector<double> z_values, y_values, x_values;
  std::vector<double> p;  // [iz][iy][ix], x fastest
  double t = 0.0, tau = 0.0;
  std::vector<std::string> dropped_branches;  // zero-probability branches

  double& at(int iz, int iy, int ix) {
    return p[(static_cast<size_t>(iz) * y_values.size() + iy) * x_values.size() + ix];
  }
  double at(int iz, int iy, int ix) const {
    return p[(static_cast<size_t>(iz) * y_values.size() + iy) * x_values.size() + ix];
  }
  double total() const;
};

/// Exact three-point statistics:
/// P(z,y,x) = sum_b q_b [sum_{s s~} <s|E_z|s~><s~|rho_y|s> e^{-tau Phi_{s~b,sb}}]
///                      [sum_{s s~} <s|E_y|s~><s~|rho_x|s> e^{-t Phi_{s~b,sb}}] P(x).
/// Product-form populations factorize per bath subsystem across the pair of
/// brackets (the combined exponent stays linear in each b_j).
OutcomeTable joint_probability(const ModelSpec& m, const SplitSpec& sp,
                               const EnvPopulations& env, const Matrix& rho0_s,
                               const MeasurementScheme& sch, double t, double tau);

/// max_{z,y,x} |P(z,y,x) - P(z|y) P(y|x) P(x)| with conditionals obtained by
/// marginalization; zero-probability conditioners count as exact
/// factorization.
double markov_residual(const OutcomeTable& table);

/// C_pf(t,tau)|_y = sum_{z,x} z x [P(z,x|y) - P(z|y) P(x|y)].
double cpf_correlation(const OutcomeTable& table, int y_index);

/// Two-qubit closed form (P(x) = 1/2 preparation):
/// -4 q+ q- sin^2(phi) e^{-2 gamma (t+tau)} sin(2 t chi_bar) sin(2 tau chi_bar).
double closed_form_cpf_bipartite(double q_plus, double q_minus, double chi_bar,
                                 double gamma, double phi, double t, double tau);

/// Ring family closed form at lambda = n/4, uniform populations:
/// C = f_phi(t,tau) - f_phi(t) f_phi(tau), with f_phi(t) = f(t) cos(phi) and
/// f_phi(t,tau) = 1/2 e^{-2 gamma (t+tau)} { cos^{n/2}[2 chi (t+tau)]
///                + cos(2 phi) cos^{n/2}[2 chi (t-tau)] }.
double closed_form_cpf_ring(int n, double gamma, double chi, double phi,
                            double t, double tau);

/// Replace the intermediate measurement by an externally sampled state
/// preparation: P(z,y,x) = P(z|y) wp(y|x) P(x). Always Markov-factorized.
OutcomeTable random_selection_protocol(const ModelSpec& m, const SplitSpec& sp,
                                       const EnvPopulations& env,
                                       const Matrix& rho0_s,
                                       const MeasurementScheme& sch,
                                       const RealMatrix& selection_kernel,
                                       double t, double tau);

struct MixtureComponent {
  double weight;
  Matrix rates;  // Phi(s~,s; b) over the system block, fixed b
};

struct MarkovMixture {
  std::vector<MixtureComponent> components;
};

/// Statistical-mixture representation over bath configurations: component b
/// carries weight q_b and the bath-diagonal rate tensor at that b.
MarkovMixture as_markov_mixture(const ModelSpec& m, const SplitSpec& sp,
                                const EnvPopulations& env);

}  // namespace dephasim
