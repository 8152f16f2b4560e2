#pragma once

#include <functional>

#include "dephasim/split.hpp"

namespace dephasim {

struct RatePoint {
  double omega = 0.0;
  double gamma_rate = 0.0;
  bool diverged = false;
};

/// -(d/dt) ln f at t via a 4th-order central stencil on ln f. The stencil's
/// complex arguments are unwrapped against the center point, so branch cuts
/// of the log cannot corrupt the phase derivative. Throws CoherenceZero when
/// any stencil point has |f| < 1e-14.
Complex log_derivative_rate(const std::function<Complex(double)>& f, double t,
                            double dt);

/// Time-local qubit rates from the exact mixture derivative of f:
/// omega = Im[-f'/f], gamma_rate = -Re[f'/f]/2. System block must be 2-dim.
RatePoint qubit_rates_from_model(const ModelSpec& m, const SplitSpec& sp,
                                 const EnvPopulations& env, double t);

/// Two-qubit closed form. chi_bar is the dressed imaginary coupling
/// (Im Gamma_SB minus the coherent frequency):
///   D(t) = q+^2 + q-^2 + 2 q+ q- cos(4 chi_bar t),
///   omega(t) = -2 chi_bar (q+ - q-) / D(t),
///   gamma(t) = gamma + 2 chi_bar q+ q- sin(4 chi_bar t) / D(t).
/// Flags divergence when |D| < 1e-14 (only reachable at q+ = q- = 1/2).
RatePoint qubit_canonical_rates(double q_plus, double q_minus, double chi_bar,
                                double gamma, double t);

/// Closed form for the coherence factor of the same family:
/// f(t) = e^{-2 t gamma} (q+ e^{+2 i t chi_bar} + q- e^{-2 i t chi_bar}).
Complex qubit_closed_form_f(double q_plus, double q_minus, double chi_bar,
                            double gamma, double t);

/// Ring family, lambda = n/4, uniform bath populations:
/// f(t) = e^{-2 gamma t} cos^{floor(n/2)}(2 chi t),
/// omega = 0, gamma(t) = gamma + floor(n/2) chi tan(2 chi t).
/// Flags divergence when |cos(2 chi t)| < 1e-12.
Complex ring_closed_form_f(int n, double gamma, double chi, double t);
RatePoint ring_canonical_rates(int n, double gamma, double chi, double t);

/// sup_t |cos^{n/2}(2 chi_n t) - e^{-2 g^2 t^2}| over the grid, with
/// chi_n = g sqrt(2/n); n must be even.
double gaussian_limit_check(double g, int n, const std::vector<double>& t_grid);

}  // namespace dephasim
