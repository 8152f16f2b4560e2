#include "dephasim/witness.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace dephasim {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double ipow(double x, int k) {
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// principal log with the argument unwrapped to within pi of a reference phase
Complex unwrapped_log(Complex v, double ref_arg) {
  double a = std::arg(v);
  while (a - ref_arg > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  while (a - ref_arg < -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return {std::log(std::abs(v)), a};
}

}  // namespace

Complex log_derivative_rate(const std::function<Complex(double)>& f, double t,
                            double dt) {
  const Complex fc = f(t);
  const Complex fm2 = f(t - 2 * dt), fm1 = f(t - dt), fp1 = f(t + dt),
                fp2 = f(t + 2 * dt);
  for (const Complex& v : {fc, fm2, fm1, fp1, fp2})
    if (std::abs(v) < 1e-14)
      throw CoherenceZero("log_derivative_rate: |f| below 1e-14 on the stencil");

  const double ref = std::arg(fc);
  const Complex lm2 = unwrapped_log(fm2, ref), lm1 = unwrapped_log(fm1, ref),
                lp1 = unwrapped_log(fp1, ref), lp2 = unwrapped_log(fp2, ref);
  const Complex dlog = (-lp2 + 8.0 * lp1 - 8.0 * lm1 + lm2) / (12.0 * dt);
  return -dlog;
}

RatePoint qubit_rates_from_model(const ModelSpec& m, const SplitSpec& sp,
                                 const EnvPopulations& env, double t) {
  const auto sdims = system_dims(m, sp);
  if (dims_product(sdims) != 2)
    throw DimensionMismatch("qubit_rates_from_model: system block must be 2-dim");
  const std::vector<int> up{0}, down{1};
  const Complex f = coherence_factor(m, sp, env, up, down, t);
  if (std::abs(f) < 1e-14) return {kNan, kNan, true};
  const Complex fp = coherence_factor_derivative(m, sp, env, up, down, t);
  const Complex rate = -fp / f;  // = i omega + 2 gamma
  return {rate.imag(), 0.5 * rate.real(), false};
}

RatePoint qubit_canonical_rates(double q_plus, double q_minus, double chi_bar,
                                double gamma, double t) {
  const double D = q_plus * q_plus + q_minus * q_minus +
                   2.0 * q_plus * q_minus * std::cos(4.0 * chi_bar * t);
  if (std::abs(D) < 1e-14) return {kNan, kNan, true};
  RatePoint r;
  r.omega = -2.0 * chi_bar * (q_plus - q_minus) / D;
  r.gamma_rate = gamma + 2.0 * chi_bar * q_plus * q_minus * std::sin(4.0 * chi_bar * t) / D;
  return r;
}

Complex qubit_closed_form_f(double q_plus, double q_minus, double chi_bar,
                            double gamma, double t) {
  return std::exp(-2.0 * t * gamma) *
         (q_plus * std::exp(Complex(0.0, 2.0 * t * chi_bar)) +
          q_minus * std::exp(Complex(0.0, -2.0 * t * chi_bar)));
}

Complex ring_closed_form_f(int n, double gamma, double chi, double t) {
  const int nbar = n / 2;
  return std::exp(-2.0 * gamma * t) * ipow(std::cos(2.0 * chi * t), nbar);
}

RatePoint ring_canonical_rates(int n, double gamma, double chi, double t) {
  const int nbar = n / 2;
  const double c = std::cos(2.0 * chi * t);
  if (std::abs(c) < 1e-12) return {kNan, kNan, true};
  return {0.0, gamma + nbar * chi * std::tan(2.0 * chi * t), false};
}

double gaussian_limit_check(double g, int n, const std::vector<double>& t_grid) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("gaussian_limit_check: n must be even and >= 2");
  const double chi_n = g * std::sqrt(2.0 / n);
  double sup = 0.0;
  for (double t : t_grid) {
    const double lhs = ipow(std::cos(2.0 * chi_n * t), n / 2);
    const double rhs = std::exp(-2.0 * g * g * t * t);
    sup = std::max(sup, std::abs(lhs - rhs));
  }
  return sup;
}

}  // namespace dephasim
