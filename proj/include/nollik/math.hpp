#pragma once

// Scalar numerical utilities shared across the library: Gaussian density /
// cdf / quantile, regularized incomplete beta (for the Student-t cdf),
// log-sum-exp, and Gauss-Hermite quadrature rules.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace nollik {

inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;
inline constexpr double kSqrt2 = 1.4142135623730950488;
// Positive floor below which a normalizing constant is treated as underflow.
inline constexpr double kPositiveFloor = 1e-300;

inline double log_normal_pdf(double z, double mu, double sigma2) {
  const double d = z - mu;
  return -0.5 * d * d / sigma2 - 0.5 * std::log(sigma2) - kLogSqrt2Pi;
}

inline double normal_pdf(double z, double mu, double sigma2) {
  return std::exp(log_normal_pdf(z, mu, sigma2));
}

inline double normal_cdf(double z, double mu = 0.0, double sigma2 = 1.0) {
  return 0.5 * std::erfc(-(z - mu) / (kSqrt2 * std::sqrt(sigma2)));
}

// Standard normal quantile. Acklam's rational approximation polished by one
// Halley step, giving ~1e-15 absolute accuracy away from the endpoints.
double normal_quantile(double p);

inline double normal_quantile(double p, double mu, double sigma2) {
  return mu + std::sqrt(sigma2) * normal_quantile(p);
}

// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction.
double incomplete_beta(double a, double b, double x);

// Student-t cdf with df degrees of freedom.
double student_t_cdf(double t, double df);

inline double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Gauss-Hermite rule for weight exp(-x^2): sum_i weight[i] * f(node[i])
// approximates the integral of f over the real line against exp(-x^2).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // include the exp(-x^2) weight; sum = sqrt(pi)
};

// Cached rule of the given order (computed once, thread-safe).
const GaussHermiteRule& gauss_hermite(int order);

// E[f(Z)] for Z ~ N(mu, sigma2) using the given Gauss-Hermite order.
template <class F>
double gauss_hermite_mean(F&& f, double mu, double sigma2, int order = 61) {
  const GaussHermiteRule& rule = gauss_hermite(order);
  const double scale = kSqrt2 * std::sqrt(sigma2);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    acc += rule.weights[i] * f(mu + scale * rule.nodes[i]);
  return acc / std::sqrt(M_PI);
}

// Log-space variant: returns log E[exp(log_f(Z))], robust when the integrand
// underflows pointwise.
template <class F>
double gauss_hermite_log_mean(F&& log_f, double mu, double sigma2,
                              int order = 61) {
  const GaussHermiteRule& rule = gauss_hermite(order);
  const double scale = kSqrt2 * std::sqrt(sigma2);
  std::vector<double> terms(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    terms[i] = std::log(rule.weights[i]) + log_f(mu + scale * rule.nodes[i]);
  return log_sum_exp(terms) - 0.5 * std::log(M_PI);
}

// 15-point Gauss-Legendre integral of f over [a, b].
template <class F>
double gauss_legendre_15(F&& f, double a, double b) {
  // Nodes/weights for [-1, 1].
  static constexpr std::array<double, 8> x = {
      0.0,
      0.2011940939974345223006283,
      0.3941513470775633698972074,
      0.5709721726085388475372267,
      0.7244177313601700474161861,
      0.8482065834104272162006483,
      0.9372733924007059043077589,
      0.9879925180204854284895657};
  static constexpr std::array<double, 8> w = {
      0.2025782419255612728806202,
      0.1984314853271115764561183,
      0.1861610000155622110268006,
      0.1662692058169939335532009,
      0.1395706779261543144478048,
      0.1071592204671719350118695,
      0.0703660474881081247092674,
      0.0307532419961172683546284};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double acc = w[0] * f(c);
  for (int i = 1; i < 8; ++i)
    acc += w[i] * (f(c - h * x[i]) + f(c + h * x[i]));
  return acc * h;
}

inline double require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw std::invalid_argument(std::string("non-finite ") + what);
  return x;
}

}  // namespace nollik
