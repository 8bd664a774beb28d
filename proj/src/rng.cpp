#include "nollik/rng.hpp"

#include <vector>

namespace nollik {

double Rng::truncated_normal(double mu, double sigma2, double lo, double hi) {
  const double sd = std::sqrt(sigma2);
  const double plo = normal_cdf(lo, mu, sigma2);
  const double phi = normal_cdf(hi, mu, sigma2);
  if (!(phi > plo)) {
    // Interval mass below resolution; fall back to the nearest boundary.
    return std::fabs(lo - mu) < std::fabs(hi - mu) ? lo : hi;
  }
  double u = uniform();
  double p = plo + u * (phi - plo);
  p = std::min(std::max(p, std::numeric_limits<double>::min()),
               1.0 - 1e-16);
  double x = mu + sd * normal_quantile(p);
  return std::min(std::max(x, lo), hi);
}

int Rng::categorical_log(std::span<const double> log_masses) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : log_masses) m = std::max(m, v);
  if (!std::isfinite(m))
    throw std::runtime_error("categorical_log: all masses underflow");
  double total = 0.0;
  std::vector<double> probs(log_masses.size());
  for (std::size_t i = 0; i < log_masses.size(); ++i) {
    probs[i] = std::exp(log_masses[i] - m);
    total += probs[i];
  }
  double u = uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u <= acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace nollik
