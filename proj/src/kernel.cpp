#include "nollik/kernel.hpp"

#include <algorithm>

namespace nollik {

double gaussian_raw_moment(int n, double mu, double sigma2) {
  double prev = 1.0, cur = mu;
  if (n == 0) return prev;
  for (int i = 2; i <= n; ++i) {
    double next = mu * cur + (i - 1) * sigma2 * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double log_normalizing_constant(const WeightFunction& w,
                                const GaussianComponent& c) {
  w.validate();
  c.validate();
  if (w.kind == WeightKind::W0)
    return std::log(gaussian_raw_moment(2 * w.k, c.mu, c.sigma2));
  if (w.kind == WeightKind::Indicator) {
    // Closed form: mass of N(mu, sigma2) outside [-delta, delta].
    const double k = normal_cdf(-w.delta, c.mu, c.sigma2) + 1.0 -
                     normal_cdf(w.delta, c.mu, c.sigma2);
    if (!(k > kPositiveFloor))
      throw std::runtime_error(
          "normalizing_constant: degenerate weight/component pair (underflow)");
    return std::log(k);
  }
  // W1 / W2: composite Gauss-Legendre over +-12 sd. Both kinds have a
  // double-exponential shoulder that needs the panel density; a single
  // global Hermite rule leaves ~1e-4 errors (W2) and up to ~5e-3 for W1 at
  // k = 3 when the component straddles it.
  const double sd = c.sd();
  constexpr int kPanels = 480;
  const double lo = c.mu - 12.0 * sd, hi = c.mu + 12.0 * sd;
  auto f = [&](double z) { return eval_weight(w, z) * normal_pdf(z, c.mu, c.sigma2); };
  double k = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    const double a = lo + (hi - lo) * i / kPanels;
    const double b = lo + (hi - lo) * (i + 1) / kPanels;
    k += gauss_legendre_15(f, a, b);
  }
  if (!(k > kPositiveFloor))
    throw std::runtime_error(
        "normalizing_constant: degenerate weight/component pair (underflow)");
  return std::log(k);
}

double normalizing_constant(const WeightFunction& w,
                            const GaussianComponent& c) {
  return std::exp(log_normalizing_constant(w, c));
}

double log_weighted_density(const WeightedKernel& kernel, double z) {
  return log_eval_weight(kernel.weight, z) +
         log_normal_pdf(z, kernel.component.mu, kernel.component.sigma2) -
         std::log(kernel.normconst);
}

double weighted_density(const WeightedKernel& kernel, double z) {
  return std::exp(log_weighted_density(kernel, z));
}

WeightedCdf::WeightedCdf(WeightedKernel kernel) : kernel_(std::move(kernel)) {
  const double mu = kernel_.component.mu;
  const double sd = kernel_.component.sd();
  const double lo = mu - 12.0 * sd, hi = mu + 12.0 * sd;
  constexpr int kPanels = 240;
  knots_.reserve(kPanels + 3);
  for (int i = 0; i <= kPanels; ++i)
    knots_.push_back(lo + (hi - lo) * i / kPanels);
  if (kernel_.weight.kind == WeightKind::Indicator) {
    // Density jumps at +-delta; make them exact panel boundaries.
    for (double b : {-kernel_.weight.delta, kernel_.weight.delta})
      if (b > lo && b < hi) knots_.push_back(b);
    std::sort(knots_.begin(), knots_.end());
    knots_.erase(std::unique(knots_.begin(), knots_.end()), knots_.end());
  }
  cumulative_.resize(knots_.size());
  cumulative_[0] = 0.0;
  auto f = [&](double z) { return weighted_density(kernel_, z); };
  for (std::size_t i = 1; i < knots_.size(); ++i)
    cumulative_[i] =
        cumulative_[i - 1] + gauss_legendre_15(f, knots_[i - 1], knots_[i]);
}

double WeightedCdf::operator()(double z) const {
  if (z <= knots_.front()) return 0.0;
  if (z >= knots_.back()) return 1.0;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), z);
  std::size_t idx = static_cast<std::size_t>(it - knots_.begin()) - 1;
  auto f = [&](double x) { return weighted_density(kernel_, x); };
  double v = cumulative_[idx] + gauss_legendre_15(f, knots_[idx], z);
  return std::clamp(v, 0.0, 1.0);
}

double weighted_cdf(const WeightedKernel& kernel, double z) {
  return WeightedCdf(kernel)(z);
}

}  // namespace nollik
