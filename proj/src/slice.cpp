#include "nollik/slice.hpp"

namespace nollik {

namespace {

// Draw from N(mu, sigma2) truncated to {|x| > r}.
double two_tail_normal(Rng& rng, double mu, double sigma2, double r) {
  const double left = normal_cdf(-r, mu, sigma2);
  const double right = 1.0 - normal_cdf(r, mu, sigma2);
  const double total = left + right;
  if (!(total > 0.0)) {
    // Both tails below resolution; return the heavier boundary.
    return mu >= 0.0 ? r : -r;
  }
  const double lim = mu + 40.0 * std::sqrt(sigma2);
  if (rng.uniform() * total < left)
    return rng.truncated_normal(mu, sigma2, -lim, -r);
  return rng.truncated_normal(mu, sigma2, r, lim);
}

}  // namespace

std::vector<double> slice_sample_weighted(const WeightedKernel& kernel,
                                          std::size_t n, std::uint64_t seed) {
  const WeightFunction& w = kernel.weight;
  if (!w.bounded())
    throw std::invalid_argument(
        "slice_sample_weighted: unbounded weight kind is unsupported");
  std::vector<double> draws;
  if (n == 0) return draws;
  draws.reserve(n);

  Rng rng(seed);
  const GaussianComponent& c = kernel.component;
  // Start from a point of nonzero weight.
  double theta = c.mu + c.sd();
  for (int i = 0; eval_weight(w, theta) <= 0.0 && i < 64; ++i)
    theta = c.mu + (i + 2) * c.sd();

  constexpr std::size_t kBurnIn = 100;
  for (std::size_t t = 0; t < kBurnIn + n; ++t) {
    const double u = rng.uniform() * eval_weight(w, theta);
    const double r = weight_inverse(w, u);
    theta = two_tail_normal(rng, c.mu, c.sigma2, r);
    if (t >= kBurnIn) draws.push_back(theta);
  }
  return draws;
}

std::vector<double> slice_sample_skew_normal(double alpha, std::size_t n,
                                             std::uint64_t seed) {
  std::vector<double> draws;
  if (n == 0) return draws;
  draws.reserve(n);
  Rng rng(seed);
  double theta = 0.5;
  constexpr std::size_t kBurnIn = 100;
  for (std::size_t t = 0; t < kBurnIn + n; ++t) {
    const double wt = 2.0 * normal_cdf(alpha * theta);
    const double u = rng.uniform() * wt;
    const double bound = normal_quantile(0.5 * u) / alpha;
    theta = alpha > 0.0 ? rng.truncated_normal(0.0, 1.0, bound, 40.0)
                        : rng.truncated_normal(0.0, 1.0, -40.0, bound);
    if (t >= kBurnIn) draws.push_back(theta);
  }
  return draws;
}

}  // namespace nollik
