#pragma once

// Weighted Gaussian kernels: normalizing constants, densities, cdfs.

#include <memory>
#include <vector>

#include "nollik/math.hpp"
#include "nollik/weight.hpp"

namespace nollik {

struct GaussianComponent {
  double mu = 0.0;
  double sigma2 = 1.0;

  void validate() const {
    require_finite(mu, "component mean");
    if (!(sigma2 > 0.0))
      throw std::invalid_argument("GaussianComponent: sigma2 must be > 0");
  }
  double sd() const { return std::sqrt(sigma2); }
};

// K = E_{N(mu, sigma2)}[w(Z)], the weighted kernel's normalizing constant.
// W0 uses the closed-form Gaussian noncentral moment; bounded kinds use
// 61-node Gauss-Hermite quadrature accumulated in log space.
double normalizing_constant(const WeightFunction& w, const GaussianComponent& c);
double log_normalizing_constant(const WeightFunction& w,
                                const GaussianComponent& c);

// E[Z^n] for Z ~ N(mu, sigma2) via the moment recurrence
// M_n = mu M_{n-1} + (n-1) sigma2 M_{n-2}.
double gaussian_raw_moment(int n, double mu, double sigma2);

struct WeightedKernel {
  GaussianComponent component;
  WeightFunction weight;
  double normconst = 1.0;  // cached K

  static WeightedKernel make(const WeightFunction& w,
                             const GaussianComponent& c) {
    w.validate();
    c.validate();
    return WeightedKernel{c, w, normalizing_constant(w, c)};
  }
};

// w(z) * phi(z; mu, sigma2) / K
double weighted_density(const WeightedKernel& kernel, double z);
double log_weighted_density(const WeightedKernel& kernel, double z);

// Tabulated cdf of a weighted kernel: fixed panels over +-12 sd around the
// mean with a 15-point Gauss-Legendre rule per panel, cumulative sums at
// panel boundaries, partial-panel integration for point queries. Indicator
// discontinuities are inserted as panel boundaries.
class WeightedCdf {
 public:
  explicit WeightedCdf(WeightedKernel kernel);

  double operator()(double z) const;
  const WeightedKernel& kernel() const { return kernel_; }

 private:
  WeightedKernel kernel_;
  std::vector<double> knots_;
  std::vector<double> cumulative_;  // cdf value at each knot
};

// One-shot convenience; builds a table internally.
double weighted_cdf(const WeightedKernel& kernel, double z);

}  // namespace nollik
