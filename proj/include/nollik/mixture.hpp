#pragma once

// Gaussian mixtures and the weighted-kernel reparameterization: a weighted
// mixture w(z) f(z) / K~ equals the mixture of per-component weighted kernels
// with weights pi_j = p_j K_j / sum_l p_l K_l.

#include <vector>

#include "nollik/kernel.hpp"

namespace nollik {

enum class MixtureKind { Local, Weighted };

struct MixtureDensity {
  MixtureKind kind = MixtureKind::Local;
  std::vector<double> weights;
  std::vector<GaussianComponent> components;
  // Per-component normalizing constants; filled for Weighted kind.
  std::vector<double> normconsts;
  WeightFunction weight;  // meaningful for Weighted kind

  void validate() const;
  std::size_t size() const { return components.size(); }

  double pdf(double z) const;
  double cdf(double z) const;
};

MixtureDensity reparameterize_mixture(const MixtureDensity& local,
                                      const WeightFunction& w);

// Cached-cdf evaluator for mixtures whose cdf is queried repeatedly.
class MixtureCdf {
 public:
  explicit MixtureCdf(const MixtureDensity& mix);
  double operator()(double z) const;

 private:
  std::vector<double> weights_;
  std::vector<GaussianComponent> gaussians_;  // Local kind path
  std::vector<WeightedCdf> tables_;           // Weighted kind path
};

}  // namespace nollik
