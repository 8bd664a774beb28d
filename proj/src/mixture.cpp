#include "nollik/mixture.hpp"

#include <numeric>

namespace nollik {

void MixtureDensity::validate() const {
  if (components.empty())
    throw std::invalid_argument("MixtureDensity: no components");
  if (weights.size() != components.size())
    throw std::invalid_argument("MixtureDensity: weight/component mismatch");
  double total = 0.0;
  for (double p : weights) {
    if (p < 0.0) throw std::invalid_argument("MixtureDensity: negative weight");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12)
    throw std::invalid_argument("MixtureDensity: weights must sum to 1");
  for (const auto& c : components) c.validate();
  if (kind == MixtureKind::Weighted && normconsts.size() != components.size())
    throw std::invalid_argument("MixtureDensity: missing normalizing constants");
}

double MixtureDensity::pdf(double z) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < components.size(); ++j) {
    if (kind == MixtureKind::Local) {
      acc += weights[j] * normal_pdf(z, components[j].mu, components[j].sigma2);
    } else {
      WeightedKernel kern{components[j], weight, normconsts[j]};
      acc += weights[j] * weighted_density(kern, z);
    }
  }
  return acc;
}

double MixtureDensity::cdf(double z) const {
  double acc = 0.0;
  for (std::size_t j = 0; j < components.size(); ++j) {
    if (kind == MixtureKind::Local) {
      acc += weights[j] * normal_cdf(z, components[j].mu, components[j].sigma2);
    } else {
      WeightedKernel kern{components[j], weight, normconsts[j]};
      acc += weights[j] * weighted_cdf(kern, z);
    }
  }
  return acc;
}

MixtureDensity reparameterize_mixture(const MixtureDensity& local,
                                      const WeightFunction& w) {
  if (local.kind != MixtureKind::Local)
    throw std::invalid_argument("reparameterize_mixture: input must be local");
  local.validate();
  w.validate();

  MixtureDensity out;
  out.kind = MixtureKind::Weighted;
  out.weight = w;
  out.components = local.components;
  out.normconsts.resize(local.size());
  out.weights.resize(local.size());

  double k_tilde = 0.0;
  for (std::size_t j = 0; j < local.size(); ++j) {
    out.normconsts[j] = normalizing_constant(w, local.components[j]);
    k_tilde += local.weights[j] * out.normconsts[j];
  }
  if (!(k_tilde > kPositiveFloor))
    throw std::runtime_error("reparameterize_mixture: total constant underflow");
  for (std::size_t j = 0; j < local.size(); ++j)
    out.weights[j] = local.weights[j] * out.normconsts[j] / k_tilde;
  return out;
}

MixtureCdf::MixtureCdf(const MixtureDensity& mix) {
  mix.validate();
  weights_ = mix.weights;
  if (mix.kind == MixtureKind::Local) {
    gaussians_ = mix.components;
  } else {
    tables_.reserve(mix.size());
    for (std::size_t j = 0; j < mix.size(); ++j)
      tables_.emplace_back(
          WeightedKernel{mix.components[j], mix.weight, mix.normconsts[j]});
  }
}

double MixtureCdf::operator()(double z) const {
  double acc = 0.0;
  if (!gaussians_.empty()) {
    for (std::size_t j = 0; j < weights_.size(); ++j)
      acc += weights_[j] * normal_cdf(z, gaussians_[j].mu, gaussians_[j].sigma2);
  } else {
    for (std::size_t j = 0; j < weights_.size(); ++j)
      acc += weights_[j] * tables_[j](z);
  }
  return acc;
}

}  // namespace nollik
