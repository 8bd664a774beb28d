#pragma once

// Gibbs sampler for the parametric non-local two-group model. Conjugate
// updates for rho, alpha, the labels and the null component; adaptive
// random-walk Metropolis blocks for the alternative components and xi.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "nollik/kernel.hpp"
#include "nollik/rng.hpp"

namespace nollik {

// Normal-inverse-gamma: sigma2 ~ IG(a, b), mu | sigma2 ~ N(m, sigma2/kappa).
struct NigParams {
  double m = 0.0;
  double kappa = 1.0;
  double a = 2.0;
  double b = 1.0;

  void validate() const {
    require_finite(m, "NIG location");
    if (!(kappa > 0.0 && a > 0.0 && b > 0.0))
      throw std::invalid_argument("NigParams: kappa, a, b must be > 0");
  }
  double log_density(double mu, double sigma2) const;
};

// Conjugate update from n observations with mean zbar and centered sum of
// squares sq = sum (z_i - zbar)^2.
NigParams nig_posterior(const NigParams& prior, std::size_t n, double zbar,
                        double sq);

struct Hyperparameters {
  double a_rho = 1.0, b_rho = 9.0;
  double a_alpha = 1.0, b_alpha = 1.0;
  NigParams null_prior{0.0, 100.0, 10.0, 10.0};
  NigParams alt_prior1{-3.0, 1.0, 2.0, 5.0};  // mu1 < 0
  NigParams alt_prior2{3.0, 1.0, 2.0, 5.0};   // mu2 > 0
  double a_xi = 20.0, b_xi = 57.0;            // IG prior on xi, mean 3
  int k = 2;
  WeightKind weight_kind = WeightKind::W1;
  double delta = 1.0;  // Indicator half-width; ignored otherwise

  void validate() const;
  const NigParams& alt_prior(int j) const {
    return j == 1 ? alt_prior1 : alt_prior2;
  }
  // The model's weight function at a given xi value.
  WeightFunction weight(double xi) const {
    return WeightFunction{weight_kind, xi, k, delta};
  }
};

struct ParamState {
  double rho = 0.1;
  double alpha = 0.5;
  GaussianComponent null_c{0.0, 1.0};
  GaussianComponent comp1{-3.0, 1.0};
  GaussianComponent comp2{3.0, 1.0};
  double xi = 3.0;
  std::vector<int> lambda;  // 0/1 relevance indicators
  std::vector<int> gamma;   // 0 null, 1/2 alternative component
  double log_k1 = 0.0;      // cached log K_j at current (comp_j, xi)
  double log_k2 = 0.0;

  const GaussianComponent& comp(int j) const { return j == 1 ? comp1 : comp2; }
  GaussianComponent& comp(int j) { return j == 1 ? comp1 : comp2; }
  double log_k(int j) const { return j == 1 ? log_k1 : log_k2; }
};

// Blocks: 0 = (mu1, log sigma1^2), 1 = (mu2, log sigma2^2), 2 = log xi.
struct AdaptiveMhState {
  std::array<double, 3> log_sd{std::log(0.5), std::log(0.5), std::log(0.5)};
  std::array<int, 3> batch_accepts{0, 0, 0};
  std::array<int, 3> batch_proposals{0, 0, 0};
  int n_batch = 50;
  long t = 0;  // iteration counter

  double sd(int block) const { return std::exp(log_sd[block]); }
};

struct ChainControls {
  long iterations = 35000;
  long burn_in = 10000;
  long thin = 5;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(iterations > burn_in && burn_in >= 0 && thin >= 1))
      throw std::invalid_argument(
          "ChainControls: need iterations > burn_in >= 0 and thin >= 1");
  }
  long retained() const { return (iterations - burn_in) / thin; }
};

struct ChainTrace {
  std::vector<double> rho, alpha;
  std::vector<double> mu0, sigma20;
  std::vector<double> mu1, sigma21, mu2, sigma22;
  std::vector<double> xi;
  std::vector<double> lambda_sum;  // per observation, over retained draws
  long n_retained = 0;
  ChainControls controls;
  std::array<double, 3> accept_rate{0.0, 0.0, 0.0};  // MH blocks, whole run

  std::size_t size() const { return rho.size(); }
};

ParamState init_state(std::span<const double> z, const Hyperparameters& hp,
                      std::uint64_t seed);

void step_rho(ParamState& state, const Hyperparameters& hp, Rng& rng);
void step_labels(ParamState& state, const Hyperparameters& hp,
                 std::span<const double> z, Rng& rng);
void step_alpha(ParamState& state, const Hyperparameters& hp, Rng& rng);
void step_null(ParamState& state, const Hyperparameters& hp,
               std::span<const double> z, Rng& rng);
// One MH move on (mu_j, log sigma_j^2); returns true on acceptance.
bool step_alt_component(ParamState& state, const Hyperparameters& hp,
                        std::span<const double> z, int j, AdaptiveMhState& mh,
                        Rng& rng);
// One MH move on log xi; no-op for weight kinds without xi.
bool step_xi(ParamState& state, const Hyperparameters& hp,
             std::span<const double> z, AdaptiveMhState& mh, Rng& rng);
void adapt_proposals(AdaptiveMhState& mh);

ChainTrace run_chain(std::span<const double> z, const Hyperparameters& hp,
                     const ChainControls& controls);

}  // namespace nollik
