#pragma once

// Truncated stick-breaking Gibbs sampler for the nonparametric variant:
// the alternative is a Dirichlet-process mixture of weighted Gaussian
// kernels, truncated at J components.

#include "nollik/sampler.hpp"

namespace nollik {

struct BnpHyperparameters {
  int J = 30;
  NigParams base{0.0, 0.01, 3.0, 1.0};  // DP base measure
  double alpha_a = 1.0, beta_a = 1.0;   // Gamma prior on the concentration
  double a_rho = 1.0, b_rho = 9.0;
  NigParams null_prior{0.0, 100.0, 10.0, 10.0};
  double a_xi = 20.0, b_xi = 57.0;
  int k = 2;
  WeightKind weight_kind = WeightKind::W1;
  double delta = 1.0;

  void validate() const;
  // Prior mass expected on the last stick; small J with a diffuse
  // concentration prior leaves real mass beyond the truncation point.
  double last_stick_prior_mass() const {
    const double a = alpha_a / beta_a;
    return std::pow(a / (1.0 + a), J - 1);
  }
  // Configuration-time guard (used by the CLI): small J stays available to
  // the library for degenerate-truncation checks.
  void check_truncation() const {
    if (last_stick_prior_mass() >= 1e-6)
      throw std::invalid_argument(
          "BnpHyperparameters: truncation level J too small for the "
          "concentration prior (last-stick mass >= 1e-6)");
  }
  WeightFunction weight(double xi) const {
    return WeightFunction{weight_kind, xi, k, delta};
  }
};

struct BnpState {
  double rho = 0.1;
  GaussianComponent null_c{0.0, 1.0};
  std::vector<GaussianComponent> atoms;  // J components
  std::vector<double> log_k;             // cached log K_l per atom
  std::vector<double> sticks;            // u_1..u_{J-1}
  std::vector<double> omega;             // J stick-breaking weights
  double conc_a = 1.0;
  double xi = 3.0;
  std::vector<int> lambda;  // 0/1
  std::vector<int> gamma;   // 0 null, 1..J cluster

  int J() const { return static_cast<int>(atoms.size()); }
  // n_1l for l = 1..J
  std::vector<std::size_t> cluster_counts() const;
};

// Per-block adaptive proposal scales: blocks 0..J-1 are the atoms, block J
// is log xi.
struct BnpMhState {
  std::vector<double> log_sd;
  std::vector<int> batch_accepts;
  std::vector<int> batch_proposals;
  int n_batch = 50;
  long t = 0;

  explicit BnpMhState(int J)
      : log_sd(J + 1, std::log(0.5)),
        batch_accepts(J + 1, 0),
        batch_proposals(J + 1, 0) {}
  double sd(int block) const { return std::exp(log_sd[block]); }
};

struct BnpChainTrace {
  std::vector<double> rho, mu0, sigma20, xi, conc_a;
  // One row per retained draw, J columns each.
  std::vector<std::vector<double>> omega, atom_mu, atom_sigma2, atom_log_k;
  std::vector<double> lambda_sum;
  long n_retained = 0;
  ChainControls controls;

  std::size_t size() const { return rho.size(); }
};

BnpState init_state_bnp(std::span<const double> z,
                        const BnpHyperparameters& hp, std::uint64_t seed);

void step_labels_bnp(BnpState& state, const BnpHyperparameters& hp,
                     std::span<const double> z, Rng& rng);
void step_sticks(BnpState& state, Rng& rng);
void step_atoms(BnpState& state, const BnpHyperparameters& hp,
                std::span<const double> z, BnpMhState& mh, Rng& rng);
void step_concentration(BnpState& state, const BnpHyperparameters& hp,
                        Rng& rng);
bool step_xi_bnp(BnpState& state, const BnpHyperparameters& hp,
                 std::span<const double> z, BnpMhState& mh, Rng& rng);
void step_rho_bnp(BnpState& state, const BnpHyperparameters& hp, Rng& rng);
void step_null_bnp(BnpState& state, const BnpHyperparameters& hp,
                   std::span<const double> z, Rng& rng);

void adapt_proposals_bnp(BnpMhState& mh);

BnpChainTrace run_chain_bnp(std::span<const double> z,
                            const BnpHyperparameters& hp,
                            const ChainControls& controls);

}  // namespace nollik
