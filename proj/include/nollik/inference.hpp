#pragma once

// Post-processing of chains: relevance probabilities, posterior-mean density
// grids, lfdr, BFDR-controlled thresholds, acceptance regions, and the
// grouped fit with a shared relevant proportion.

#include "nollik/sampler.hpp"
#include "nollik/sampler_bnp.hpp"
#include "nollik/theory.hpp"

namespace nollik {

struct DensityGrid {
  std::vector<double> grid;
  std::vector<double> f0_hat, f1_hat, f_hat;
  double rho_hat = 0.0;
};

struct DiscoveryReport {
  std::vector<double> z;
  std::vector<double> p1;    // P(lambda_i = 1 | data)
  std::vector<double> lfdr;  // (1 - rho) f0 / f, capped into (0, 1]
  std::vector<char> flags;   // p1 > nu_hat
  double nu_hat = 1.0;       // 1.0 = no-discovery sentinel
  double bfdr_at_nu = 0.0;
  double alpha = 0.05;
  AcceptanceRegion region{-std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity()};
};

std::vector<double> estimate_p1(const ChainTrace& trace);
std::vector<double> estimate_p1(const BnpChainTrace& trace);

// 512 points spanning the data range +- 4 sample standard deviations.
std::vector<double> default_grid(std::span<const double> z, int n = 512);

// Pointwise posterior-mean densities across retained draws. The component
// averages are weighted so that f_hat == (1-rho_hat) f0_hat + rho_hat f1_hat
// holds exactly: f0_hat = E[(1-rho) f0]/E[1-rho], f1_hat = E[rho f1]/E[rho].
DensityGrid estimate_density_grid(const ChainTrace& trace,
                                  const Hyperparameters& hp,
                                  std::span<const double> grid);
// BNP variant. weighted_alternative selects whether the alternative draws
// are averaged as weighted kernels (model-consistent, default) or as plain
// Gaussians.
DensityGrid estimate_density_grid(const BnpChainTrace& trace,
                                  const BnpHyperparameters& hp,
                                  std::span<const double> grid,
                                  bool weighted_alternative = true);

// Linear interpolation of (1-rho) f0 / f on the grid; z must lie inside.
double lfdr_from_grid(const DensityGrid& dg, double rho_hat, double z);

struct BfdrThreshold {
  double nu_hat = 1.0;  // sentinel: no discoveries
  double bfdr_at_nu = 0.0;
};

// Minimum observed-p1 candidate nu with BFDR(nu) = mean(1 - p1 | p1 > nu)
// strictly below alpha.
BfdrThreshold bfdr_threshold(std::span<const double> p1, double alpha);

// Critical values from the flag pattern: midpoints between adjacent flagged
// and unflagged observations on each side of zero; +-infinity when a side
// has no flags.
AcceptanceRegion acceptance_region_from_p1(std::span<const double> z,
                                           std::span<const double> p1,
                                           double nu_hat);

DiscoveryReport make_report(std::span<const double> z, const ChainTrace& trace,
                            const Hyperparameters& hp, double alpha = 0.05);
DiscoveryReport make_report(std::span<const double> z,
                            const BnpChainTrace& trace,
                            const BnpHyperparameters& hp, double alpha = 0.05,
                            bool weighted_alternative = true);

struct GroupedFit {
  std::vector<DiscoveryReport> reports;  // one per group
  std::vector<ChainTrace> traces;        // per group; rho column is shared
  std::vector<double> rho;               // pooled rho draws
};

// Per-group parametric samplers sharing a single rho, pooled across groups
// each sweep.
GroupedFit fit_grouped(const std::vector<std::vector<double>>& z_by_group,
                       const Hyperparameters& hp, const ChainControls& controls,
                       double alpha = 0.05);

}  // namespace nollik
