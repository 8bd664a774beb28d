#include "nollik/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nollik {

namespace {

std::vector<double> p1_from_sums(const std::vector<double>& lambda_sum,
                                 long n_retained) {
  if (n_retained <= 0) throw std::invalid_argument("estimate_p1: empty trace");
  std::vector<double> p1(lambda_sum.size());
  for (std::size_t i = 0; i < p1.size(); ++i)
    p1[i] = lambda_sum[i] / static_cast<double>(n_retained);
  return p1;
}

void check_grid(std::span<const double> grid) {
  if (grid.size() < 2 || !std::is_sorted(grid.begin(), grid.end()))
    throw std::invalid_argument("density grid must be sorted with >= 2 points");
}

double interpolate(std::span<const double> x, const std::vector<double>& y,
                   double q) {
  if (q < x.front() || q > x.back())
    throw std::out_of_range("lfdr_from_grid: z outside the density grid");
  const auto it = std::upper_bound(x.begin(), x.end(), q);
  const std::size_t hi = std::min<std::size_t>(
      static_cast<std::size_t>(it - x.begin()), x.size() - 1);
  const std::size_t lo = hi - (hi > 0 ? 1 : 0);
  if (hi == lo) return y[lo];
  const double t = (q - x[lo]) / (x[hi] - x[lo]);
  return (1.0 - t) * y[lo] + t * y[hi];
}

}  // namespace

std::vector<double> estimate_p1(const ChainTrace& trace) {
  return p1_from_sums(trace.lambda_sum, trace.n_retained);
}

std::vector<double> estimate_p1(const BnpChainTrace& trace) {
  return p1_from_sums(trace.lambda_sum, trace.n_retained);
}

std::vector<double> default_grid(std::span<const double> z, int n) {
  if (z.empty() || n < 2) throw std::invalid_argument("default_grid: bad input");
  double mean = 0.0;
  for (double v : z) mean += v;
  mean /= static_cast<double>(z.size());
  double var = 0.0;
  for (double v : z) var += (v - mean) * (v - mean);
  var /= static_cast<double>(std::max<std::size_t>(z.size() - 1, 1));
  const double sd = std::sqrt(std::max(var, 1e-12));
  const double lo = *std::min_element(z.begin(), z.end()) - 4.0 * sd;
  const double hi = *std::max_element(z.begin(), z.end()) + 4.0 * sd;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return grid;
}

DensityGrid estimate_density_grid(const ChainTrace& trace,
                                  const Hyperparameters& hp,
                                  std::span<const double> grid) {
  check_grid(grid);
  const std::size_t T = trace.size();
  if (T == 0) throw std::invalid_argument("estimate_density_grid: empty trace");

  DensityGrid dg;
  dg.grid.assign(grid.begin(), grid.end());
  dg.f0_hat.assign(grid.size(), 0.0);
  dg.f1_hat.assign(grid.size(), 0.0);
  dg.f_hat.assign(grid.size(), 0.0);

  double sum_rho = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double rho = trace.rho[t];
    sum_rho += rho;
    const WeightFunction w = hp.weight(trace.xi[t]);
    const WeightedKernel k1 =
        WeightedKernel::make(w, {trace.mu1[t], trace.sigma21[t]});
    const WeightedKernel k2 =
        WeightedKernel::make(w, {trace.mu2[t], trace.sigma22[t]});
    const double a = trace.alpha[t];
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double f0 = normal_pdf(grid[g], trace.mu0[t], trace.sigma20[t]);
      const double f1 = (1.0 - a) * weighted_density(k1, grid[g]) +
                        a * weighted_density(k2, grid[g]);
      dg.f0_hat[g] += (1.0 - rho) * f0;
      dg.f1_hat[g] += rho * f1;
      dg.f_hat[g] += (1.0 - rho) * f0 + rho * f1;
    }
  }
  dg.rho_hat = sum_rho / static_cast<double>(T);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    dg.f0_hat[g] /= static_cast<double>(T) * (1.0 - dg.rho_hat);
    dg.f1_hat[g] /= static_cast<double>(T) * dg.rho_hat;
    dg.f_hat[g] /= static_cast<double>(T);
  }
  return dg;
}

DensityGrid estimate_density_grid(const BnpChainTrace& trace,
                                  const BnpHyperparameters& hp,
                                  std::span<const double> grid,
                                  bool weighted_alternative) {
  check_grid(grid);
  const std::size_t T = trace.size();
  if (T == 0) throw std::invalid_argument("estimate_density_grid: empty trace");
  const int J = static_cast<int>(trace.omega.front().size());

  DensityGrid dg;
  dg.grid.assign(grid.begin(), grid.end());
  dg.f0_hat.assign(grid.size(), 0.0);
  dg.f1_hat.assign(grid.size(), 0.0);
  dg.f_hat.assign(grid.size(), 0.0);

  double sum_rho = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double rho = trace.rho[t];
    sum_rho += rho;
    const WeightFunction w = hp.weight(trace.xi[t]);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double f0 = normal_pdf(grid[g], trace.mu0[t], trace.sigma20[t]);
      double f1 = 0.0;
      for (int l = 0; l < J; ++l) {
        const double phi = normal_pdf(grid[g], trace.atom_mu[t][l],
                                      trace.atom_sigma2[t][l]);
        f1 += weighted_alternative
                  ? trace.omega[t][l] * eval_weight(w, grid[g]) * phi /
                        std::exp(trace.atom_log_k[t][l])
                  : trace.omega[t][l] * phi;
      }
      dg.f0_hat[g] += (1.0 - rho) * f0;
      dg.f1_hat[g] += rho * f1;
      dg.f_hat[g] += (1.0 - rho) * f0 + rho * f1;
    }
  }
  dg.rho_hat = sum_rho / static_cast<double>(T);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    dg.f0_hat[g] /= static_cast<double>(T) * (1.0 - dg.rho_hat);
    dg.f1_hat[g] /= static_cast<double>(T) * dg.rho_hat;
    dg.f_hat[g] /= static_cast<double>(T);
  }
  return dg;
}

double lfdr_from_grid(const DensityGrid& dg, double rho_hat, double z) {
  const double f0 = interpolate(dg.grid, dg.f0_hat, z);
  const double f = interpolate(dg.grid, dg.f_hat, z);
  if (!(f > 0.0)) return 1.0;
  const double v = (1.0 - rho_hat) * f0 / f;
  return std::clamp(v, kPositiveFloor, 1.0);
}

BfdrThreshold bfdr_threshold(std::span<const double> p1, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("bfdr_threshold: alpha must be in (0,1)");
  std::vector<double> sorted(p1.begin(), p1.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::vector<double> candidates = sorted;
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  BfdrThreshold best;  // sentinel: nu_hat = 1, no discoveries
  double running = 0.0;
  std::size_t flagged = 0;
  for (double nu : candidates) {
    // Flag rule p1 > nu: every value strictly above this candidate.
    while (flagged < sorted.size() && sorted[flagged] > nu) {
      running += 1.0 - sorted[flagged];
      ++flagged;
    }
    if (flagged == 0) continue;
    const double bfdr = running / static_cast<double>(flagged);
    if (bfdr < alpha) {
      best.nu_hat = nu;
      best.bfdr_at_nu = bfdr;
    }
  }
  return best;
}

AcceptanceRegion acceptance_region_from_p1(std::span<const double> z,
                                           std::span<const double> p1,
                                           double nu_hat) {
  if (z.size() != p1.size())
    throw std::invalid_argument("acceptance_region_from_p1: length mismatch");
  std::vector<std::size_t> order(z.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return z[a] < z[b]; });

  AcceptanceRegion region{-std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity()};
  // Lower bound: midpoint above the largest flagged negative observation.
  for (std::size_t r = z.size(); r-- > 0;) {
    const std::size_t i = order[r];
    if (z[i] < 0.0 && p1[i] > nu_hat) {
      region.lower = r + 1 < z.size() ? 0.5 * (z[i] + z[order[r + 1]]) : z[i];
      break;
    }
  }
  // Upper bound: midpoint below the smallest flagged positive observation.
  for (std::size_t r = 0; r < z.size(); ++r) {
    const std::size_t i = order[r];
    if (z[i] > 0.0 && p1[i] > nu_hat) {
      region.upper = r > 0 ? 0.5 * (z[i] + z[order[r - 1]]) : z[i];
      break;
    }
  }
  return region;
}

namespace {

template <typename Trace, typename Hp>
DiscoveryReport report_impl(std::span<const double> z, const Trace& trace,
                            const Hp& hp, double alpha, const DensityGrid& dg) {
  DiscoveryReport report;
  report.z.assign(z.begin(), z.end());
  report.p1 = estimate_p1(trace);
  report.alpha = alpha;
  report.lfdr.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    report.lfdr[i] = lfdr_from_grid(dg, dg.rho_hat, z[i]);
  const BfdrThreshold thr = bfdr_threshold(report.p1, alpha);
  report.nu_hat = thr.nu_hat;
  report.bfdr_at_nu = thr.bfdr_at_nu;
  report.flags.resize(z.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    report.flags[i] = report.p1[i] > report.nu_hat ? 1 : 0;
  report.region = acceptance_region_from_p1(z, report.p1, report.nu_hat);
  return report;
}

}  // namespace

DiscoveryReport make_report(std::span<const double> z, const ChainTrace& trace,
                            const Hyperparameters& hp, double alpha) {
  const auto grid = default_grid(z);
  const DensityGrid dg = estimate_density_grid(trace, hp, grid);
  return report_impl(z, trace, hp, alpha, dg);
}

DiscoveryReport make_report(std::span<const double> z,
                            const BnpChainTrace& trace,
                            const BnpHyperparameters& hp, double alpha,
                            bool weighted_alternative) {
  const auto grid = default_grid(z);
  const DensityGrid dg =
      estimate_density_grid(trace, hp, grid, weighted_alternative);
  return report_impl(z, trace, hp, alpha, dg);
}

GroupedFit fit_grouped(const std::vector<std::vector<double>>& z_by_group,
                       const Hyperparameters& hp, const ChainControls& controls,
                       double alpha) {
  if (z_by_group.empty())
    throw std::invalid_argument("fit_grouped: no groups");
  for (const auto& g : z_by_group)
    if (g.size() < 2)
      throw std::invalid_argument("fit_grouped: every group needs N >= 2");
  controls.validate();

  const std::size_t G = z_by_group.size();
  std::vector<ParamState> states;
  states.reserve(G);
  std::size_t n_total = 0;
  for (std::size_t g = 0; g < G; ++g) {
    states.push_back(
        init_state(z_by_group[g], hp, controls.seed + 1000 * (g + 1)));
    n_total += z_by_group[g].size();
  }

  Rng rng(controls.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<AdaptiveMhState> mh(G);

  GroupedFit fit;
  fit.traces.resize(G);
  for (std::size_t g = 0; g < G; ++g) {
    fit.traces[g].controls = controls;
    fit.traces[g].lambda_sum.assign(z_by_group[g].size(), 0.0);
  }

  for (long t = 1; t <= controls.iterations; ++t) {
    // Shared rho: pooled conjugate update across all groups.
    std::size_t n1 = 0;
    for (const auto& s : states)
      n1 += std::count(s.lambda.begin(), s.lambda.end(), 1);
    const double rho =
        rng.beta(hp.a_rho + static_cast<double>(n1),
                 hp.b_rho + static_cast<double>(n_total - n1));
    for (auto& s : states) s.rho = rho;

    for (std::size_t g = 0; g < G; ++g) {
      auto& s = states[g];
      mh[g].t = t;
      step_labels(s, hp, z_by_group[g], rng);
      step_alpha(s, hp, rng);
      step_null(s, hp, z_by_group[g], rng);
      step_alt_component(s, hp, z_by_group[g], 1, mh[g], rng);
      step_alt_component(s, hp, z_by_group[g], 2, mh[g], rng);
      step_xi(s, hp, z_by_group[g], mh[g], rng);
      if (t % mh[g].n_batch == 0) adapt_proposals(mh[g]);
    }

    if (t > controls.burn_in && (t - controls.burn_in) % controls.thin == 0) {
      fit.rho.push_back(rho);
      for (std::size_t g = 0; g < G; ++g) {
        auto& tr = fit.traces[g];
        const auto& s = states[g];
        tr.rho.push_back(s.rho);
        tr.alpha.push_back(s.alpha);
        tr.mu0.push_back(s.null_c.mu);
        tr.sigma20.push_back(s.null_c.sigma2);
        tr.mu1.push_back(s.comp1.mu);
        tr.sigma21.push_back(s.comp1.sigma2);
        tr.mu2.push_back(s.comp2.mu);
        tr.sigma22.push_back(s.comp2.sigma2);
        tr.xi.push_back(s.xi);
        for (std::size_t i = 0; i < z_by_group[g].size(); ++i)
          tr.lambda_sum[i] += s.lambda[i];
        ++tr.n_retained;
      }
    }
  }

  fit.reports.reserve(G);
  for (std::size_t g = 0; g < G; ++g)
    fit.reports.push_back(
        make_report(z_by_group[g], fit.traces[g], hp, alpha));
  return fit;
}

}  // namespace nollik
