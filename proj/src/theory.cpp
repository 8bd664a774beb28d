#include "nollik/theory.hpp"

namespace nollik {

TheoryOracle::TheoryOracle(TwoGroupSpec spec)
    : spec_(std::move(spec)), local_cdf_((spec_.validate(), spec_.alt_local)) {
  if (spec_.weight) {
    weighted_mix_ = reparameterize_mixture(spec_.alt_local, *spec_.weight);
    k_tilde_ = 0.0;
    for (std::size_t j = 0; j < spec_.alt_local.size(); ++j)
      k_tilde_ += spec_.alt_local.weights[j] * weighted_mix_->normconsts[j];
    weighted_cdf_.emplace(*weighted_mix_);
  }
}

double TheoryOracle::f0_cdf(double z) const {
  return normal_cdf(z, spec_.null_component.mu, spec_.null_component.sigma2);
}

double TheoryOracle::f1_cdf(double z) const { return local_cdf_(z); }

double TheoryOracle::f1_nl_cdf(double z) const {
  if (!weighted_cdf_)
    throw std::logic_error("TheoryOracle: no weight function in spec");
  return (*weighted_cdf_)(z);
}

double TheoryOracle::auc(bool use_weighted) const {
  constexpr int kGrid = 2000;
  const double mu0 = spec_.null_component.mu;
  const double s20 = spec_.null_component.sigma2;
  double area = 0.0;
  double prev_fpr = 0.0, prev_tpr = 0.0;
  for (int i = 1; i <= kGrid; ++i) {
    const double s = static_cast<double>(i) / kGrid;  // null tail mass = FPR
    double tpr;
    if (i == kGrid) {
      tpr = 1.0;
    } else {
      const double lo = normal_quantile(0.5 * s, mu0, s20);
      const double hi = normal_quantile(1.0 - 0.5 * s, mu0, s20);
      tpr = use_weighted ? f1_nl_cdf(lo) + 1.0 - f1_nl_cdf(hi)
                         : f1_cdf(lo) + 1.0 - f1_cdf(hi);
    }
    area += 0.5 * (tpr + prev_tpr) * (s - prev_fpr);
    prev_fpr = s;
    prev_tpr = tpr;
  }
  return area;
}

OperatingCharacteristics TheoryOracle::characteristics(
    const AcceptanceRegion& region, bool use_weighted) const {
  region.validate();
  if (use_weighted && !weighted_cdf_)
    throw std::invalid_argument("characteristics: spec has no weight function");
  const double rho = spec_.rho;
  const double f0_lo = f0_cdf(region.lower), f0_hi = f0_cdf(region.upper);
  const double f1_lo = use_weighted ? f1_nl_cdf(region.lower) : f1_cdf(region.lower);
  const double f1_hi = use_weighted ? f1_nl_cdf(region.upper) : f1_cdf(region.upper);

  const double r0 = f0_lo + 1.0 - f0_hi;  // null mass rejected
  const double r1 = f1_lo + 1.0 - f1_hi;  // alternative mass rejected
  const double reject_mass = (1.0 - rho) * r0 + rho * r1;
  if (!(reject_mass > kPositiveFloor))
    throw std::runtime_error("characteristics: rejection region has zero mass");
  const double accept_mass =
      (1.0 - rho) * (f0_hi - f0_lo) + rho * (f1_hi - f1_lo);

  OperatingCharacteristics oc;
  oc.fdr = std::clamp((1.0 - rho) * r0 / reject_mass, 0.0, 1.0);
  oc.for_rate = accept_mass > 0.0
                    ? std::clamp(rho * (f1_hi - f1_lo) / accept_mass, 0.0, 1.0)
                    : 0.0;
  oc.power = std::clamp(r1, 0.0, 1.0);
  oc.auc = auc(use_weighted);
  return oc;
}

DeltaMetrics TheoryOracle::delta_metrics(const AcceptanceRegion& region) const {
  region.validate();
  if (!weighted_cdf_)
    throw std::invalid_argument("delta_metrics: spec has no weight function");
  const double rho = spec_.rho;
  const double f0_lo = f0_cdf(region.lower), f0_hi = f0_cdf(region.upper);
  const double f1_lo = f1_cdf(region.lower), f1_hi = f1_cdf(region.upper);
  const double g1_lo = f1_nl_cdf(region.lower), g1_hi = f1_nl_cdf(region.upper);

  const double r0 = f0_lo + 1.0 - f0_hi;
  const double r1 = f1_lo + 1.0 - f1_hi;
  const double r1_nl = g1_lo + 1.0 - g1_hi;

  auto fdr = [&](double r_alt) {
    return (1.0 - rho) * r0 / ((1.0 - rho) * r0 + rho * r_alt);
  };
  auto for_rate = [&](double a1, double a0) {
    return rho * a1 / ((1.0 - rho) * a0 + rho * a1);
  };

  DeltaMetrics d;
  d.d_fdr = fdr(r1) - fdr(r1_nl);
  d.d_for = for_rate(f1_hi - f1_lo, f0_hi - f0_lo) -
            for_rate(g1_hi - g1_lo, f0_hi - f0_lo);
  d.d_beta = (1.0 - r1) - (1.0 - r1_nl);
  d.d_f1 = (f1_hi - g1_hi) - (f1_lo - g1_lo);
  return d;
}

double TheoryOracle::h_function(double z) const {
  return f1_cdf(z) - f1_nl_cdf(z);
}

CriticalPoints TheoryOracle::critical_points() const {
  if (!spec_.weight)
    throw std::invalid_argument("critical_points: spec has no weight function");
  CriticalPoints cp;
  const double k_arg =
      spec_.weight->bounded() ? std::min(k_tilde_, 1.0 - 1e-15) : k_tilde_;
  cp.z_star = spec_.weight->kind == WeightKind::W0
                  ? std::pow(k_tilde_, 1.0 / (2.0 * spec_.weight->k))
                  : weight_inverse(*spec_.weight, k_arg);

  // H decreases to its minimum at -z*, increases to its maximum at z*; its
  // root lives in [-z*, z*]. Locate the sign-change band by bisection.
  const double tol = 1e-10;
  const double band = 1e-12;
  double lo = -cp.z_star, hi = cp.z_star;
  if (h_function(lo) > band || h_function(hi) < -band) {
    throw std::runtime_error(
        "critical_points: H has no sign change in [-z*, z*]");
  }
  // Largest point with H < -band.
  auto bisect = [&](double a, double b, auto pred) {
    while (b - a > tol) {
      double mid = 0.5 * (a + b);
      if (pred(mid)) a = mid; else b = mid;
    }
    return 0.5 * (a + b);
  };
  double left = bisect(lo, hi, [&](double z) { return h_function(z) < -band; });
  double right = bisect(lo, hi, [&](double z) { return !(h_function(z) > band); });
  cp.z_hat_lo = left;
  cp.z_hat_hi = right;
  cp.plateau = (right - left) > 1e-6;
  cp.z_hat = 0.5 * (left + right);
  return cp;
}

bool TheoryOracle::check_prop2_condition(const AcceptanceRegion& region) const {
  region.validate();
  const CriticalPoints cp = critical_points();
  return region.lower <= -cp.z_star && cp.z_star <= region.upper;
}

OperatingCharacteristics region_characteristics(const TwoGroupSpec& spec,
                                                const AcceptanceRegion& region,
                                                bool use_weighted) {
  return TheoryOracle(spec).characteristics(region, use_weighted);
}

DeltaMetrics delta_metrics(const TwoGroupSpec& spec,
                           const AcceptanceRegion& region) {
  return TheoryOracle(spec).delta_metrics(region);
}

double h_function(const TwoGroupSpec& spec, double z) {
  return TheoryOracle(spec).h_function(z);
}

CriticalPoints critical_points(const TwoGroupSpec& spec) {
  return TheoryOracle(spec).critical_points();
}

bool check_prop2_condition(const TwoGroupSpec& spec,
                           const AcceptanceRegion& region) {
  return TheoryOracle(spec).check_prop2_condition(region);
}

}  // namespace nollik
