#pragma once

// Numerical oracle for the operating characteristics of the two-group model:
// FDR / FOR / power / AUC of an acceptance region, the deltas between the
// local and weighted alternative, the H function and its critical points.

#include <optional>

#include "nollik/mixture.hpp"

namespace nollik {

struct AcceptanceRegion {
  double lower = -2.0;  // < 0
  double upper = 2.0;   // > 0

  void validate() const {
    if (!(lower < 0.0 && upper > 0.0))
      throw std::invalid_argument("AcceptanceRegion: requires lower < 0 < upper");
  }
};

struct TwoGroupSpec {
  double rho = 0.1;
  GaussianComponent null_component{0.0, 1.0};
  MixtureDensity alt_local;  // Local kind
  std::optional<WeightFunction> weight;

  void validate() const {
    if (!(rho > 0.0 && rho < 1.0))
      throw std::invalid_argument("TwoGroupSpec: rho must be in (0,1)");
    null_component.validate();
    alt_local.validate();
    if (alt_local.kind != MixtureKind::Local)
      throw std::invalid_argument("TwoGroupSpec: alt_local must be local");
    if (weight) weight->validate();
  }
};

struct OperatingCharacteristics {
  double fdr = 0.0;
  double for_rate = 0.0;
  double power = 0.0;
  double auc = 0.0;
};

struct DeltaMetrics {
  double d_fdr = 0.0;
  double d_for = 0.0;
  double d_beta = 0.0;
  double d_f1 = 0.0;  // DeltaF1(upper) - DeltaF1(lower)
};

struct CriticalPoints {
  double z_star = 0.0;  // w(z*) = K on the positive semi-axis
  double z_hat = 0.0;   // root of H in [-z*, z*]
  // Plateau case: H vanishes on an interval; z_hat is its midpoint.
  bool plateau = false;
  double z_hat_lo = 0.0;
  double z_hat_hi = 0.0;
};

// Precomputed evaluator shared by the operations below; building it once
// amortizes the weighted-cdf tables across sweep cells.
class TheoryOracle {
 public:
  explicit TheoryOracle(TwoGroupSpec spec);

  const TwoGroupSpec& spec() const { return spec_; }
  bool has_weight() const { return spec_.weight.has_value(); }

  double f0_cdf(double z) const;
  double f1_cdf(double z) const;     // local alternative
  double f1_nl_cdf(double z) const;  // weighted alternative

  // Normalizing constant of the weighted alternative, K~ = sum p_j K_j.
  double total_normconst() const { return k_tilde_; }

  OperatingCharacteristics characteristics(const AcceptanceRegion& region,
                                           bool use_weighted) const;
  DeltaMetrics delta_metrics(const AcceptanceRegion& region) const;

  // H(z) = F1(z) - F1NL(z)
  double h_function(double z) const;

  CriticalPoints critical_points() const;
  bool check_prop2_condition(const AcceptanceRegion& region) const;

 private:
  double auc(bool use_weighted) const;

  TwoGroupSpec spec_;
  MixtureCdf local_cdf_;
  std::optional<MixtureCdf> weighted_cdf_;
  std::optional<MixtureDensity> weighted_mix_;
  double k_tilde_ = 1.0;
};

// Free-function forms matching the operation contracts.
OperatingCharacteristics region_characteristics(const TwoGroupSpec& spec,
                                                const AcceptanceRegion& region,
                                                bool use_weighted);
DeltaMetrics delta_metrics(const TwoGroupSpec& spec,
                           const AcceptanceRegion& region);
double h_function(const TwoGroupSpec& spec, double z);
CriticalPoints critical_points(const TwoGroupSpec& spec);
bool check_prop2_condition(const TwoGroupSpec& spec,
                           const AcceptanceRegion& region);

}  // namespace nollik
