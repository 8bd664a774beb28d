#pragma once

// Non-local weight functions w(z; xi, k). All kinds are even, vanish at the
// origin, and are weakly increasing in |z|. W1, W2 and Indicator are bounded
// in [0, 1]; W0 is unbounded.

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nollik/math.hpp"

namespace nollik {

enum class WeightKind { W0, W1, W2, Indicator };

struct WeightFunction {
  WeightKind kind = WeightKind::W1;
  double xi = 3.0;    // scale (unused by W0 and Indicator)
  int k = 2;          // power (unused by Indicator)
  double delta = 0.0; // half-width (Indicator only)

  void validate() const {
    switch (kind) {
      case WeightKind::W0:
        if (k < 1) throw std::invalid_argument("W0: k must be >= 1");
        break;
      case WeightKind::W1:
      case WeightKind::W2:
        if (!(xi > 0.0)) throw std::invalid_argument("weight: xi must be > 0");
        if (k < 1 || k > 6)
          throw std::invalid_argument("weight: k must be in {1,...,6}");
        break;
      case WeightKind::Indicator:
        if (delta < 0.0)
          throw std::invalid_argument("Indicator: delta must be >= 0");
        break;
    }
  }

  bool bounded() const { return kind != WeightKind::W0; }
  bool uses_xi() const {
    return kind == WeightKind::W1 || kind == WeightKind::W2;
  }
  // Identity surrogate: weighs every point except the origin by 1.
  bool is_identity() const {
    return kind == WeightKind::Indicator && delta == 0.0;
  }
};

double eval_weight(const WeightFunction& w, double z);

// log w(z); -inf at the origin (and inside the Indicator's dead zone).
double log_eval_weight(const WeightFunction& w, double z);

// Inverse of w on the positive semi-axis for bounded kinds: smallest r >= 0
// with w(z) > u for all |z| > r. With u in [0, 1).
double weight_inverse(const WeightFunction& w, double u);

}  // namespace nollik
