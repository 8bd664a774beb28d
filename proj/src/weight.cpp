#include "nollik/weight.hpp"

namespace nollik {

double eval_weight(const WeightFunction& w, double z) {
  require_finite(z, "weight argument");
  switch (w.kind) {
    case WeightKind::W0: {
      double p = 1.0;
      const double z2 = z * z;
      for (int i = 0; i < w.k; ++i) p *= z2;
      return p;
    }
    case WeightKind::W1: {
      double t = z / w.xi;
      double p = 1.0;
      const double t2 = t * t;
      for (int i = 0; i < w.k; ++i) p *= t2;
      return -std::expm1(-p);
    }
    case WeightKind::W2: {
      if (z == 0.0) return 0.0;  // continuity limit
      double t = z / w.xi;
      double p = 1.0;
      const double t2 = t * t;
      for (int i = 0; i < w.k; ++i) p *= t2;
      return std::exp(-1.0 / p);
    }
    case WeightKind::Indicator:
      return std::fabs(z) <= w.delta ? 0.0 : 1.0;
  }
  return 0.0;
}

double log_eval_weight(const WeightFunction& w, double z) {
  require_finite(z, "weight argument");
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  switch (w.kind) {
    case WeightKind::W0:
      if (z == 0.0) return kNegInf;
      return 2.0 * w.k * std::log(std::fabs(z));
    case WeightKind::W1: {
      if (z == 0.0) return kNegInf;
      double t = z / w.xi;
      double p = 1.0;
      const double t2 = t * t;
      for (int i = 0; i < w.k; ++i) p *= t2;
      // log(1 - exp(-p)) stable for both small and large p.
      if (p < 1e-8) return std::log(p) + std::log1p(-0.5 * p);
      return std::log(-std::expm1(-p));
    }
    case WeightKind::W2: {
      if (z == 0.0) return kNegInf;
      double t = z / w.xi;
      double p = 1.0;
      const double t2 = t * t;
      for (int i = 0; i < w.k; ++i) p *= t2;
      return -1.0 / p;
    }
    case WeightKind::Indicator:
      return std::fabs(z) <= w.delta ? kNegInf : 0.0;
  }
  return kNegInf;
}

double weight_inverse(const WeightFunction& w, double u) {
  if (!(u >= 0.0 && u < 1.0))
    throw std::domain_error("weight_inverse: u outside [0,1)");
  switch (w.kind) {
    case WeightKind::W0:
      return std::pow(u, 1.0 / (2.0 * w.k));
    case WeightKind::W1:
      // 1 - exp(-(r/xi)^{2k}) = u  =>  r = xi * (-log(1-u))^{1/(2k)}
      return w.xi * std::pow(-std::log1p(-u), 1.0 / (2.0 * w.k));
    case WeightKind::W2:
      // exp(-(r/xi)^{-2k}) = u  =>  r = xi * (-log u)^{-1/(2k)}
      if (u == 0.0) return 0.0;
      return w.xi * std::pow(-std::log(u), -1.0 / (2.0 * w.k));
    case WeightKind::Indicator:
      return w.delta;
  }
  return 0.0;
}

}  // namespace nollik
