#pragma once

// Random draws used by the samplers. One Rng per chain; state is threaded
// explicitly so runs are reproducible for a fixed seed.

#include <cstdint>
#include <random>
#include <span>

#include "nollik/math.hpp"

namespace nollik {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return unit_(engine_); }
  double normal(double mean = 0.0, double sd = 1.0) {
    return mean + sd * normal_(engine_);
  }
  double gamma(double shape, double rate) {
    std::gamma_distribution<double> d(shape, 1.0 / rate);
    return d(engine_);
  }
  double inverse_gamma(double shape, double rate) {
    return 1.0 / gamma(shape, rate);
  }
  double beta(double a, double b) {
    double x = gamma(a, 1.0);
    double y = gamma(b, 1.0);
    return x / (x + y);
  }
  // Inverse-cdf draw from N(mu, sigma2) restricted to [lo, hi].
  double truncated_normal(double mu, double sigma2, double lo, double hi);

  // Index draw from unnormalized log masses (max-subtraction normalization).
  int categorical_log(std::span<const double> log_masses);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace nollik
