#include "nollik/math.hpp"

#include <map>
#include <mutex>

namespace nollik {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw std::domain_error("normal_quantile: p outside [0,1]");
  }
  // Acklam's approximation.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // One Halley refinement against erfc.
  double e = 0.5 * std::erfc(-x / kSqrt2) - p;
  double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

namespace {

double beta_cont_frac(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * beta_cont_frac(a, b, x) / a;
  return 1.0 - std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                        b * std::log1p(-x) + a * std::log(x)) *
                   beta_cont_frac(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (df <= 0.0) throw std::domain_error("student_t_cdf: df <= 0");
  if (t == 0.0) return 0.5;
  const double x = df / (df + t * t);
  const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

namespace {

// Orthonormal Hermite polynomial value p_n(x) for weight exp(-x^2), with the
// full sequence returned for the Christoffel weight formula.
void hermite_sequence(int n, double x, std::vector<double>& p) {
  p.resize(n + 1);
  p[0] = std::pow(M_PI, -0.25);
  if (n == 0) return;
  p[1] = kSqrt2 * x * p[0];
  for (int k = 1; k < n; ++k)
    p[k + 1] = std::sqrt(2.0 / (k + 1.0)) * x * p[k] -
               std::sqrt(double(k) / (k + 1.0)) * p[k - 1];
}

GaussHermiteRule build_gauss_hermite(int n) {
  // Roots of the degree-n Hermite polynomial bracketed by a dense scan of
  // [-R, R], R = sqrt(2n+1), then polished by bisection. Weights from the
  // Christoffel function: w_i = 1 / sum_{k<n} p_k(x_i)^2.
  GaussHermiteRule rule;
  const double R = std::sqrt(2.0 * n + 1.0) + 1.0;
  const int scan = 200 * n;
  std::vector<double> p;
  auto pn = [&](double x) {
    hermite_sequence(n, x, p);
    return p[n];
  };
  double prev_x = -R, prev_v = pn(prev_x);
  for (int i = 1; i <= scan; ++i) {
    double x = -R + 2.0 * R * i / scan;
    double v = pn(x);
    if (prev_v == 0.0) prev_v = v;  // grid hit a root exactly
    if (v == 0.0 || (prev_v < 0) != (v < 0)) {
      double lo = prev_x, hi = x;
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double vm = pn(mid);
        if (vm == 0.0) { lo = hi = mid; break; }
        if ((vm < 0) == (pn(lo) < 0)) lo = mid; else hi = mid;
      }
      double root = 0.5 * (lo + hi);
      hermite_sequence(n - 1, root, p);
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += p[k] * p[k];
      rule.nodes.push_back(root);
      rule.weights.push_back(1.0 / s);
    }
    prev_x = x;
    prev_v = v;
  }
  if (static_cast<int>(rule.nodes.size()) != n)
    throw std::logic_error("gauss_hermite: root bracketing failed");
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite(int order) {
  static std::mutex mu;
  static std::map<int, GaussHermiteRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end())
    it = cache.emplace(order, build_gauss_hermite(order)).first;
  return it->second;
}

}  // namespace nollik
