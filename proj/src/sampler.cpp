#include "nollik/sampler.hpp"

#include <algorithm>
#include <cmath>

namespace nollik {

namespace {

double log_inverse_gamma_pdf(double x, double a, double b) {
  return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
}

struct SuffStats {
  std::size_t n = 0;
  double mean = 0.0;
  double sq = 0.0;  // centered sum of squares
};

SuffStats stats_for(std::span<const double> z, const std::vector<int>& gamma,
                    int label) {
  SuffStats s;
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (gamma[i] == label) {
      ++s.n;
      sum += z[i];
    }
  if (s.n == 0) return s;
  s.mean = sum / static_cast<double>(s.n);
  for (std::size_t i = 0; i < z.size(); ++i)
    if (gamma[i] == label) {
      const double d = z[i] - s.mean;
      s.sq += d * d;
    }
  return s;
}

// Draw (mu, sigma2) from an NIG, mu truncated to the sign region of m.
GaussianComponent draw_nig_signed(const NigParams& p, Rng& rng) {
  GaussianComponent c;
  c.sigma2 = rng.inverse_gamma(p.a, p.b);
  const double sd = std::sqrt(c.sigma2 / p.kappa);
  const double lo = p.m < 0.0 ? p.m - 40.0 * sd : 0.0;
  const double hi = p.m < 0.0 ? 0.0 : p.m + 40.0 * sd;
  c.mu = rng.truncated_normal(p.m, c.sigma2 / p.kappa, lo, hi);
  return c;
}

// Unnormalized log target of the (mu_j, log sigma_j^2) block: NIG prior x
// Gaussian likelihood of the component-j observations x K_j^{-n}, plus the
// log-variance Jacobian.
double alt_log_target(const NigParams& prior, const GaussianComponent& c,
                      double log_kj, const SuffStats& s) {
  double lp = prior.log_density(c.mu, c.sigma2) + std::log(c.sigma2);
  if (s.n > 0) {
    const double n = static_cast<double>(s.n);
    const double dev = s.mean - c.mu;
    lp += -n * (kLogSqrt2Pi + 0.5 * std::log(c.sigma2)) -
          (s.sq + n * dev * dev) / (2.0 * c.sigma2);
    lp -= n * log_kj;
  }
  return lp;
}

}  // namespace

double NigParams::log_density(double mu, double sigma2) const {
  return log_inverse_gamma_pdf(sigma2, a, b) +
         log_normal_pdf(mu, m, sigma2 / kappa);
}

NigParams nig_posterior(const NigParams& prior, std::size_t n, double zbar,
                        double sq) {
  if (n == 0) return prior;
  const double nn = static_cast<double>(n);
  NigParams post;
  post.kappa = prior.kappa + nn;
  post.m = (prior.kappa * prior.m + nn * zbar) / post.kappa;
  post.a = prior.a + 0.5 * nn;
  const double dev = zbar - prior.m;
  post.b = prior.b + 0.5 * sq +
           0.5 * (nn * prior.kappa / (nn + prior.kappa)) * dev * dev;
  return post;
}

void Hyperparameters::validate() const {
  if (!(a_rho > 0.0 && b_rho > 0.0 && a_alpha > 0.0 && b_alpha > 0.0))
    throw std::invalid_argument("Hyperparameters: Beta parameters must be > 0");
  null_prior.validate();
  alt_prior1.validate();
  alt_prior2.validate();
  if (!(alt_prior1.m < 0.0 && alt_prior2.m > 0.0))
    throw std::invalid_argument("Hyperparameters: need m1 < 0 < m2");
  if (!(a_xi > 0.0 && b_xi > 0.0))
    throw std::invalid_argument("Hyperparameters: a_xi, b_xi must be > 0");
  weight(3.0).validate();
}

ParamState init_state(std::span<const double> z, const Hyperparameters& hp,
                      std::uint64_t seed) {
  if (z.size() < 2) throw std::invalid_argument("init_state: need N >= 2");
  for (double v : z) require_finite(v, "observation");
  hp.validate();

  Rng rng(seed);
  ParamState state;
  state.rho = rng.beta(hp.a_rho, hp.b_rho);
  state.alpha = rng.beta(hp.a_alpha, hp.b_alpha);
  state.null_c.sigma2 = rng.inverse_gamma(hp.null_prior.a, hp.null_prior.b);
  state.null_c.mu = rng.normal(hp.null_prior.m,
                               std::sqrt(state.null_c.sigma2 / hp.null_prior.kappa));
  state.comp1 = draw_nig_signed(hp.alt_prior1, rng);
  state.comp2 = draw_nig_signed(hp.alt_prior2, rng);
  const WeightFunction probe = hp.weight(3.0);
  state.xi = probe.uses_xi() ? rng.inverse_gamma(hp.a_xi, hp.b_xi) : 1.0;

  const WeightFunction w = hp.weight(state.xi);
  state.log_k1 = log_normalizing_constant(w, state.comp1);
  state.log_k2 = log_normalizing_constant(w, state.comp2);
  state.lambda.assign(z.size(), 0);
  state.gamma.assign(z.size(), 0);
  step_labels(state, hp, z, rng);
  return state;
}

void step_rho(ParamState& state, const Hyperparameters& hp, Rng& rng) {
  const double n1 =
      static_cast<double>(std::count(state.lambda.begin(), state.lambda.end(), 1));
  const double n = static_cast<double>(state.lambda.size());
  state.rho = rng.beta(hp.a_rho + n1, hp.b_rho + n - n1);
}

void step_labels(ParamState& state, const Hyperparameters& hp,
                 std::span<const double> z, Rng& rng) {
  const WeightFunction w = hp.weight(state.xi);
  const double log_rho = std::log(state.rho);
  const double log_1m_rho = std::log1p(-state.rho);
  const double log_alpha = std::log(state.alpha);
  const double log_1m_alpha = std::log1p(-state.alpha);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double lw = log_eval_weight(w, z[i]);
    const double lm[3] = {
        log_1m_rho + log_normal_pdf(z[i], state.null_c.mu, state.null_c.sigma2),
        log_rho + log_1m_alpha + lw +
            log_normal_pdf(z[i], state.comp1.mu, state.comp1.sigma2) -
            state.log_k1,
        log_rho + log_alpha + lw +
            log_normal_pdf(z[i], state.comp2.mu, state.comp2.sigma2) -
            state.log_k2};
    const int idx = rng.categorical_log(lm);
    state.gamma[i] = idx;
    state.lambda[i] = idx == 0 ? 0 : 1;
  }
}

void step_alpha(ParamState& state, const Hyperparameters& hp, Rng& rng) {
  std::size_t n1 = 0, n12 = 0;
  for (int g : state.gamma) {
    if (g != 0) ++n1;
    if (g == 2) ++n12;
  }
  state.alpha = rng.beta(hp.a_alpha + static_cast<double>(n12),
                         hp.b_alpha + static_cast<double>(n1 - n12));
}

void step_null(ParamState& state, const Hyperparameters& hp,
               std::span<const double> z, Rng& rng) {
  const SuffStats s = stats_for(z, state.gamma, 0);
  const NigParams post = nig_posterior(hp.null_prior, s.n, s.mean, s.sq);
  state.null_c.sigma2 = rng.inverse_gamma(post.a, post.b);
  state.null_c.mu =
      rng.normal(post.m, std::sqrt(state.null_c.sigma2 / post.kappa));
}

bool step_alt_component(ParamState& state, const Hyperparameters& hp,
                        std::span<const double> z, int j, AdaptiveMhState& mh,
                        Rng& rng) {
  const int block = j - 1;
  ++mh.batch_proposals[block];
  const GaussianComponent cur = state.comp(j);
  const double sd = mh.sd(block);
  GaussianComponent prop;
  prop.mu = cur.mu + sd * rng.normal();
  prop.sigma2 = cur.sigma2 * std::exp(sd * rng.normal());

  // Hard sign constraint: mu1 < 0 < mu2.
  if ((j == 1 && !(prop.mu < 0.0)) || (j == 2 && !(prop.mu > 0.0))) return false;

  const SuffStats s = stats_for(z, state.gamma, j);
  const WeightFunction w = hp.weight(state.xi);
  double log_k_prop;
  try {
    log_k_prop = log_normalizing_constant(w, prop);
  } catch (const std::runtime_error&) {
    return false;  // proposal's K underflows: zero posterior mass
  }
  const NigParams& prior = hp.alt_prior(j);
  const double log_ratio = alt_log_target(prior, prop, log_k_prop, s) -
                           alt_log_target(prior, cur, state.log_k(j), s);
  if (std::log(rng.uniform()) < log_ratio) {
    state.comp(j) = prop;
    (j == 1 ? state.log_k1 : state.log_k2) = log_k_prop;
    ++mh.batch_accepts[block];
    return true;
  }
  return false;
}

bool step_xi(ParamState& state, const Hyperparameters& hp,
             std::span<const double> z, AdaptiveMhState& mh, Rng& rng) {
  if (!hp.weight(3.0).uses_xi()) return false;
  constexpr int block = 2;
  ++mh.batch_proposals[block];
  const double xi_prop = state.xi * std::exp(mh.sd(block) * rng.normal());

  const WeightFunction w_cur = hp.weight(state.xi);
  const WeightFunction w_prop = hp.weight(xi_prop);
  double lk1_prop, lk2_prop;
  try {
    lk1_prop = log_normalizing_constant(w_prop, state.comp1);
    lk2_prop = log_normalizing_constant(w_prop, state.comp2);
  } catch (const std::runtime_error&) {
    return false;
  }

  std::size_t n11 = 0, n12 = 0;
  for (int g : state.gamma)
    if (g == 1) ++n11; else if (g == 2) ++n12;
  auto log_target = [&](const WeightFunction& w, double xi, double lk1,
                        double lk2) {
    double lp = log_inverse_gamma_pdf(xi, hp.a_xi, hp.b_xi) + std::log(xi);
    for (std::size_t i = 0; i < z.size(); ++i)
      if (state.gamma[i] != 0) lp += log_eval_weight(w, z[i]);
    lp -= static_cast<double>(n11) * lk1 + static_cast<double>(n12) * lk2;
    return lp;
  };
  const double log_ratio =
      log_target(w_prop, xi_prop, lk1_prop, lk2_prop) -
      log_target(w_cur, state.xi, state.log_k1, state.log_k2);
  if (std::log(rng.uniform()) < log_ratio) {
    state.xi = xi_prop;
    state.log_k1 = lk1_prop;
    state.log_k2 = lk2_prop;
    ++mh.batch_accepts[block];
    return true;
  }
  return false;
}

void adapt_proposals(AdaptiveMhState& mh) {
  const double delta =
      std::min(0.01, 1.0 / std::sqrt(static_cast<double>(std::max(mh.t, 1L))));
  for (int b = 0; b < 3; ++b) {
    if (mh.batch_proposals[b] == 0) continue;
    const double rate = static_cast<double>(mh.batch_accepts[b]) /
                        static_cast<double>(mh.batch_proposals[b]);
    mh.log_sd[b] += rate < 0.44 ? -delta : delta;
    mh.batch_accepts[b] = 0;
    mh.batch_proposals[b] = 0;
  }
}

ChainTrace run_chain(std::span<const double> z, const Hyperparameters& hp,
                     const ChainControls& controls) {
  controls.validate();
  ParamState state = init_state(z, hp, controls.seed);
  Rng rng(controls.seed ^ 0x9e3779b97f4a7c15ULL);
  AdaptiveMhState mh;

  ChainTrace trace;
  trace.controls = controls;
  trace.lambda_sum.assign(z.size(), 0.0);
  const long keep = controls.retained();
  trace.rho.reserve(keep);

  std::array<long, 3> accepts{0, 0, 0};
  std::array<long, 3> proposals{0, 0, 0};
  for (long t = 1; t <= controls.iterations; ++t) {
    mh.t = t;
    step_rho(state, hp, rng);
    step_labels(state, hp, z, rng);
    step_alpha(state, hp, rng);
    step_null(state, hp, z, rng);
    for (int j : {1, 2}) {
      ++proposals[j - 1];
      if (step_alt_component(state, hp, z, j, mh, rng)) ++accepts[j - 1];
    }
    if (hp.weight(3.0).uses_xi()) {
      ++proposals[2];
      if (step_xi(state, hp, z, mh, rng)) ++accepts[2];
    }
    if (t % mh.n_batch == 0) adapt_proposals(mh);

    if (t > controls.burn_in && (t - controls.burn_in) % controls.thin == 0) {
      trace.rho.push_back(state.rho);
      trace.alpha.push_back(state.alpha);
      trace.mu0.push_back(state.null_c.mu);
      trace.sigma20.push_back(state.null_c.sigma2);
      trace.mu1.push_back(state.comp1.mu);
      trace.sigma21.push_back(state.comp1.sigma2);
      trace.mu2.push_back(state.comp2.mu);
      trace.sigma22.push_back(state.comp2.sigma2);
      trace.xi.push_back(state.xi);
      for (std::size_t i = 0; i < z.size(); ++i)
        trace.lambda_sum[i] += state.lambda[i];
      ++trace.n_retained;
    }
  }
  for (int b = 0; b < 3; ++b)
    trace.accept_rate[b] = proposals[b] > 0
                               ? static_cast<double>(accepts[b]) /
                                     static_cast<double>(proposals[b])
                               : 0.0;
  return trace;
}

}  // namespace nollik
