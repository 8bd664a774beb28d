#include "nollik/sampler_bnp.hpp"

#include <algorithm>
#include <cmath>

namespace nollik {

namespace {

double log_inverse_gamma_pdf(double x, double a, double b) {
  return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
}

void recompute_omega(BnpState& state) {
  const int J = static_cast<int>(state.sticks.size()) + 1;
  state.omega.assign(J, 0.0);
  double remaining = 1.0;
  for (int l = 0; l < J - 1; ++l) {
    state.omega[l] = state.sticks[l] * remaining;
    remaining *= 1.0 - state.sticks[l];
  }
  state.omega[J - 1] = remaining;  // last weight absorbs the rest
}

struct SuffStats {
  std::size_t n = 0;
  double mean = 0.0;
  double sq = 0.0;
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

double atom_log_target(const NigParams& base, const GaussianComponent& c,
                       double log_k, const SuffStats& s) {
  double lp = base.log_density(c.mu, c.sigma2) + std::log(c.sigma2);
  if (s.n > 0) {
    const double n = static_cast<double>(s.n);
    const double dev = s.mean - c.mu;
    lp += -n * (kLogSqrt2Pi + 0.5 * std::log(c.sigma2)) -
          (s.sq + n * dev * dev) / (2.0 * c.sigma2);
    lp -= n * log_k;
  }
  return lp;
}

}  // namespace

void BnpHyperparameters::validate() const {
  if (J < 2) throw std::invalid_argument("BnpHyperparameters: J must be >= 2");
  base.validate();
  null_prior.validate();
  if (!(alpha_a > 0.0 && beta_a > 0.0 && a_rho > 0.0 && b_rho > 0.0 &&
        a_xi > 0.0 && b_xi > 0.0))
    throw std::invalid_argument(
        "BnpHyperparameters: shape/rate parameters must be > 0");
  weight(3.0).validate();
}

std::vector<std::size_t> BnpState::cluster_counts() const {
  std::vector<std::size_t> n(atoms.size(), 0);
  for (int g : gamma)
    if (g > 0) ++n[g - 1];
  return n;
}

BnpState init_state_bnp(std::span<const double> z,
                        const BnpHyperparameters& hp, std::uint64_t seed) {
  if (z.size() < 2) throw std::invalid_argument("init_state_bnp: need N >= 2");
  for (double v : z) require_finite(v, "observation");
  hp.validate();

  Rng rng(seed);
  BnpState state;
  state.rho = rng.beta(hp.a_rho, hp.b_rho);
  state.null_c.sigma2 = rng.inverse_gamma(hp.null_prior.a, hp.null_prior.b);
  state.null_c.mu = rng.normal(
      hp.null_prior.m, std::sqrt(state.null_c.sigma2 / hp.null_prior.kappa));
  state.conc_a = rng.gamma(hp.alpha_a, hp.beta_a);
  state.sticks.resize(hp.J - 1);
  for (auto& u : state.sticks)
    u = std::clamp(rng.beta(1.0, state.conc_a), 1e-12, 1.0 - 1e-12);
  recompute_omega(state);

  const WeightFunction probe = hp.weight(3.0);
  state.xi = probe.uses_xi() ? rng.inverse_gamma(hp.a_xi, hp.b_xi) : 1.0;
  const WeightFunction w = hp.weight(state.xi);
  state.atoms.resize(hp.J);
  state.log_k.resize(hp.J);
  for (int l = 0; l < hp.J; ++l) {
    auto& c = state.atoms[l];
    c.sigma2 = rng.inverse_gamma(hp.base.a, hp.base.b);
    c.mu = rng.normal(hp.base.m, std::sqrt(c.sigma2 / hp.base.kappa));
    state.log_k[l] = log_normalizing_constant(w, c);
  }
  state.lambda.assign(z.size(), 0);
  state.gamma.assign(z.size(), 0);
  step_labels_bnp(state, hp, z, rng);
  return state;
}

void step_labels_bnp(BnpState& state, const BnpHyperparameters& hp,
                     std::span<const double> z, Rng& rng) {
  const int J = state.J();
  const WeightFunction w = hp.weight(state.xi);
  const double log_rho = std::log(state.rho);
  const double log_1m_rho = std::log1p(-state.rho);
  std::vector<double> log_omega(J);
  for (int l = 0; l < J; ++l)
    log_omega[l] = state.omega[l] > 0.0 ? std::log(state.omega[l])
                                        : -std::numeric_limits<double>::infinity();
  std::vector<double> lm(J + 1);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double lw = log_eval_weight(w, z[i]);
    lm[0] = log_1m_rho +
            log_normal_pdf(z[i], state.null_c.mu, state.null_c.sigma2);
    for (int l = 0; l < J; ++l)
      lm[l + 1] = log_rho + log_omega[l] + lw +
                  log_normal_pdf(z[i], state.atoms[l].mu,
                                 state.atoms[l].sigma2) -
                  state.log_k[l];
    const int idx = rng.categorical_log(lm);
    state.gamma[i] = idx;
    state.lambda[i] = idx == 0 ? 0 : 1;
  }
}

void step_sticks(BnpState& state, Rng& rng) {
  const int J = state.J();
  const auto n = state.cluster_counts();
  // tail[j] = sum of counts in clusters after j (0-based)
  double tail = 0.0;
  std::vector<double> tails(J, 0.0);
  for (int l = J - 1; l >= 0; --l) {
    tails[l] = tail;
    tail += static_cast<double>(n[l]);
  }
  for (int j = 0; j < J - 1; ++j) {
    const double u =
        rng.beta(1.0 + static_cast<double>(n[j]), state.conc_a + tails[j]);
    // Keep sticks strictly inside (0,1): u == 1 exactly (possible in floating
    // point for tiny concentration) would send log(1-u) to -inf downstream.
    state.sticks[j] = std::clamp(u, 1e-12, 1.0 - 1e-12);
  }
  recompute_omega(state);
}

void step_atoms(BnpState& state, const BnpHyperparameters& hp,
                std::span<const double> z, BnpMhState& mh, Rng& rng) {
  const WeightFunction w = hp.weight(state.xi);
  const auto counts = state.cluster_counts();
  for (int l = 0; l < state.J(); ++l) {
    if (counts[l] == 0) {
      // Empty cluster: refresh directly from the base measure.
      auto& c = state.atoms[l];
      c.sigma2 = rng.inverse_gamma(hp.base.a, hp.base.b);
      c.mu = rng.normal(hp.base.m, std::sqrt(c.sigma2 / hp.base.kappa));
      state.log_k[l] = log_normalizing_constant(w, c);
      continue;
    }
    ++mh.batch_proposals[l];
    const GaussianComponent cur = state.atoms[l];
    const double sd = mh.sd(l);
    GaussianComponent prop;
    prop.mu = cur.mu + sd * rng.normal();
    prop.sigma2 = cur.sigma2 * std::exp(sd * rng.normal());
    double log_k_prop;
    try {
      log_k_prop = log_normalizing_constant(w, prop);
    } catch (const std::runtime_error&) {
      continue;
    }
    const SuffStats s = stats_for(z, state.gamma, l + 1);
    const double log_ratio =
        atom_log_target(hp.base, prop, log_k_prop, s) -
        atom_log_target(hp.base, cur, state.log_k[l], s);
    if (std::log(rng.uniform()) < log_ratio) {
      state.atoms[l] = prop;
      state.log_k[l] = log_k_prop;
      ++mh.batch_accepts[l];
    }
  }
}

void step_concentration(BnpState& state, const BnpHyperparameters& hp,
                        Rng& rng) {
  double sum_log = 0.0;
  for (double u : state.sticks) sum_log += std::log1p(-u);
  state.conc_a = rng.gamma(hp.alpha_a + static_cast<double>(state.J() - 1),
                           hp.beta_a - sum_log);
}

bool step_xi_bnp(BnpState& state, const BnpHyperparameters& hp,
                 std::span<const double> z, BnpMhState& mh, Rng& rng) {
  if (!hp.weight(3.0).uses_xi()) return false;
  const int block = state.J();
  ++mh.batch_proposals[block];
  const double xi_prop = state.xi * std::exp(mh.sd(block) * rng.normal());
  const WeightFunction w_cur = hp.weight(state.xi);
  const WeightFunction w_prop = hp.weight(xi_prop);

  const auto counts = state.cluster_counts();
  std::vector<double> lk_prop(state.J());
  try {
    for (int l = 0; l < state.J(); ++l)
      lk_prop[l] = counts[l] > 0
                       ? log_normalizing_constant(w_prop, state.atoms[l])
                       : state.log_k[l];
  } catch (const std::runtime_error&) {
    return false;
  }

  auto log_target = [&](const WeightFunction& w, double xi,
                        const std::vector<double>& lk) {
    double lp = log_inverse_gamma_pdf(xi, hp.a_xi, hp.b_xi) + std::log(xi);
    for (std::size_t i = 0; i < z.size(); ++i)
      if (state.gamma[i] != 0) lp += log_eval_weight(w, z[i]);
    for (int l = 0; l < state.J(); ++l)
      lp -= static_cast<double>(counts[l]) * lk[l];
    return lp;
  };
  const double log_ratio = log_target(w_prop, xi_prop, lk_prop) -
                           log_target(w_cur, state.xi, state.log_k);
  if (std::log(rng.uniform()) < log_ratio) {
    state.xi = xi_prop;
    // Empty-cluster constants were computed at the old xi; refresh them too.
    for (int l = 0; l < state.J(); ++l)
      state.log_k[l] = counts[l] > 0
                           ? lk_prop[l]
                           : log_normalizing_constant(w_prop, state.atoms[l]);
    ++mh.batch_accepts[block];
    return true;
  }
  return false;
}

void step_rho_bnp(BnpState& state, const BnpHyperparameters& hp, Rng& rng) {
  const double n1 =
      static_cast<double>(std::count(state.lambda.begin(), state.lambda.end(), 1));
  const double n = static_cast<double>(state.lambda.size());
  state.rho = rng.beta(hp.a_rho + n1, hp.b_rho + n - n1);
}

void step_null_bnp(BnpState& state, const BnpHyperparameters& hp,
                   std::span<const double> z, Rng& rng) {
  const SuffStats s = stats_for(z, state.gamma, 0);
  const NigParams post = nig_posterior(hp.null_prior, s.n, s.mean, s.sq);
  state.null_c.sigma2 = rng.inverse_gamma(post.a, post.b);
  state.null_c.mu =
      rng.normal(post.m, std::sqrt(state.null_c.sigma2 / post.kappa));
}

void adapt_proposals_bnp(BnpMhState& mh) {
  const double delta =
      std::min(0.01, 1.0 / std::sqrt(static_cast<double>(std::max(mh.t, 1L))));
  for (std::size_t b = 0; b < mh.log_sd.size(); ++b) {
    if (mh.batch_proposals[b] == 0) continue;
    const double rate = static_cast<double>(mh.batch_accepts[b]) /
                        static_cast<double>(mh.batch_proposals[b]);
    mh.log_sd[b] += rate < 0.44 ? -delta : delta;
    mh.batch_accepts[b] = 0;
    mh.batch_proposals[b] = 0;
  }
}

BnpChainTrace run_chain_bnp(std::span<const double> z,
                            const BnpHyperparameters& hp,
                            const ChainControls& controls) {
  controls.validate();
  BnpState state = init_state_bnp(z, hp, controls.seed);
  Rng rng(controls.seed ^ 0x9e3779b97f4a7c15ULL);
  BnpMhState mh(hp.J);

  BnpChainTrace trace;
  trace.controls = controls;
  trace.lambda_sum.assign(z.size(), 0.0);

  for (long t = 1; t <= controls.iterations; ++t) {
    mh.t = t;
    step_null_bnp(state, hp, z, rng);
    step_labels_bnp(state, hp, z, rng);
    step_sticks(state, rng);
    step_atoms(state, hp, z, mh, rng);
    step_xi_bnp(state, hp, z, mh, rng);
    step_rho_bnp(state, hp, rng);
    step_concentration(state, hp, rng);
    if (t % mh.n_batch == 0) adapt_proposals_bnp(mh);

    if (t > controls.burn_in && (t - controls.burn_in) % controls.thin == 0) {
      trace.rho.push_back(state.rho);
      trace.mu0.push_back(state.null_c.mu);
      trace.sigma20.push_back(state.null_c.sigma2);
      trace.xi.push_back(state.xi);
      trace.conc_a.push_back(state.conc_a);
      trace.omega.push_back(state.omega);
      std::vector<double> mus(hp.J), s2s(hp.J);
      for (int l = 0; l < hp.J; ++l) {
        mus[l] = state.atoms[l].mu;
        s2s[l] = state.atoms[l].sigma2;
      }
      trace.atom_mu.push_back(std::move(mus));
      trace.atom_sigma2.push_back(std::move(s2s));
      trace.atom_log_k.push_back(state.log_k);
      for (std::size_t i = 0; i < z.size(); ++i)
        trace.lambda_sum[i] += state.lambda[i];
      ++trace.n_retained;
    }
  }
  return trace;
}

}  // namespace nollik
