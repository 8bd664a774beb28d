#include "nollik/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <thread>

namespace nollik {

std::string to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::S1: return "S1";
    case ScenarioId::S2: return "S2";
    case ScenarioId::S3: return "S3";
    case ScenarioId::S4: return "S4";
    case ScenarioId::R1: return "R1";
    case ScenarioId::R2: return "R2";
    case ScenarioId::R3: return "R3";
  }
  throw std::invalid_argument("unknown scenario id");
}

ScenarioId scenario_from_string(const std::string& name) {
  for (ScenarioId id : {ScenarioId::S1, ScenarioId::S2, ScenarioId::S3,
                        ScenarioId::S4, ScenarioId::R1, ScenarioId::R2,
                        ScenarioId::R3})
    if (to_string(id) == name) return id;
  throw std::invalid_argument("unknown scenario: " + name);
}

LabeledSample generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  LabeledSample sample;
  sample.z.reserve(spec.n);
  sample.truth.reserve(spec.n);

  // Central mixtures: weight/mean/variance triplets, null component first.
  auto three_part = [&](double s20, double mu_alt, double s2_alt) {
    for (std::size_t i = 0; i < spec.n; ++i) {
      const double u = rng.uniform();
      if (u < 0.9) {
        sample.z.push_back(rng.normal(0.0, std::sqrt(s20)));
        sample.truth.push_back(0);
      } else {
        const double mu = u < 0.95 ? mu_alt : -mu_alt;
        sample.z.push_back(rng.normal(mu, std::sqrt(s2_alt)));
        sample.truth.push_back(1);
      }
    }
  };

  switch (spec.id) {
    case ScenarioId::S1:
      three_part(1.5, 5.0, 1.0);
      break;
    case ScenarioId::S2:
      three_part(0.25, 3.0, 1.5);
      break;
    case ScenarioId::S3:
      for (std::size_t i = 0; i < spec.n; ++i) {
        const bool relevant = rng.uniform() >= 0.9;
        const double g = relevant ? rng.normal(-3.0, 1.0) : 0.0;
        sample.z.push_back(rng.normal(g, 1.0));
        sample.truth.push_back(relevant ? 1 : 0);
      }
      break;
    case ScenarioId::S4:
      for (std::size_t i = 0; i < spec.n; ++i) {
        const bool relevant = rng.uniform() >= 0.9;
        double g = 0.0;
        if (relevant) {
          const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
          g = side * (2.0 + 2.0 * rng.uniform());
        }
        sample.z.push_back(rng.normal(g, 1.0));
        sample.truth.push_back(relevant ? 1 : 0);
      }
      break;
    case ScenarioId::R1:
      three_part(1.0, 1.0, 1.0);
      break;
    case ScenarioId::R2:
      three_part(1.0, 2.0, 1.0);
      break;
    case ScenarioId::R3:
      three_part(1.0, 3.0, 1.0);
      break;
  }
  return sample;
}

void apply_rho_preset(Hyperparameters& hp, int preset) {
  switch (preset) {
    case 1: hp.a_rho = 1.0; hp.b_rho = 9.0; break;
    case 2: hp.a_rho = 1.0; hp.b_rho = 1.0; break;
    case 3: hp.a_rho = 9.0; hp.b_rho = 1.0; break;
    default:
      throw std::invalid_argument("apply_rho_preset: preset must be 1, 2 or 3");
  }
}

double z_to_pvalue(double z) {
  return 2.0 * normal_cdf(-std::fabs(z));
}

std::vector<char> bh_procedure(std::span<const double> p_values, double alpha) {
  const std::size_t m = p_values.size();
  for (double p : p_values)
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("bh_procedure: p-values must lie in [0,1]");
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return p_values[a] < p_values[b];
  });
  std::size_t cutoff = 0;  // number of rejections
  for (std::size_t r = 0; r < m; ++r)
    if (p_values[order[r]] <=
        alpha * static_cast<double>(r + 1) / static_cast<double>(m))
      cutoff = r + 1;
  std::vector<char> flags(m, 0);
  for (std::size_t r = 0; r < cutoff; ++r) flags[order[r]] = 1;
  return flags;
}

ConfusionMetrics confusion_metrics(std::span<const char> flags,
                                   std::span<const char> truth,
                                   std::span<const double> scores) {
  if (flags.size() != truth.size() ||
      (!scores.empty() && scores.size() != truth.size()))
    throw std::invalid_argument("confusion_metrics: length mismatch");
  double tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    const bool f = flags[i] != 0, t = truth[i] != 0;
    tp += f && t;
    tn += !f && !t;
    fp += f && !t;
    fn += !f && t;
  }
  const double n = tp + tn + fp + fn;

  ConfusionMetrics cm;
  cm.acc = n > 0 ? (tp + tn) / n : 0.0;
  if (tp + fn > 0) {
    cm.sen = tp / (tp + fn);
  } else {
    cm.sen = 1.0;  // no positives to find
    cm.fallback = true;
  }
  if (tn + fp > 0) {
    cm.spe = tn / (tn + fp);
  } else {
    cm.spe = 1.0;
    cm.fallback = true;
  }
  if (tp + fp > 0) {
    cm.pre = tp / (tp + fp);
  } else {
    cm.pre = tp + fn == 0 ? 1.0 : 0.0;  // nothing predicted positive
    cm.fallback = true;
  }
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom > 0.0) {
    cm.mcc = (tp * tn - fp * fn) / std::sqrt(denom);
  } else {
    cm.mcc = 0.0;
    cm.fallback = true;
  }
  if (cm.sen > 0.0 && cm.pre > 0.0) {
    cm.f1 = 2.0 / (1.0 / cm.sen + 1.0 / cm.pre);
  } else {
    cm.f1 = 0.0;
    cm.fallback = true;
  }

  if (!scores.empty()) {
    // Mann-Whitney rank statistic with average ranks for ties.
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return scores[a] < scores[b];
    });
    std::vector<double> rank(scores.size());
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      while (j + 1 < order.size() &&
             scores[order[j + 1]] == scores[order[i]])
        ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t r = i; r <= j; ++r) rank[order[r]] = avg;
      i = j + 1;
    }
    double rank_sum = 0.0, n_pos = 0.0;
    for (std::size_t r = 0; r < truth.size(); ++r)
      if (truth[r] != 0) {
        rank_sum += rank[r];
        n_pos += 1.0;
      }
    const double n_neg = static_cast<double>(truth.size()) - n_pos;
    if (n_pos > 0.0 && n_neg > 0.0) {
      cm.auc = (rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
    } else {
      cm.auc = 0.5;
      cm.fallback = true;
    }
  }
  return cm;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::NollikW0: return "nollik-w0";
    case Method::NollikW1: return "nollik-w1";
    case Method::NollikW2: return "nollik-w2";
    case Method::BnpW1: return "bnp-w1";
    case Method::Bh: return "bh";
  }
  throw std::invalid_argument("unknown method");
}

Method method_from_string(const std::string& name) {
  for (Method m : {Method::NollikW0, Method::NollikW1, Method::NollikW2,
                   Method::BnpW1, Method::Bh})
    if (to_string(m) == name) return m;
  throw std::invalid_argument("unknown method: " + name);
}

namespace {

void append_metrics(std::vector<BenchmarkRow>& rows, const std::string& scen,
                    const std::string& method, int rep,
                    const std::string& suffix, const ConfusionMetrics& cm) {
  auto add = [&](const std::string& name, double v) {
    rows.push_back({scen, method, rep, name + suffix, v});
  };
  add("acc", cm.acc);
  add("spe", cm.spe);
  add("sen", cm.sen);
  add("pre", cm.pre);
  add("mcc", cm.mcc);
  add("f1", cm.f1);
}

std::vector<BenchmarkRow> score_cell(ScenarioId scenario, Method method,
                                     int rep, const BenchmarkConfig& config,
                                     std::uint64_t cell_seed) {
  std::vector<BenchmarkRow> rows;
  const std::string scen = to_string(scenario);
  const std::string meth = to_string(method);
  ScenarioSpec spec{scenario, config.n, cell_seed};
  const LabeledSample sample = generate_scenario(spec);

  if (method == Method::Bh) {
    std::vector<double> p(sample.z.size());
    std::vector<double> score(sample.z.size());
    for (std::size_t i = 0; i < sample.z.size(); ++i) {
      p[i] = z_to_pvalue(sample.z[i]);
      score[i] = std::fabs(sample.z[i]);
    }
    const auto flags = bh_procedure(p, config.alpha);
    const auto cm = confusion_metrics(flags, sample.truth, score);
    append_metrics(rows, scen, meth, rep, "", cm);
    rows.push_back({scen, meth, rep, "auc", cm.auc});
    return rows;
  }

  ChainControls controls = config.controls;
  controls.seed = cell_seed + 1;
  DiscoveryReport report;
  if (method == Method::BnpW1) {
    BnpHyperparameters hp;
    auto trace = run_chain_bnp(sample.z, hp, controls);
    report = make_report(sample.z, trace, hp, config.alpha);
  } else {
    Hyperparameters hp;
    hp.weight_kind = method == Method::NollikW0   ? WeightKind::W0
                     : method == Method::NollikW2 ? WeightKind::W2
                                                  : WeightKind::W1;
    auto trace = run_chain(sample.z, hp, controls);
    report = make_report(sample.z, trace, hp, config.alpha);
  }

  const auto cm_bfdr =
      confusion_metrics(report.flags, sample.truth, report.p1);
  std::vector<char> lfdr_flags(report.lfdr.size());
  for (std::size_t i = 0; i < report.lfdr.size(); ++i)
    lfdr_flags[i] = report.lfdr[i] < 0.20 ? 1 : 0;
  const auto cm_lfdr = confusion_metrics(lfdr_flags, sample.truth, report.p1);
  append_metrics(rows, scen, meth, rep, "_bfdr05", cm_bfdr);
  append_metrics(rows, scen, meth, rep, "_lfdr20", cm_lfdr);
  rows.push_back({scen, meth, rep, "auc", cm_bfdr.auc});
  return rows;
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& config) {
  if (config.replications < 1)
    throw std::invalid_argument("run_benchmark: replications >= 1 required");
  config.controls.validate();

  struct Cell {
    ScenarioId scenario;
    Method method;
    int rep;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  std::uint64_t counter = 0;
  for (ScenarioId s : config.scenarios)
    for (int rep = 1; rep <= config.replications; ++rep) {
      // Same data per (scenario, replication) across methods.
      const std::uint64_t data_seed = config.seed + 7919 * (++counter);
      for (Method m : config.methods) cells.push_back({s, m, rep, data_seed});
    }

  std::vector<std::vector<BenchmarkRow>> results(cells.size());
  const int n_threads =
      std::max(1, std::min<int>(config.threads, static_cast<int>(cells.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      const Cell& c = cells[idx];
      try {
        results[idx] = score_cell(c.scenario, c.method, c.rep, config, c.seed);
      } catch (const std::exception&) {
        results[idx] = {{to_string(c.scenario), to_string(c.method), c.rep,
                         "error", 1.0}};
      }
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<BenchmarkRow> table;
  for (auto& rows : results)
    table.insert(table.end(), rows.begin(), rows.end());
  return table;
}

}  // namespace nollik
