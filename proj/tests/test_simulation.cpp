#include "doctest.h"
#include "nollik/simulation.hpp"
#include "oracles.hpp"

#include <map>
#include <set>

using namespace nollik;

TEST_CASE("scenario generation: proportions, determinism, S4 support") {
  for (ScenarioId id : {ScenarioId::S1, ScenarioId::S2, ScenarioId::S3,
                        ScenarioId::S4, ScenarioId::R2}) {
    ScenarioSpec spec{id, 100000, 5};
    auto sample = generate_scenario(spec);
    REQUIRE(sample.z.size() == sample.truth.size());
    double frac = 0.0;
    for (char t : sample.truth) frac += t;
    frac /= static_cast<double>(sample.z.size());
    const double se = std::sqrt(0.1 * 0.9 / 100000.0);
    CHECK(std::fabs(frac - 0.1) < 3.0 * se);
  }
  auto a = generate_scenario({ScenarioId::S3, 1000, 42});
  auto b = generate_scenario({ScenarioId::S3, 1000, 42});
  CHECK(a.z == b.z);
  CHECK(a.truth == b.truth);

  // S4 relevant means live on +-[2,4]; with unit noise relevant draws stay
  // within [-4-5, -2+5] U [2-5, 4+5] and split evenly by sign of the mean.
  ScenarioSpec s4{ScenarioId::S4, 200000, 9};
  auto s = generate_scenario(s4);
  std::size_t pos = 0, rel = 0;
  for (std::size_t i = 0; i < s.z.size(); ++i)
    if (s.truth[i]) {
      ++rel;
      if (s.z[i] > 0.0) ++pos;
      CHECK(std::fabs(s.z[i]) < 9.0);
    }
  const double side = static_cast<double>(pos) / static_cast<double>(rel);
  CHECK(std::fabs(side - 0.5) < 3.0 * std::sqrt(0.25 / rel) + 0.01);
}

TEST_CASE("scenario moments follow the variance convention") {
  // S1 null component is N(0, 1.5): the sd of null draws is sqrt(1.5),
  // not 1.5.
  auto s = generate_scenario({ScenarioId::S1, 200000, 13});
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.z.size(); ++i)
    if (!s.truth[i]) {
      sum += s.z[i];
      sq += s.z[i] * s.z[i];
      ++n;
    }
  const double var = sq / n - (sum / n) * (sum / n);
  CHECK(var == doctest::Approx(1.5).epsilon(0.02));

  auto s2 = generate_scenario({ScenarioId::S2, 200000, 13});
  sum = sq = 0.0;
  n = 0;
  for (std::size_t i = 0; i < s2.z.size(); ++i)
    if (!s2.truth[i]) {
      sum += s2.z[i];
      sq += s2.z[i] * s2.z[i];
      ++n;
    }
  CHECK(sq / n - (sum / n) * (sum / n) == doctest::Approx(0.25).epsilon(0.02));
}

TEST_CASE("rho presets") {
  Hyperparameters hp;
  apply_rho_preset(hp, 3);
  CHECK(hp.a_rho == 9.0);
  CHECK(hp.b_rho == 1.0);
  apply_rho_preset(hp, 1);
  CHECK(hp.b_rho == 9.0);
  CHECK_THROWS(apply_rho_preset(hp, 4));
}

TEST_CASE("bh_procedure step-up") {
  std::vector<double> p = {0.01, 0.02, 0.04, 0.8};
  auto flags = bh_procedure(p, 0.05);
  CHECK(flags == std::vector<char>{1, 1, 0, 0});

  std::vector<double> ones(6, 1.0);
  auto none = bh_procedure(ones, 0.05);
  CHECK(std::count(none.begin(), none.end(), 1) == 0);

  std::vector<double> zeros(6, 0.0);
  auto all = bh_procedure(zeros, 0.05);
  CHECK(std::count(all.begin(), all.end(), 1) == 6);

  CHECK_THROWS(bh_procedure(std::vector<double>{-0.1}, 0.05));

  // Monotone in alpha: flags at smaller alpha are a subset.
  Rng rng(3);
  std::vector<double> random_p(200);
  for (auto& v : random_p) v = rng.uniform();
  auto f1 = bh_procedure(random_p, 0.02);
  auto f2 = bh_procedure(random_p, 0.10);
  for (std::size_t i = 0; i < random_p.size(); ++i)
    if (f1[i]) CHECK(f2[i]);
}

TEST_CASE("confusion_metrics formulas and fallbacks") {
  // Perfect classifier.
  std::vector<char> t = {1, 1, 0, 0};
  auto perfect = confusion_metrics(t, t);
  CHECK(perfect.acc == 1.0);
  CHECK(perfect.sen == 1.0);
  CHECK(perfect.spe == 1.0);
  CHECK(perfect.pre == 1.0);
  CHECK(perfect.f1 == 1.0);
  CHECK(perfect.mcc == doctest::Approx(1.0));

  // Hand case: TP=8, TN=85, FP=5, FN=2.
  std::vector<char> truth, flags;
  auto push = [&](int count, char f, char tr) {
    for (int i = 0; i < count; ++i) {
      flags.push_back(f);
      truth.push_back(tr);
    }
  };
  push(8, 1, 1);
  push(85, 0, 0);
  push(5, 1, 0);
  push(2, 0, 1);
  auto cm = confusion_metrics(flags, truth);
  CHECK(cm.mcc ==
        doctest::Approx((8.0 * 85 - 5.0 * 2) /
                        std::sqrt(13.0 * 10.0 * 90.0 * 87.0))
            .epsilon(1e-10));
  CHECK(cm.acc == doctest::Approx(93.0 / 100.0));
  CHECK(cm.f1 == doctest::Approx(2.0 / (10.0 / 8.0 + 13.0 / 8.0)));

  // Scores sorted by truth give AUC 1.
  std::vector<double> scores = {0.9, 0.8, 0.2, 0.1};
  auto ranked = confusion_metrics(t, t, scores);
  CHECK(ranked.auc == doctest::Approx(1.0));

  // No predicted positives: precision fallback.
  std::vector<char> never(4, 0);
  auto none = confusion_metrics(never, t);
  CHECK(none.pre == 0.0);
  CHECK(none.fallback);
  std::vector<char> no_truth(4, 0);
  auto vacuous = confusion_metrics(never, no_truth);
  CHECK(vacuous.pre == 1.0);

  // Random flags are uncorrelated with truth.
  Rng rng(7);
  std::vector<char> rf(100000), rt(100000);
  for (std::size_t i = 0; i < rf.size(); ++i) {
    rf[i] = rng.uniform() < 0.3;
    rt[i] = rng.uniform() < 0.1;
  }
  CHECK(std::fabs(confusion_metrics(rf, rt).mcc) < 0.02);
}

TEST_CASE("rank AUC equals trapezoid ROC on tie-free scores") {
  Rng rng(11);
  std::vector<char> truth(400);
  std::vector<double> scores(400);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    truth[i] = rng.uniform() < 0.25;
    scores[i] = truth[i] ? rng.normal(1.0, 1.0) : rng.normal(0.0, 1.0);
  }
  const auto cm = confusion_metrics(truth, truth, scores);

  // Trapezoid ROC sweep over all thresholds.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  double n_pos = 0, n_neg = 0;
  for (char v : truth) (v ? n_pos : n_neg) += 1.0;
  double tp = 0, fp = 0, auc = 0, prev_fpr = 0, prev_tpr = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    (truth[order[r]] ? tp : fp) += 1.0;
    const double tpr = tp / n_pos, fpr = fp / n_neg;
    auc += 0.5 * (tpr + prev_tpr) * (fpr - prev_fpr);
    prev_tpr = tpr;
    prev_fpr = fpr;
  }
  CHECK(cm.auc == doctest::Approx(auc).epsilon(1e-10));
}

TEST_CASE("run_benchmark: smoke, determinism, error rows") {
  BenchmarkConfig config;
  config.scenarios = {ScenarioId::S1};
  config.methods = {Method::Bh};
  config.replications = 2;
  config.n = 2000;
  config.seed = 5;
  auto table = run_benchmark(config);
  // 6 metrics + auc per replication.
  CHECK(table.size() == 14);
  std::set<std::string> metrics;
  for (const auto& row : table) {
    CHECK(row.scenario == "S1");
    CHECK(row.method == "bh");
    metrics.insert(row.metric);
  }
  CHECK(metrics.count("auc") == 1);
  CHECK(metrics.count("mcc") == 1);

  auto again = run_benchmark(config);
  REQUIRE(again.size() == table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    CHECK(again[i].metric == table[i].metric);
    CHECK(again[i].value == table[i].value);
  }
}

TEST_CASE("run_benchmark: model cell produces both thresholding columns") {
  BenchmarkConfig config;
  config.scenarios = {ScenarioId::S1};
  config.methods = {Method::NollikW1, Method::Bh};
  config.replications = 1;
  config.n = 300;
  config.seed = 21;
  config.controls.iterations = 1200;
  config.controls.burn_in = 400;
  config.controls.thin = 4;
  config.threads = 2;
  auto table = run_benchmark(config);
  std::map<std::string, int> by_metric;
  for (const auto& row : table)
    if (row.method == "nollik-w1") ++by_metric[row.metric];
  CHECK(by_metric.count("mcc_bfdr05") == 1);
  CHECK(by_metric.count("mcc_lfdr20") == 1);
  CHECK(by_metric.count("auc") == 1);
  CHECK(by_metric.count("error") == 0);
}
