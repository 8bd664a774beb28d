#pragma once

// Synthetic scenarios, the robustness presets, classification metrics, the
// Benjamini-Hochberg baseline, and the benchmark driver.

#include <string>

#include "nollik/inference.hpp"

namespace nollik {

enum class ScenarioId { S1, S2, S3, S4, R1, R2, R3 };

std::string to_string(ScenarioId id);
ScenarioId scenario_from_string(const std::string& name);

struct ScenarioSpec {
  ScenarioId id = ScenarioId::S1;
  std::size_t n = 1000;
  std::uint64_t seed = 1;

  void validate() const {
    if (n < 1) throw std::invalid_argument("ScenarioSpec: n must be >= 1");
  }
};

struct LabeledSample {
  std::vector<double> z;
  std::vector<char> truth;  // 1 = relevant
};

LabeledSample generate_scenario(const ScenarioSpec& spec);

// Prior-misspecification presets on the Beta prior of rho.
// 1: Beta(1,9), 2: Beta(1,1), 3: Beta(9,1).
void apply_rho_preset(Hyperparameters& hp, int preset);

// Two-sided p-value against the theoretical N(0,1) null.
double z_to_pvalue(double z);

// Benjamini-Hochberg step-up at level alpha.
std::vector<char> bh_procedure(std::span<const double> p_values, double alpha);

struct ConfusionMetrics {
  double acc = 0.0, spe = 0.0, sen = 0.0, pre = 0.0;
  double auc = 0.5;
  double mcc = 0.0, f1 = 0.0;
  bool fallback = false;  // some cell used a zero-division fallback
};

ConfusionMetrics confusion_metrics(std::span<const char> flags,
                                   std::span<const char> truth,
                                   std::span<const double> scores = {});

enum class Method { NollikW0, NollikW1, NollikW2, BnpW1, Bh };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct BenchmarkRow {
  std::string scenario;
  std::string method;
  int replication = 0;
  std::string metric;
  double value = 0.0;
};

struct BenchmarkConfig {
  std::vector<ScenarioId> scenarios;
  std::vector<Method> methods;
  int replications = 1;
  std::size_t n = 1000;
  std::uint64_t seed = 1;
  ChainControls controls;  // shared MCMC controls for model methods
  double alpha = 0.05;
  int threads = 1;
};

// Long-format results table. Nollik/BNP methods report every metric under
// both thresholding conventions (suffixes _bfdr05 and _lfdr20) plus a single
// auc; BH reports unsuffixed metrics at level alpha. Failed cells yield a
// single "error" row instead of metrics.
std::vector<BenchmarkRow> run_benchmark(const BenchmarkConfig& config);

}  // namespace nollik
