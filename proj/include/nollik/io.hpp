#pragma once

// Data ingestion (CSV, t-to-z transform), run configuration, serialization
// of reports / traces / density grids / benchmark tables, and the CLI
// entry point.

#include <optional>
#include <string>

#include "nollik/simulation.hpp"

namespace nollik {

// z_i = Phi^{-1}(F_t(t_i; df))
std::vector<double> t_to_z(std::span<const double> t, double df);

struct Dataset {
  std::vector<double> z;
  std::vector<std::string> group;  // empty when ungrouped
  std::string source_kind = "z";   // "z" or "t(df)"

  bool grouped() const { return !group.empty(); }
  std::vector<std::vector<double>> by_group() const;
};

// Headered CSV with columns (statistic [, group] [, df]). A df column (or
// the override) switches on the t-to-z transform. Malformed rows raise with
// the row and column named.
Dataset load_dataset(const std::string& path,
                     std::optional<double> df_override = std::nullopt);

struct RunConfig {
  std::string model = "parametric";  // parametric | bnp | grouped
  Hyperparameters hp;
  BnpHyperparameters bnp;
  ChainControls controls;
  double alpha = 0.05;
  int grid_points = 512;
  bool bnp_weighted_density = true;
  std::optional<double> df;  // t-to-z transform
  std::string out_dir = ".";

  void validate() const;
};

// Plain-text JSON configuration; unknown keys are rejected.
RunConfig load_config(const std::string& path);

// 17 significant digits: round-trips doubles exactly through text.
std::string format_double(double v);

void write_report_csv(const std::string& path, const DiscoveryReport& report);
DiscoveryReport read_report_csv(const std::string& path);

void write_trace_csv(const std::string& path, const ChainTrace& trace);
ChainTrace read_trace_csv(const std::string& path);

void write_densities_csv(const std::string& path, const DensityGrid& dg);

void write_benchmark_csv(const std::string& path,
                         const std::vector<BenchmarkRow>& rows);

int run_cli(int argc, const char* const* argv);

}  // namespace nollik
