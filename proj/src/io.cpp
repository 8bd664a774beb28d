#include "nollik/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

namespace nollik {

namespace {

using nlohmann::json;

double parse_double(const std::string& cell, std::size_t row,
                    const std::string& column) {
  double v = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw std::runtime_error("row " + std::to_string(row) + ", column '" +
                             column + "': not a finite number: '" + cell + "'");
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // Trim surrounding whitespace.
    const auto a = cell.find_first_not_of(" \t\r");
    const auto b = cell.find_last_not_of(" \t\r");
    cells.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

}  // namespace

std::vector<double> t_to_z(std::span<const double> t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("t_to_z: df must be > 0");
  std::vector<double> z(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    require_finite(t[i], "t statistic");
    z[i] = normal_quantile(student_t_cdf(t[i], df));
  }
  return z;
}

std::vector<std::vector<double>> Dataset::by_group() const {
  if (group.empty()) return {z};
  std::vector<std::string> labels;
  std::vector<std::vector<double>> groups;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const auto it = std::find(labels.begin(), labels.end(), group[i]);
    std::size_t idx;
    if (it == labels.end()) {
      labels.push_back(group[i]);
      groups.emplace_back();
      idx = labels.size() - 1;
    } else {
      idx = static_cast<std::size_t>(it - labels.begin());
    }
    groups[idx].push_back(z[i]);
  }
  return groups;
}

Dataset load_dataset(const std::string& path,
                     std::optional<double> df_override) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty dataset file: " + path);

  const auto header = split_csv_line(line);
  int col_stat = -1, col_group = -1, col_df = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name == "statistic" || name == "z" || name == "t")
      col_stat = static_cast<int>(c);
    else if (name == "group")
      col_group = static_cast<int>(c);
    else if (name == "df")
      col_df = static_cast<int>(c);
    else
      throw std::runtime_error("unknown column '" + name + "' in " + path);
  }
  if (col_stat < 0)
    throw std::runtime_error(
        "dataset needs a 'statistic' (or 'z'/'t') column: " + path);

  Dataset ds;
  std::vector<std::string> errors;
  std::size_t row = 1;
  std::vector<double> raw, dfs;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    try {
      if (cells.size() != header.size())
        throw std::runtime_error("row " + std::to_string(row) + ": expected " +
                                 std::to_string(header.size()) +
                                 " cells, found " +
                                 std::to_string(cells.size()));
      raw.push_back(parse_double(cells[col_stat], row, header[col_stat]));
      if (col_group >= 0) {
        if (cells[col_group].empty())
          throw std::runtime_error("row " + std::to_string(row) +
                                   ": empty group label");
        ds.group.push_back(cells[col_group]);
      }
      if (col_df >= 0) dfs.push_back(parse_double(cells[col_df], row, "df"));
    } catch (const std::exception& e) {
      errors.push_back(e.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = "dataset " + path + " has " +
                      std::to_string(errors.size()) + " bad row(s):";
    for (const auto& e : errors) msg += "\n  " + e;
    throw std::runtime_error(msg);
  }
  if (raw.empty()) throw std::runtime_error("no data rows in " + path);

  if (df_override) {
    ds.z = t_to_z(raw, *df_override);
    ds.source_kind = "t(" + format_double(*df_override) + ")";
  } else if (col_df >= 0) {
    ds.z.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (!(dfs[i] > 0.0))
        throw std::runtime_error("row " + std::to_string(i + 2) +
                                 ": df must be > 0");
      ds.z[i] = t_to_z(std::span<const double>(&raw[i], 1), dfs[i])[0];
    }
    ds.source_kind = "t(df)";
  } else {
    ds.z = std::move(raw);
  }
  return ds;
}

void RunConfig::validate() const {
  if (model != "parametric" && model != "bnp" && model != "grouped")
    throw std::invalid_argument("RunConfig: model must be parametric, bnp or "
                                "grouped");
  hp.validate();
  bnp.validate();
  if (model == "bnp") bnp.check_truncation();
  controls.validate();
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("RunConfig: alpha must be in (0,1)");
  if (grid_points < 2)
    throw std::invalid_argument("RunConfig: grid_points must be >= 2");
}

namespace {

WeightKind weight_kind_from_string(const std::string& name) {
  if (name == "w0") return WeightKind::W0;
  if (name == "w1") return WeightKind::W1;
  if (name == "w2") return WeightKind::W2;
  if (name == "indicator") return WeightKind::Indicator;
  throw std::invalid_argument("unknown weight kind: " + name);
}

std::string weight_kind_to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::W0: return "w0";
    case WeightKind::W1: return "w1";
    case WeightKind::W2: return "w2";
    case WeightKind::Indicator: return "indicator";
  }
  throw std::invalid_argument("unknown weight kind");
}

void apply_config_json(RunConfig& config, const json& j) {
  static const std::vector<std::string> known = {
      "model", "weight", "k", "delta", "alpha", "iterations", "burn_in",
      "thin", "seed", "grid_points", "out", "df", "bnp_weighted_density",
      "J", "a_rho", "b_rho", "a_alpha", "b_alpha", "m0", "kappa0", "a0",
      "b0", "m1", "m2", "kappa1", "kappa2", "a1", "a2", "b1", "b2", "a_xi",
      "b_xi", "alpha_a", "beta_a", "base_m", "base_kappa", "base_a",
      "base_b"};
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::invalid_argument("unknown config key: " + key);
  }
  auto get = [&](const char* key, auto& target) {
    if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
  };
  get("model", config.model);
  if (j.contains("weight")) {
    const auto kind = weight_kind_from_string(j.at("weight").get<std::string>());
    config.hp.weight_kind = kind;
    config.bnp.weight_kind = kind;
  }
  if (j.contains("k")) {
    config.hp.k = j.at("k").get<int>();
    config.bnp.k = config.hp.k;
  }
  if (j.contains("delta")) {
    config.hp.delta = j.at("delta").get<double>();
    config.bnp.delta = config.hp.delta;
  }
  get("alpha", config.alpha);
  get("iterations", config.controls.iterations);
  get("burn_in", config.controls.burn_in);
  get("thin", config.controls.thin);
  get("seed", config.controls.seed);
  get("grid_points", config.grid_points);
  get("out", config.out_dir);
  if (j.contains("df")) config.df = j.at("df").get<double>();
  get("bnp_weighted_density", config.bnp_weighted_density);
  get("J", config.bnp.J);
  get("a_rho", config.hp.a_rho);
  get("b_rho", config.hp.b_rho);
  config.bnp.a_rho = config.hp.a_rho;
  config.bnp.b_rho = config.hp.b_rho;
  get("a_alpha", config.hp.a_alpha);
  get("b_alpha", config.hp.b_alpha);
  get("m0", config.hp.null_prior.m);
  get("kappa0", config.hp.null_prior.kappa);
  get("a0", config.hp.null_prior.a);
  get("b0", config.hp.null_prior.b);
  config.bnp.null_prior = config.hp.null_prior;
  get("m1", config.hp.alt_prior1.m);
  get("m2", config.hp.alt_prior2.m);
  get("kappa1", config.hp.alt_prior1.kappa);
  get("kappa2", config.hp.alt_prior2.kappa);
  get("a1", config.hp.alt_prior1.a);
  get("a2", config.hp.alt_prior2.a);
  get("b1", config.hp.alt_prior1.b);
  get("b2", config.hp.alt_prior2.b);
  get("a_xi", config.hp.a_xi);
  get("b_xi", config.hp.b_xi);
  config.bnp.a_xi = config.hp.a_xi;
  config.bnp.b_xi = config.hp.b_xi;
  get("alpha_a", config.bnp.alpha_a);
  get("beta_a", config.bnp.beta_a);
  get("base_m", config.bnp.base.m);
  get("base_kappa", config.bnp.base.kappa);
  get("base_a", config.bnp.base.a);
  get("base_b", config.bnp.base.b);
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  json j;
  in >> j;
  RunConfig config;
  apply_config_json(config, j);
  return config;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_report_csv(const std::string& path, const DiscoveryReport& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "z,p1,lfdr,flag\n";
  for (std::size_t i = 0; i < report.z.size(); ++i)
    out << format_double(report.z[i]) << ',' << format_double(report.p1[i])
        << ',' << format_double(report.lfdr[i]) << ','
        << int(report.flags[i]) << '\n';
}

DiscoveryReport read_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line != "z,p1,lfdr,flag")
    throw std::runtime_error("unexpected report header in " + path);
  DiscoveryReport report;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 4)
      throw std::runtime_error("bad report row " + std::to_string(row));
    report.z.push_back(parse_double(cells[0], row, "z"));
    report.p1.push_back(parse_double(cells[1], row, "p1"));
    report.lfdr.push_back(parse_double(cells[2], row, "lfdr"));
    report.flags.push_back(cells[3] == "1" ? 1 : 0);
  }
  return report;
}

void write_trace_csv(const std::string& path, const ChainTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "rho,alpha,mu0,sigma20,mu1,sigma21,mu2,sigma22,xi\n";
  for (std::size_t t = 0; t < trace.size(); ++t)
    out << format_double(trace.rho[t]) << ',' << format_double(trace.alpha[t])
        << ',' << format_double(trace.mu0[t]) << ','
        << format_double(trace.sigma20[t]) << ','
        << format_double(trace.mu1[t]) << ','
        << format_double(trace.sigma21[t]) << ','
        << format_double(trace.mu2[t]) << ','
        << format_double(trace.sigma22[t]) << ','
        << format_double(trace.xi[t]) << '\n';
}

ChainTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line != "rho,alpha,mu0,sigma20,mu1,sigma21,mu2,sigma22,xi")
    throw std::runtime_error("unexpected trace header in " + path);
  ChainTrace trace;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 9)
      throw std::runtime_error("bad trace row " + std::to_string(row));
    trace.rho.push_back(parse_double(cells[0], row, "rho"));
    trace.alpha.push_back(parse_double(cells[1], row, "alpha"));
    trace.mu0.push_back(parse_double(cells[2], row, "mu0"));
    trace.sigma20.push_back(parse_double(cells[3], row, "sigma20"));
    trace.mu1.push_back(parse_double(cells[4], row, "mu1"));
    trace.sigma21.push_back(parse_double(cells[5], row, "sigma21"));
    trace.mu2.push_back(parse_double(cells[6], row, "mu2"));
    trace.sigma22.push_back(parse_double(cells[7], row, "sigma22"));
    trace.xi.push_back(parse_double(cells[8], row, "xi"));
  }
  trace.n_retained = static_cast<long>(trace.rho.size());
  return trace;
}

void write_densities_csv(const std::string& path, const DensityGrid& dg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "grid,f0,f1,f\n";
  for (std::size_t g = 0; g < dg.grid.size(); ++g)
    out << format_double(dg.grid[g]) << ',' << format_double(dg.f0_hat[g])
        << ',' << format_double(dg.f1_hat[g]) << ','
        << format_double(dg.f_hat[g]) << '\n';
}

void write_benchmark_csv(const std::string& path,
                         const std::vector<BenchmarkRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "scenario,method,replication,metric,value\n";
  for (const auto& r : rows)
    out << r.scenario << ',' << r.method << ',' << r.replication << ','
        << r.metric << ',' << format_double(r.value) << '\n';
}

namespace {

// Tracks files written by a command so failures leave no partial outputs.
class OutputGuard {
 public:
  ~OutputGuard() {
    if (!armed_) return;
    for (const auto& p : files_) {
      std::error_code ec;
      std::filesystem::remove(p, ec);
    }
  }
  std::string track(const std::string& path) {
    files_.push_back(path);
    return path;
  }
  void commit() { armed_ = false; }

 private:
  std::vector<std::string> files_;
  bool armed_ = true;
};

double mean_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double sd_of(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

// Effective sample size via batch means: T * var(batch means over batches)
// relative to the sample variance.
double ess_batch_means(std::span<const double> x) {
  const std::size_t T = x.size();
  if (T < 16) return static_cast<double>(T);
  const std::size_t n_batches =
      std::max<std::size_t>(8, static_cast<std::size_t>(std::sqrt(double(T))));
  const std::size_t len = T / n_batches;
  std::vector<double> means;
  means.reserve(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b) {
    double s = 0.0;
    for (std::size_t i = b * len; i < (b + 1) * len; ++i) s += x[i];
    means.push_back(s / static_cast<double>(len));
  }
  const double var = sd_of(x) * sd_of(x);
  const double bm_var = sd_of(means) * sd_of(means);
  if (!(bm_var > 0.0)) return static_cast<double>(T);
  return std::min(static_cast<double>(T),
                  static_cast<double>(T) * var /
                      (static_cast<double>(len) * bm_var));
}

json summary_stats(const std::string& name, std::span<const double> x) {
  return json{{"name", name},
              {"mean", mean_of(x)},
              {"sd", sd_of(x)}};
}

json report_summary(const DiscoveryReport& report) {
  std::size_t n_flagged = 0;
  for (char f : report.flags) n_flagged += f != 0;
  json j;
  j["nu_hat"] = report.nu_hat;
  j["bfdr_at_nu"] = report.bfdr_at_nu;
  j["alpha"] = report.alpha;
  j["n_flagged"] = n_flagged;
  j["region"] = {{"lower", report.region.lower},
                 {"upper", report.region.upper}};
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

int cmd_fit(const RunConfig& config, const std::string& data_path,
            bool diagnose_only) {
  config.validate();
  const Dataset ds = load_dataset(data_path, config.df);
  std::filesystem::create_directories(config.out_dir);
  const auto out = [&](const std::string& name) {
    return (std::filesystem::path(config.out_dir) / name).string();
  };
  OutputGuard guard;

  json summary;
  summary["model"] = config.model;
  summary["weight"] = weight_kind_to_string(config.hp.weight_kind);
  summary["seed"] = config.controls.seed;
  summary["iterations"] = config.controls.iterations;
  summary["burn_in"] = config.controls.burn_in;
  summary["thin"] = config.controls.thin;
  summary["n_observations"] = ds.z.size();
  summary["source_kind"] = ds.source_kind;

  if (config.model == "grouped" || ds.grouped()) {
    const auto groups = ds.by_group();
    const auto fit = fit_grouped(groups, config.hp, config.controls,
                                 config.alpha);
    json group_summaries = json::array();
    for (std::size_t g = 0; g < fit.reports.size(); ++g) {
      const std::string tag = "group" + std::to_string(g + 1);
      write_report_csv(guard.track(out("report_" + tag + ".csv")),
                       fit.reports[g]);
      write_trace_csv(guard.track(out("trace_" + tag + ".csv")),
                      fit.traces[g]);
      const auto grid = default_grid(groups[g], config.grid_points);
      write_densities_csv(guard.track(out("densities_" + tag + ".csv")),
                          estimate_density_grid(fit.traces[g], config.hp,
                                                grid));
      json gs = report_summary(fit.reports[g]);
      gs["group"] = tag;
      gs["posterior"] = {summary_stats("xi", fit.traces[g].xi),
                         summary_stats("alpha", fit.traces[g].alpha)};
      group_summaries.push_back(gs);
    }
    summary["groups"] = group_summaries;
    summary["posterior_rho"] = summary_stats("rho", fit.rho);
    write_json(guard.track(out("summary.json")), summary);
    guard.commit();
    return 0;
  }

  if (config.model == "bnp") {
    const auto trace = run_chain_bnp(ds.z, config.bnp, config.controls);
    const auto report =
        make_report(ds.z, trace, config.bnp, config.alpha,
                    config.bnp_weighted_density);
    const auto grid = default_grid(ds.z, config.grid_points);
    write_report_csv(guard.track(out("report.csv")), report);
    write_densities_csv(
        guard.track(out("densities.csv")),
        estimate_density_grid(trace, config.bnp, grid,
                              config.bnp_weighted_density));
    // BNP trace: scalar columns only; atom/stick columns in a wide CSV.
    {
      std::ofstream tr(guard.track(out("trace.csv")));
      tr << "rho,mu0,sigma20,xi,conc_a";
      for (int l = 1; l <= config.bnp.J; ++l)
        tr << ",omega" << l << ",mu" << l << ",sigma2" << l;
      tr << '\n';
      for (std::size_t t = 0; t < trace.size(); ++t) {
        tr << format_double(trace.rho[t]) << ','
           << format_double(trace.mu0[t]) << ','
           << format_double(trace.sigma20[t]) << ','
           << format_double(trace.xi[t]) << ','
           << format_double(trace.conc_a[t]);
        for (int l = 0; l < config.bnp.J; ++l)
          tr << ',' << format_double(trace.omega[t][l]) << ','
             << format_double(trace.atom_mu[t][l]) << ','
             << format_double(trace.atom_sigma2[t][l]);
        tr << '\n';
      }
    }
    summary.update(report_summary(report));
    summary["posterior"] = {summary_stats("rho", trace.rho),
                            summary_stats("xi", trace.xi),
                            summary_stats("conc_a", trace.conc_a)};
    write_json(guard.track(out("summary.json")), summary);
    guard.commit();
    return 0;
  }

  const auto trace = run_chain(ds.z, config.hp, config.controls);
  if (diagnose_only) {
    json diag;
    diag["accept_rate_block1"] = trace.accept_rate[0];
    diag["accept_rate_block2"] = trace.accept_rate[1];
    diag["accept_rate_xi"] = trace.accept_rate[2];
    diag["retained"] = trace.n_retained;
    json chains = json::array();
    const std::pair<const char*, const std::vector<double>*> cols[] = {
        {"rho", &trace.rho},   {"alpha", &trace.alpha}, {"mu0", &trace.mu0},
        {"mu1", &trace.mu1},   {"mu2", &trace.mu2},     {"xi", &trace.xi}};
    for (const auto& [name, col] : cols) {
      json c = summary_stats(name, *col);
      c["ess"] = ess_batch_means(*col);
      // Ergodic-mean stability: first vs second half.
      const std::size_t half = col->size() / 2;
      c["first_half_mean"] =
          mean_of(std::span<const double>(col->data(), half));
      c["second_half_mean"] = mean_of(
          std::span<const double>(col->data() + half, col->size() - half));
      chains.push_back(c);
    }
    diag["chains"] = chains;
    write_json(guard.track(out("diagnostics.json")), diag);
    guard.commit();
    return 0;
  }
  const auto report = make_report(ds.z, trace, config.hp, config.alpha);
  const auto grid = default_grid(ds.z, config.grid_points);
  write_report_csv(guard.track(out("report.csv")), report);
  write_trace_csv(guard.track(out("trace.csv")), trace);
  write_densities_csv(guard.track(out("densities.csv")),
                      estimate_density_grid(trace, config.hp, grid));
  summary.update(report_summary(report));
  summary["posterior"] = {summary_stats("rho", trace.rho),
                          summary_stats("alpha", trace.alpha),
                          summary_stats("mu1", trace.mu1),
                          summary_stats("mu2", trace.mu2),
                          summary_stats("xi", trace.xi)};
  summary["accept_rates"] = {trace.accept_rate[0], trace.accept_rate[1],
                             trace.accept_rate[2]};
  write_json(guard.track(out("summary.json")), summary);
  guard.commit();
  return 0;
}

int cmd_theory(const RunConfig& config, double rho, double xi,
               const std::string& alt_spec) {
  // alt_spec: "p:mu:sigma2;p:mu:sigma2;..."
  MixtureDensity alt;
  std::stringstream ss(alt_spec);
  std::string part;
  while (std::getline(ss, part, ';')) {
    double p, mu, s2;
    if (std::sscanf(part.c_str(), "%lf:%lf:%lf", &p, &mu, &s2) != 3)
      throw std::invalid_argument("bad alternative component: " + part);
    alt.weights.push_back(p);
    alt.components.push_back({mu, s2});
  }
  TwoGroupSpec spec;
  spec.rho = rho;
  spec.alt_local = alt;
  spec.weight = config.hp.weight(xi);
  TheoryOracle oracle(spec);

  std::filesystem::create_directories(config.out_dir);
  OutputGuard guard;
  const auto path =
      (std::filesystem::path(config.out_dir) / "theory.csv").string();
  {
    std::ofstream out(guard.track(path));
    out << "lower,upper,d_fdr,d_for,d_beta,auc_local,auc_weighted\n";
    for (int i = 1; i <= 16; ++i) {
      const double c = 0.25 * i;
      const AcceptanceRegion region{-c, c};
      const auto d = oracle.delta_metrics(region);
      const auto local = oracle.characteristics(region, false);
      const auto weighted = oracle.characteristics(region, true);
      out << format_double(-c) << ',' << format_double(c) << ','
          << format_double(d.d_fdr) << ',' << format_double(d.d_for) << ','
          << format_double(d.d_beta) << ',' << format_double(local.auc)
          << ',' << format_double(weighted.auc) << '\n';
    }
  }
  const auto cp = oracle.critical_points();
  json j;
  j["z_star"] = cp.z_star;
  j["z_hat"] = cp.z_hat;
  j["plateau"] = cp.plateau;
  j["k_tilde"] = oracle.total_normconst();
  write_json(guard.track((std::filesystem::path(config.out_dir) /
                          "theory_summary.json")
                             .string()),
             j);
  guard.commit();
  return 0;
}

int cmd_threshold(const std::string& p1_path, double alpha,
                  const std::string& out_dir) {
  std::ifstream in(p1_path);
  if (!in) throw std::runtime_error("cannot open " + p1_path);
  std::string line;
  std::getline(in, line);
  const auto header = split_csv_line(line);
  int col = -1;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == "p1") col = static_cast<int>(c);
  if (col < 0) throw std::runtime_error("no p1 column in " + p1_path);
  std::vector<double> p1;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    p1.push_back(parse_double(cells[col], row, "p1"));
  }
  const auto thr = bfdr_threshold(p1, alpha);
  std::filesystem::create_directories(out_dir);
  OutputGuard guard;
  json j;
  j["alpha"] = alpha;
  j["nu_hat"] = thr.nu_hat;
  j["bfdr_at_nu"] = thr.bfdr_at_nu;
  write_json(
      guard.track((std::filesystem::path(out_dir) / "threshold.json").string()),
      j);
  guard.commit();
  std::printf("nu_hat=%s bfdr=%s\n", format_double(thr.nu_hat).c_str(),
              format_double(thr.bfdr_at_nu).c_str());
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Non-local two-group multiple testing"};
  app.require_subcommand(1);

  std::string config_path, data_path, out_dir, weight_name, p1_path;
  std::string alt_spec = "0.5:-3:1;0.5:3:1";
  std::vector<std::string> scenario_names = {"S1"};
  std::vector<std::string> method_names = {"bh"};
  std::string model;
  double alpha = -1.0, xi = 3.0, delta = -1.0, rho = 0.1, df = -1.0;
  long iters = -1, burnin = -1, thin = -1;
  int k = -1, reps = 1, threads = 1;
  long long seed = -1;
  std::size_t n = 1000;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--model", model, "parametric | bnp | grouped");
    cmd->add_option("--weight", weight_name, "w0 | w1 | w2 | indicator");
    cmd->add_option("--xi", xi, "weight scale (theory) / indicator ignored");
    cmd->add_option("--k", k, "weight power");
    cmd->add_option("--delta", delta, "indicator half-width");
    cmd->add_option("--alpha", alpha, "BFDR control level");
    cmd->add_option("--iters", iters, "MCMC iterations");
    cmd->add_option("--burnin", burnin, "burn-in iterations");
    cmd->add_option("--thin", thin, "thinning stride");
    cmd->add_option("--seed", seed, "RNG seed");
    cmd->add_option("--out", out_dir, "output directory");
  };

  auto* fit = app.add_subcommand("fit", "fit a model and write reports");
  fit->add_option("--data", data_path, "input CSV")->required();
  fit->add_option("--df", df, "treat statistics as t with this df");
  add_common(fit);

  auto* diagnose = app.add_subcommand("diagnose", "chain diagnostics");
  diagnose->add_option("--data", data_path, "input CSV")->required();
  add_common(diagnose);

  auto* simulate = app.add_subcommand("simulate", "benchmark scenarios");
  simulate->add_option("--scenario", scenario_names, "S1..S4, R1..R3");
  simulate->add_option("--method", method_names,
                       "nollik-w0|nollik-w1|nollik-w2|bnp-w1|bh");
  simulate->add_option("--reps", reps, "replications");
  simulate->add_option("--n", n, "observations per dataset");
  simulate->add_option("--threads", threads, "worker threads");
  add_common(simulate);

  auto* theory = app.add_subcommand("theory", "delta metrics for a spec");
  theory->add_option("--rho", rho, "relevant proportion");
  theory->add_option("--alt", alt_spec, "p:mu:sigma2;... mixture spec");
  add_common(theory);

  auto* threshold =
      app.add_subcommand("threshold", "recompute BFDR threshold");
  threshold->add_option("--p1", p1_path, "CSV with a p1 column")->required();
  add_common(threshold);

  try {
    app.parse(argc, argv);

    RunConfig config;
    if (!config_path.empty()) config = load_config(config_path);
    if (!model.empty()) config.model = model;
    if (!weight_name.empty()) {
      config.hp.weight_kind = weight_kind_from_string(weight_name);
      config.bnp.weight_kind = config.hp.weight_kind;
    }
    if (k > 0) {
      config.hp.k = k;
      config.bnp.k = k;
    }
    if (delta >= 0.0) {
      config.hp.delta = delta;
      config.bnp.delta = delta;
    }
    if (alpha > 0.0) config.alpha = alpha;
    if (iters > 0) config.controls.iterations = iters;
    if (burnin >= 0) config.controls.burn_in = burnin;
    if (thin > 0) config.controls.thin = thin;
    if (seed >= 0) config.controls.seed = static_cast<std::uint64_t>(seed);
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (df > 0.0) config.df = df;

    if (fit->parsed()) return cmd_fit(config, data_path, false);
    if (diagnose->parsed()) return cmd_fit(config, data_path, true);
    if (theory->parsed()) return cmd_theory(config, rho, xi, alt_spec);
    if (threshold->parsed())
      return cmd_threshold(p1_path, config.alpha, config.out_dir);
    if (simulate->parsed()) {
      BenchmarkConfig bench;
      for (const auto& s : scenario_names)
        bench.scenarios.push_back(scenario_from_string(s));
      for (const auto& m : method_names)
        bench.methods.push_back(method_from_string(m));
      bench.replications = reps;
      bench.n = n;
      bench.seed = config.controls.seed;
      bench.controls = config.controls;
      bench.alpha = config.alpha;
      bench.threads = threads;
      const auto table = run_benchmark(bench);
      std::filesystem::create_directories(config.out_dir);
      write_benchmark_csv(
          (std::filesystem::path(config.out_dir) / "benchmark.csv").string(),
          table);
      return 0;
    }
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace nollik
