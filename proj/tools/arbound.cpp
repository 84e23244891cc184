// Copyright 2026 The Arbound Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command line driver: ingest a series, plan blocks from a fitted mixing
// surrogate, bound every order and select by the smallest bound.
//
//   arbound simulate --phi 0.6 --n 4000 --seed 1 --out series.csv
//   arbound select --input series.csv --p-max 20 --out-dir results/
//   arbound coverage --phi 0.5,-0.3 --n 2048 --replicates 200 --out cov.json

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "arbound/arbound.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace arbound;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& body) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
    out << body;
    if (!out) throw IoError("failed writing '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("failed renaming '" + tmp.string() + "' to '" + path.string() + "'");
}

json decisions_block(IndexCount index_count) {
  json d;
  d["block_index_formula"] =
      "anchor k at floor(m/2) + 2*m*k over 0-based design rows; anchors past "
      "the last row dropped and counted";
  d["index_count"] = index_count == IndexCount::mu ? "mu" : "mu-plus-1";
  d["block_scale"] = "complexity and its Monte Carlo oracle are normalized by "
                     "1/mu over the anchor set";
  d["missing_values"] = "dropped; surviving observations concatenated across gaps";
  d["nonstationary_fits"] = "radial shrinkage toward the origin, bisection to 1e-10";
  d["aic"] = "n_eff*ln(RSS/n_eff) + 2*(p+1) on rows aligned across orders "
             "(n_eff = n - p_max)";
  d["ar1_bound"] = "closed-form complexity term; the general vertex form at "
                   "p = 1 is recorded as general_form_complexity";
  d["process_lag"] = "beta at process separation m is the companion-state "
                     "chain coefficient at lag m + q - 1";
  d["surrogate_fit"] = "least squares of order q with coefficients below the "
                       "t threshold set to zero, then a stationarity check";
  d["plan_rule"] = "single (m, mu) shared by all orders, minimizing the "
                   "order-averaged bound among feasible lags";
  return d;
}

struct SelectArgs {
  std::string input;
  std::string value_column = "value";
  std::vector<std::string> missing_tokens = {"", "."};
  int p_max = 50;
  double cap = 0.05;
  double eta = 0.05;
  int surrogate_order = 20;
  double surrogate_tstat = 3.0;
  int m_min = 1;
  int m_max = 14;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  bool center = false;
  std::string index_count = "mu";
  unsigned threads = 1;
  double margin = 1e-3;
  int quad_points = 128;
  std::size_t mixing_outer = 128;
  std::size_t mixing_inner = 20000;
};

int run_select(const SelectArgs& a) {
  if (a.m_min < 1 || a.m_max < a.m_min)
    throw ConfigError("select: need 1 <= m-min <= m-max");
  const IndexCount index_count =
      a.index_count == "mu" ? IndexCount::mu : IndexCount::mu_plus_one;

  const RawSeries raw =
      load_csv(a.input, a.value_column,
               std::set<std::string>(a.missing_tokens.begin(), a.missing_tokens.end()));
  GrowthSeries series = log_growth(raw);
  double centered_mean = 0.0;
  if (a.center) {
    const SeriesSummary pre = summary(series);
    centered_mean = pre.mean;
    for (double& v : series.values) v -= centered_mean;
  }
  const SeriesSummary stats = summary(series);

  // Mixing surrogate: a high-order stationary fit with Gaussian innovations
  // and insignificant coefficients suppressed.
  const GaussianARSurrogate surrogate =
      fit_surrogate(series, a.surrogate_order, a.surrogate_tstat, a.margin);

  std::vector<int> lags;
  for (int m = a.m_min; m <= a.m_max; ++m) lags.push_back(m);
  MixingOptions mix;
  mix.quad_points = a.quad_points;
  mix.state_samples = a.mixing_outer;
  mix.tv_samples = a.mixing_inner;
  mix.seed = substream_seed(a.seed, 0x313);
  mix.threads = a.threads;
  const MixingProfile profile = mixing_profile(surrogate, lags, mix);

  SrmOptions opt;
  opt.margin = a.margin;
  opt.index_count = index_count;
  opt.threads = a.threads;
  const SelectionResult sel = srm_select(series, a.p_max, a.cap, a.eta, profile, opt);

  // Loss-cap sensitivity of the selected order's bound.
  json cap_sense = json::array();
  for (double cap : {0.03, 0.05, 0.10}) {
    const int p = sel.srm_choice;
    const FittedAR f = fit_stationary(series, p, cap, a.margin);
    const Design d = build_design(series, p);
    const BlockPlan plan =
        block_indices(series.n(), p, sel.plan.m, sel.plan.mu, index_count);
    const RiskBoundReport r =
        p == 1 ? bound_ar1(f, d, plan, cap, a.eta, sel.plan.beta_m)
               : bound_arp(f, d, plan, hull_vertices(p), cap, a.eta, sel.plan.beta_m);
    cap_sense.push_back({{"M", cap}, {"bound_total", r.bound_total}});
  }

  // Surrogate-order sensitivity of beta at the chosen block length.
  json q_sense = json::array();
  for (int q : {5, 10, 20}) {
    try {
      double b;
      if (q == surrogate.phi.order()) {
        b = profile.betas.at(sel.plan.m);
      } else {
        const GaussianARSurrogate qs =
            fit_surrogate(series, q, a.surrogate_tstat, a.margin);
        const MixingProfile qp = mixing_profile(qs, {sel.plan.m}, mix);
        b = qp.betas.at(sel.plan.m);
      }
      q_sense.push_back({{"q", q}, {"beta_at_chosen_m", b}});
    } catch (const std::exception& e) {
      q_sense.push_back({{"q", q}, {"error", e.what()}});
    }
  }

  json report;
  report["schema_version"] = 1;
  report["command"] = "select";
  report["seed"] = a.seed;
  report["config"] = {{"input", a.input},
                      {"value_column", a.value_column},
                      {"missing_tokens", a.missing_tokens},
                      {"p_max", a.p_max},
                      {"M", a.cap},
                      {"eta", a.eta},
                      {"surrogate_order", a.surrogate_order},
                      {"surrogate_tstat", a.surrogate_tstat},
                      {"m_min", a.m_min},
                      {"m_max", a.m_max},
                      {"center", a.center},
                      {"centered_mean", centered_mean},
                      {"index_count", a.index_count},
                      {"stationarity_margin", a.margin},
                      {"quad_points", a.quad_points},
                      {"mixing_outer", a.mixing_outer},
                      {"mixing_inner", a.mixing_inner}};
  report["decisions"] = decisions_block(index_count);
  report["data"] = {{"n", stats.n},
                    {"mean", stats.mean},
                    {"variance", stats.variance},
                    {"min", stats.min},
                    {"max", stats.max},
                    {"max_squared_value", stats.max_squared_value},
                    {"provenance", series.provenance}};
  int kept = 0;
  for (double c : surrogate.phi.phi)
    if (c != 0.0) ++kept;
  report["surrogate"] = {{"order", a.surrogate_order},
                         {"tstat", a.surrogate_tstat},
                         {"kept_coefficients", kept},
                         {"sigma", surrogate.sigma},
                         {"phi", surrogate.phi.phi}};
  json betas = json::array();
  for (const auto& [m, b] : profile.betas)
    betas.push_back({{"m", m}, {"beta", b}, {"raw_beta", profile.raw_betas.at(m)}});
  report["mixing"] = {{"method", profile.method == MixingMethod::quadrature
                                     ? "quadrature"
                                     : "monte_carlo"},
                      {"betas", betas}};
  json candidates = json::array();
  for (const auto& c : sel.candidates)
    candidates.push_back({{"m", c.m},
                          {"mu", c.mu},
                          {"beta_m", c.beta_m},
                          {"eta_prime", c.eta_prime},
                          {"feasible", c.feasible},
                          {"leftover_points", c.leftover}});
  report["plan_candidates"] = candidates;
  report["plan"] = {{"m", sel.plan.m},
                    {"mu", sel.plan.mu},
                    {"beta_m", sel.plan.beta_m},
                    {"eta_prime", sel.plan.eta_prime},
                    {"leftover_points", sel.plan.leftover}};
  json per_order = json::array();
  for (const auto& r : sel.per_order) {
    json row = {{"p", r.p},
                {"train_error", r.train_error},
                {"complexity_term", r.complexity_term},
                {"confidence_term", r.confidence_term},
                {"bound_total", r.bound_total},
                {"eta_prime", r.eta_prime},
                {"projection_engaged", r.projection_engaged},
                {"dropped_indices", r.dropped_indices}};
    if (r.general_form_complexity)
      row["general_form_complexity"] = *r.general_form_complexity;
    if (!r.notes.empty()) row["notes"] = r.notes;
    per_order.push_back(row);
  }
  report["per_order"] = per_order;
  json aics = json::array();
  for (const auto& [p, v] : sel.aic_per_order) aics.push_back({{"p", p}, {"aic", v}});
  report["aic_per_order"] = aics;
  report["srm_choice"] = sel.srm_choice;
  report["aic_choice"] = sel.aic_choice;
  report["sensitivity"] = {{"loss_cap", cap_sense}, {"surrogate_order", q_sense}};
  report["notes"] = sel.notes;

  const std::filesystem::path dir(a.out_dir);
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "report.json", report.dump(2) + "\n");

  std::string bounds = "p,train_error,complexity_term,confidence_term,bound_total\n";
  for (const auto& r : sel.per_order)
    bounds += std::to_string(r.p) + "," + fmt(r.train_error) + "," +
              fmt(r.complexity_term) + "," + fmt(r.confidence_term) + "," +
              fmt(r.bound_total) + "\n";
  write_file_atomic(dir / "bounds.csv", bounds);

  double aic_min = sel.aic_per_order.front().second;
  for (const auto& [p, v] : sel.aic_per_order) aic_min = std::min(aic_min, v);
  std::string aics_csv = "p,aic_gap\n";
  for (const auto& [p, v] : sel.aic_per_order)
    aics_csv += std::to_string(p) + "," + fmt(v - aic_min) + "\n";
  write_file_atomic(dir / "aic.csv", aics_csv);

  std::string growth = "t,date,growth\n";
  {
    std::vector<const RawObservation*> present;
    for (const auto& o : raw.observations)
      if (o.value) present.push_back(&o);
    for (std::size_t t = 0; t < series.n(); ++t) {
      const std::string date = t + 1 < present.size() ? present[t + 1]->date : "";
      growth += std::to_string(t) + "," + date + "," + fmt(series.values[t]) + "\n";
    }
  }
  write_file_atomic(dir / "growth.csv", growth);

  std::cout << "n = " << stats.n << ", plan (m = " << sel.plan.m
            << ", mu = " << sel.plan.mu << ", eta' = " << sel.plan.eta_prime
            << ")\n"
            << "srm choice: AR(" << sel.srm_choice
            << "), bound = " << sel.per_order[sel.srm_choice - 1].bound_total
            << "\naic choice: AR(" << sel.aic_choice << ")\n"
            << "report written to " << (dir / "report.json").string() << "\n";
  return kExitOk;
}

struct SimulateArgs {
  std::vector<double> phi = {0.5};
  double sigma = 0.01;
  std::size_t n = 4000;
  std::size_t burn_in = 0;
  std::uint64_t seed = 1;
  std::string out = "series.csv";
  double start_level = 100.0;
  std::string start_date = "2000-01-01";
  bool stationary_start = false;
};

int run_simulate(const SimulateArgs& a) {
  SimSpec spec;
  spec.phi = CoefVector{a.phi};
  spec.sigma = a.sigma;
  spec.n = a.n;
  spec.burn_in = a.burn_in;
  spec.seed = a.seed;
  spec.stationary_start = a.stationary_start;
  const GrowthSeries g = simulate(spec);

  int y, mo, d;
  if (!detail::parse_iso_date(a.start_date, y, mo, d))
    throw ConfigError("simulate: bad --start-date '" + a.start_date + "'");
  const std::int64_t day0 = detail::days_from_civil(y, mo, d);

  // Levels start*exp(cumsum) so that the ingest transform recovers the
  // simulated growth path.
  std::string body = "date,value\n";
  double cum = 0.0;
  body += detail::civil_from_days(day0) + "," + fmt(a.start_level) + "\n";
  for (std::size_t t = 0; t < g.n(); ++t) {
    cum += g.values[t];
    if (std::abs(cum) > 600.0)
      throw ConfigError(
          "simulate: cumulative growth overflows the level representation; "
          "use a smaller --sigma or shorter --n");
    body += detail::civil_from_days(day0 + static_cast<std::int64_t>(t) + 1) + "," +
            fmt(a.start_level * std::exp(cum)) + "\n";
  }
  write_file_atomic(a.out, body);
  std::cout << "wrote " << g.n() + 1 << " rows to " << a.out << "\n";
  return kExitOk;
}

struct CoverageArgs {
  std::vector<double> phi = {0.5, -0.3};
  double sigma = 1.0;
  std::size_t n = 2048;
  std::size_t holdout = 512;
  int p_fit = 2;
  double cap = 10.0;
  double eta = 0.05;
  std::size_t replicates = 200;
  std::uint64_t seed = 1;
  int m_min = 4;
  int m_max = 32;
  unsigned threads = 1;
  std::size_t mixing_outer = 96;
  std::size_t mixing_inner = 8192;
  std::string out = "coverage.json";
};

int run_coverage(const CoverageArgs& a) {
  if (a.m_min < 1 || a.m_max < a.m_min)
    throw ConfigError("coverage: need 1 <= m-min <= m-max");
  SimSpec spec;
  spec.phi = CoefVector{a.phi};
  spec.sigma = a.sigma;
  spec.n = a.n;
  spec.seed = a.seed;
  CoverageOptions opt;
  opt.lags.clear();
  for (int m = a.m_min; m <= a.m_max; m += 4) opt.lags.push_back(m);
  opt.mixing.state_samples = a.mixing_outer;
  opt.mixing.tv_samples = a.mixing_inner;
  opt.threads = a.threads;
  const CoverageResult res =
      coverage_experiment(spec, a.p_fit, a.cap, a.eta, a.replicates, a.holdout, opt);

  json out;
  out["schema_version"] = 1;
  out["command"] = "coverage";
  out["seed"] = a.seed;
  out["config"] = {{"phi", a.phi},       {"sigma", a.sigma},
                   {"n", a.n},           {"holdout", a.holdout},
                   {"p_fit", a.p_fit},   {"M", a.cap},
                   {"eta", a.eta},       {"replicates", a.replicates},
                   {"m_min", a.m_min},   {"m_max", a.m_max},
                   {"threads", a.threads}};
  out["result"] = {{"replicates", res.replicates},
                   {"violations", res.violations},
                   {"skipped_infeasible", res.skipped},
                   {"violation_rate", res.violation_rate},
                   {"mean_bound", res.mean_bound},
                   {"mean_holdout_risk", res.mean_holdout_risk}};
  write_file_atomic(a.out, out.dump(2) + "\n");
  std::cout << "violations " << res.violations << "/" << res.replicates
            << " (rate " << res.violation_rate << ", eta " << a.eta << ")\n"
            << "written to " << a.out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stationary autoregression with finite-sample risk bounds"};
  app.require_subcommand(1);

  SelectArgs sel;
  auto* cmd_select = app.add_subcommand(
      "select", "fit orders 1..p_max and select by the risk bound");
  cmd_select->add_option("--input", sel.input, "input CSV (date column first)")
      ->required();
  cmd_select->add_option("--value-column", sel.value_column, "value column name");
  cmd_select->add_option("--missing-token", sel.missing_tokens,
                         "tokens treated as missing");
  cmd_select->add_option("--p-max", sel.p_max, "largest order to consider");
  cmd_select->add_option("--cap", sel.cap, "loss truncation level M");
  cmd_select->add_option("--eta", sel.eta, "confidence level");
  cmd_select->add_option("--surrogate-order", sel.surrogate_order,
                         "mixing surrogate order q");
  cmd_select->add_option("--surrogate-tstat", sel.surrogate_tstat,
                         "zero surrogate coefficients below this |t| (0 keeps all)");
  cmd_select->add_option("--m-min", sel.m_min, "smallest block length");
  cmd_select->add_option("--m-max", sel.m_max, "largest block length");
  cmd_select->add_option("--seed", sel.seed, "master seed");
  cmd_select->add_option("--out-dir", sel.out_dir, "output directory");
  cmd_select->add_flag("--center", sel.center, "subtract the sample mean");
  cmd_select->add_option("--index-count", sel.index_count, "anchor count")
      ->check(CLI::IsMember({"mu", "mu-plus-1"}));
  cmd_select->add_option("--threads", sel.threads, "worker threads");
  cmd_select->add_option("--margin", sel.margin, "stationarity margin");
  cmd_select->add_option("--quad-points", sel.quad_points,
                         "Gauss-Hermite nodes (order-1 surrogate)");
  cmd_select->add_option("--mixing-outer", sel.mixing_outer,
                         "outer state samples for beta");
  cmd_select->add_option("--mixing-inner", sel.mixing_inner,
                         "inner TV samples for beta");

  SimulateArgs sim;
  auto* cmd_simulate =
      app.add_subcommand("simulate", "write a synthetic level series as CSV");
  cmd_simulate->add_option("--phi", sim.phi, "AR coefficients")->delimiter(',');
  cmd_simulate->add_option("--sigma", sim.sigma, "innovation sd of the growth path");
  cmd_simulate->add_option("--n", sim.n, "number of growth observations");
  cmd_simulate->add_option("--burn-in", sim.burn_in, "burn-in (0 = 100*p)");
  cmd_simulate->add_option("--seed", sim.seed, "seed");
  cmd_simulate->add_option("--out", sim.out, "output CSV path");
  cmd_simulate->add_option("--start-level", sim.start_level, "initial level");
  cmd_simulate->add_option("--start-date", sim.start_date, "initial ISO date");
  cmd_simulate->add_flag("--stationary-start", sim.stationary_start,
                         "exact stationary initialization (order 1)");

  CoverageArgs cov;
  auto* cmd_coverage = app.add_subcommand(
      "coverage", "empirical coverage of the bound on simulated data");
  cmd_coverage->add_option("--phi", cov.phi, "true AR coefficients")->delimiter(',');
  cmd_coverage->add_option("--sigma", cov.sigma, "innovation sd");
  cmd_coverage->add_option("--n", cov.n, "training length");
  cmd_coverage->add_option("--holdout", cov.holdout, "holdout length");
  cmd_coverage->add_option("--p-fit", cov.p_fit, "order to fit");
  cmd_coverage->add_option("--cap", cov.cap, "loss truncation level M");
  cmd_coverage->add_option("--eta", cov.eta, "confidence level");
  cmd_coverage->add_option("--replicates", cov.replicates, "replicates");
  cmd_coverage->add_option("--seed", cov.seed, "master seed");
  cmd_coverage->add_option("--m-min", cov.m_min, "smallest block length");
  cmd_coverage->add_option("--m-max", cov.m_max, "largest block length");
  cmd_coverage->add_option("--threads", cov.threads, "worker threads");
  cmd_coverage->add_option("--mixing-outer", cov.mixing_outer, "outer beta samples");
  cmd_coverage->add_option("--mixing-inner", cov.mixing_inner, "inner TV samples");
  cmd_coverage->add_option("--out", cov.out, "output JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (cmd_select->parsed()) return run_select(sel);
    if (cmd_simulate->parsed()) return run_simulate(sim);
    if (cmd_coverage->parsed()) return run_coverage(cov);
  } catch (const InfeasiblePlanError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
