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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "arbound/armodel.hpp"
#include "arbound/errors.hpp"
#include "arbound/mixing.hpp"
#include "arbound/parallel.hpp"
#include "arbound/riskbound.hpp"
#include "arbound/rng.hpp"
#include "arbound/stability.hpp"
#include "arbound/timeseries.hpp"

namespace arbound {

struct SimSpec {
  CoefVector phi;
  double sigma = 1.0;
  std::size_t n = 0;
  std::size_t burn_in = 0;  // 0 -> default_burn_in(order)
  std::uint64_t seed = 0;
  bool stationary_start = false;  // draw x_0 from the exact law (order 1 only)
};

inline std::size_t default_burn_in(int p) { return 100 * static_cast<std::size_t>(p); }

/// Stationary Gaussian AR path of length n after discarding the burn-in.
/// Deterministic for a given seed.
inline GrowthSeries simulate(const SimSpec& spec) {
  const int p = spec.phi.order();
  if (p < 1) throw ConfigError("simulate: order must be >= 1");
  if (!(spec.sigma > 0.0)) throw ConfigError("simulate: sigma must be > 0");
  if (spec.n < 1) throw ConfigError("simulate: n must be >= 1");
  if (!is_stationary(spec.phi))
    throw ConfigError("simulate: coefficients are not stationary");
  if (spec.stationary_start && p != 1)
    throw ConfigError("simulate: stationary start is only available for order 1");
  const std::size_t burn =
      spec.burn_in > 0 ? spec.burn_in
                       : (spec.stationary_start ? 0 : default_burn_in(p));
  Engine eng = make_engine(splitmix64(spec.seed));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(spec.n + burn + p, 0.0);
  if (spec.stationary_start) {
    const double phi1 = spec.phi.phi[0];
    x[0] = gauss(eng) * spec.sigma / std::sqrt(1.0 - phi1 * phi1);
  }
  for (std::size_t t = p; t < x.size(); ++t) {
    double v = spec.sigma * gauss(eng);
    for (int i = 0; i < p; ++i) v += spec.phi.phi[i] * x[t - 1 - i];
    x[t] = v;
  }
  GrowthSeries out;
  out.values.assign(x.begin() + p + burn, x.end());
  out.provenance = "simulated AR(" + std::to_string(p) + "), seed " +
                   std::to_string(spec.seed);
  return out;
}

struct CoverageResult {
  std::size_t replicates = 0;
  std::size_t violations = 0;  // held-out truncated risk exceeded the bound
  std::size_t skipped = 0;     // replicates without a feasible plan
  double violation_rate = 0.0;
  double eta = 0.0;
  double mean_bound = 0.0;
  double mean_holdout_risk = 0.0;
};

struct CoverageOptions {
  std::vector<int> lags = {4, 8, 12, 16, 20, 24, 28, 32};
  MixingOptions mixing;
  double margin = 1e-3;
  IndexCount index_count = IndexCount::mu;
  unsigned threads = 1;
};

/// Empirical check of the bound's coverage claim. The mixing profile is
/// built once from the true coefficients (surrogate = truth, removing
/// estimation confounds) and the block length is the smallest feasible lag,
/// both fixed before any replicate data is seen. Each replicate simulates
/// train + holdout as one path, fits on the train segment, and counts a
/// violation when the mean truncated one-step loss on the holdout exceeds
/// the bound.
inline CoverageResult coverage_experiment(const SimSpec& spec, int p_fit, double M,
                                          double eta, std::size_t replicates,
                                          std::size_t holdout,
                                          const CoverageOptions& opt = {}) {
  if (replicates < 1) throw ConfigError("coverage_experiment: replicates must be >= 1");
  if (holdout < 100) throw ConfigError("coverage_experiment: holdout must be >= 100");
  if (p_fit < 1) throw ConfigError("coverage_experiment: p_fit must be >= 1");

  GaussianARSurrogate truth{spec.phi, spec.sigma};
  MixingOptions mix = opt.mixing;
  mix.seed = substream_seed(spec.seed, 0x0CAAULL);
  const MixingProfile profile = mixing_profile(truth, opt.lags, mix);
  const auto choices = plan_blocks(spec.n, eta, profile);
  const BlockChoice* chosen = nullptr;
  for (const auto& c : choices)
    if (c.feasible) {  // smallest feasible lag = largest effective mu
      chosen = &c;
      break;
    }
  const StabilityPolytope poly = p_fit > 1 ? hull_vertices(p_fit) : StabilityPolytope{};

  CoverageResult res;
  res.replicates = replicates;
  res.eta = eta;
  if (chosen == nullptr) {
    res.skipped = replicates;
    return res;
  }

  std::vector<int> flags(replicates, 0);
  std::vector<double> bounds(replicates, 0.0), risks(replicates, 0.0);
  parallel_for(replicates, opt.threads, [&](std::size_t r) {
    SimSpec rep = spec;
    rep.n = spec.n + holdout;
    rep.seed = substream_seed(spec.seed, 0x5EED, r);
    const GrowthSeries path = simulate(rep);
    GrowthSeries train;
    train.values.assign(path.values.begin(), path.values.begin() + spec.n);
    train.provenance = path.provenance;

    const FittedAR fit = fit_stationary(train, p_fit, M, opt.margin);
    const Design d = build_design(train, p_fit);
    const BlockPlan plan =
        block_indices(spec.n, p_fit, chosen->m, chosen->mu, opt.index_count);
    const RiskBoundReport report =
        p_fit == 1 ? bound_ar1(fit, d, plan, M, eta, chosen->beta_m)
                   : bound_arp(fit, d, plan, poly, M, eta, chosen->beta_m);

    double loss = 0.0;
    for (std::size_t t = spec.n; t < path.values.size(); ++t) {
      const std::span<const double> history(path.values.data(), t);
      const double e = path.values[t] - predict(fit, history);
      loss += std::min(e * e, M);
    }
    loss /= static_cast<double>(holdout);

    bounds[r] = report.bound_total;
    risks[r] = loss;
    flags[r] = loss > report.bound_total ? 1 : 0;
  });

  for (int f : flags) res.violations += static_cast<std::size_t>(f);
  res.violation_rate =
      static_cast<double>(res.violations) / static_cast<double>(replicates);
  res.mean_bound = pairwise_sum(bounds) / static_cast<double>(replicates);
  res.mean_holdout_risk = pairwise_sum(risks) / static_cast<double>(replicates);
  return res;
}

}  // namespace arbound
