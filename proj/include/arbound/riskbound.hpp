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

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "arbound/armodel.hpp"
#include "arbound/complexity.hpp"
#include "arbound/errors.hpp"
#include "arbound/mixing.hpp"
#include "arbound/parallel.hpp"
#include "arbound/stability.hpp"
#include "arbound/timeseries.hpp"

namespace arbound {

/// Deviation paid for working at confidence eta' on mu effective blocks:
///   3 M sqrt( ln(4 / eta') / (2 mu) ).
inline double confidence_term(double M, std::size_t mu, double eta_prime) {
  if (!(M > 0.0)) throw ConfigError("confidence_term: loss cap M must be > 0");
  if (mu < 1) throw ConfigError("confidence_term: mu must be >= 1");
  if (!(eta_prime > 0.0 && eta_prime < 1.0))
    throw InfeasiblePlanError(
        "confidence_term: adjusted level eta' = " + std::to_string(eta_prime) +
        " is not in (0, 1); the block plan is infeasible");
  return 3.0 * M * std::sqrt(std::log(4.0 / eta_prime) / (2.0 * static_cast<double>(mu)));
}

/// High-probability generalization bound for one fitted order, split into
/// its three nonnegative parts. bound_total is their exact sum.
struct RiskBoundReport {
  int p = 0;
  double train_error = 0.0;
  double complexity_term = 0.0;
  double confidence_term = 0.0;
  double bound_total = 0.0;
  double M = 0.0;
  double eta = 0.0;
  double eta_prime = 0.0;
  double beta_m = 0.0;
  int m = 0;
  std::size_t mu = 0;
  bool projection_engaged = false;
  std::size_t dropped_indices = 0;
  // For p = 1 only: the general vertex-comparison constant evaluated at
  // p = 1, recorded alongside the sharper closed form actually used.
  std::optional<double> general_form_complexity;
  std::vector<std::string> notes;
};

namespace detail {

inline RiskBoundReport assemble_report(const FittedAR& fit, const BlockPlan& plan,
                                       double complexity, double M, double eta,
                                       double beta_m) {
  const double eta_prime =
      eta - 4.0 * static_cast<double>(plan.mu - 1) * beta_m;
  RiskBoundReport r;
  r.p = fit.p;
  r.train_error = fit.train_error;
  r.complexity_term = complexity;
  r.confidence_term = arbound::confidence_term(M, plan.mu, eta_prime);
  r.bound_total = r.train_error + r.complexity_term + r.confidence_term;
  r.M = M;
  r.eta = eta;
  r.eta_prime = eta_prime;
  r.beta_m = beta_m;
  r.m = plan.m;
  r.mu = plan.mu;
  r.projection_engaged = !fit.stationary_before_projection;
  r.dropped_indices = plan.dropped;
  if (r.projection_engaged)
    r.notes.push_back("ols estimate was non-stationary; radial projection applied");
  if (r.dropped_indices > 0)
    r.notes.push_back(std::to_string(r.dropped_indices) +
                      " block anchor(s) beyond the last design row were dropped");
  return r;
}

}  // namespace detail

/// Bound for p >= 2: train error plus the vertex-comparison complexity term
///   (4 sqrt(pi M log(p+1)) / mu) *
///       max_{j != j'} ( sum_{i in I} <X_i, v_j - v_j'>^2 )^(1/2)
/// plus the confidence term. The loss-Lipschitz factor and the Gaussian
/// comparison constant are already folded into 4 sqrt(pi M log(p+1)).
inline RiskBoundReport bound_arp(const FittedAR& fit, const Design& d,
                                 const BlockPlan& plan,
                                 const StabilityPolytope& poly, double M,
                                 double eta, double beta_m) {
  if (fit.p < 2) throw ConfigError("bound_arp: use bound_ar1 for order 1");
  if (fit.p != d.p || poly.p != d.p)
    throw ConfigError("bound_arp: order mismatch between fit, design, polytope");
  if (!(M > 0.0)) throw ConfigError("bound_arp: loss cap M must be > 0");
  const Eigen::MatrixXd U = detail::anchor_projections(d, plan, poly);
  const double max_pair = detail::max_pair_square_sum(U);
  const double complexity =
      4.0 * std::sqrt(std::numbers::pi * M * std::log(static_cast<double>(d.p + 1))) /
      static_cast<double>(plan.mu) * std::sqrt(max_pair);
  return detail::assemble_report(fit, plan, complexity, M, eta, beta_m);
}

/// Bound for p = 1, using the closed-form complexity term
///   (4 / mu) sqrt(M / 2) ( sum_{i in I} X_i^2 )^(1/2).
/// The general-form constant at p = 1 is recorded for comparison.
inline RiskBoundReport bound_ar1(const FittedAR& fit, const Design& d,
                                 const BlockPlan& plan, double M, double eta,
                                 double beta_m) {
  if (fit.p != 1 || d.p != 1)
    throw ConfigError("bound_ar1: fit and design must have order 1");
  const double complexity = ar1_complexity_term(d, plan, M);
  RiskBoundReport r = detail::assemble_report(fit, plan, complexity, M, eta, beta_m);
  const Eigen::MatrixXd U = detail::anchor_projections(d, plan, hull_vertices(1));
  r.general_form_complexity =
      4.0 * std::sqrt(std::numbers::pi * M * std::log(2.0)) /
      static_cast<double>(plan.mu) * std::sqrt(detail::max_pair_square_sum(U));
  return r;
}

/// Gaussian-likelihood information criterion on n_effective aligned rows:
///   n_eff ln(RSS / n_eff) + 2 (p + 1),
/// the +1 counting the innovation variance.
inline double aic(double rss, int p, std::size_t n_effective) {
  if (n_effective < 1) throw ConfigError("aic: n_effective must be >= 1");
  if (!(rss > 0.0)) throw ConfigError("aic: RSS must be > 0");
  return static_cast<double>(n_effective) *
             std::log(rss / static_cast<double>(n_effective)) +
         2.0 * (p + 1);
}

struct SelectionResult {
  std::vector<RiskBoundReport> per_order;           // p = 1..p_max
  std::vector<std::pair<int, double>> aic_per_order;
  int srm_choice = 0;   // argmin of bound_total, ties to smaller p
  int aic_choice = 0;   // argmin of AIC, ties to smaller p
  BlockChoice plan;     // the shared (m, mu) used for every order
  std::vector<BlockChoice> candidates;  // every lag with feasibility flags
  std::vector<std::string> notes;
};

struct SrmOptions {
  double margin = 1e-3;  // stationarity margin for the projection
  IndexCount index_count = IndexCount::mu;
  unsigned threads = 1;
};

/// Fits orders 1..p_max, bounds each one on a single shared block plan and
/// selects the order with the smallest bound; the information-criterion
/// column is computed on aligned target rows for comparison. The shared
/// plan is the feasible (m, mu) minimizing the bound averaged over orders;
/// infeasibility of every candidate is an error naming the best margin.
inline SelectionResult srm_select(const GrowthSeries& series, int p_max, double M,
                                  double eta, const MixingProfile& profile,
                                  const SrmOptions& opt = {}) {
  if (p_max < 1) throw ConfigError("srm_select: p_max must be >= 1");
  const std::size_t n = series.n();
  if (n <= 2 * static_cast<std::size_t>(p_max))
    throw ConfigError("srm_select: need n > 2 p_max");
  if (!(M > 0.0)) throw ConfigError("srm_select: loss cap M must be > 0");

  SelectionResult result;
  result.candidates = plan_blocks(n, eta, profile);
  std::vector<const BlockChoice*> feasible;
  for (const auto& c : result.candidates)
    if (c.feasible) feasible.push_back(&c);
  if (feasible.empty()) {
    double best_margin = -std::numeric_limits<double>::infinity();
    int best_m = 0;
    for (const auto& c : result.candidates)
      if (c.eta_prime > best_margin) {
        best_margin = c.eta_prime;
        best_m = c.m;
      }
    throw InfeasiblePlanError(
        "srm_select: no feasible block plan; best adjusted level eta' = " +
        std::to_string(best_margin) + " at m = " + std::to_string(best_m) +
        " (need eta' > 0)");
  }

  // Fits, designs and polytopes are shared across candidate plans.
  std::vector<FittedAR> fits(p_max);
  std::vector<Design> designs(p_max);
  std::vector<StabilityPolytope> polys(p_max);
  parallel_for(p_max, opt.threads, [&](std::size_t i) {
    const int p = static_cast<int>(i) + 1;
    designs[i] = build_design(series, p);
    fits[i] = fit_stationary(series, p, M, opt.margin);
    polys[i] = hull_vertices(p);
  });

  auto bound_for = [&](std::size_t i, const BlockChoice& c) {
    const int p = static_cast<int>(i) + 1;
    const BlockPlan plan = block_indices(n, p, c.m, c.mu, opt.index_count);
    return p == 1 ? bound_ar1(fits[i], designs[i], plan, M, eta, c.beta_m)
                  : bound_arp(fits[i], designs[i], plan, polys[i], M, eta, c.beta_m);
  };

  // Shared plan: feasible candidate with the smallest order-averaged bound.
  const BlockChoice* chosen = nullptr;
  double best_avg = std::numeric_limits<double>::infinity();
  for (const auto* c : feasible) {
    std::vector<double> totals(p_max);
    parallel_for(p_max, opt.threads,
                 [&](std::size_t i) { totals[i] = bound_for(i, *c).bound_total; });
    const double avg = pairwise_sum(totals) / static_cast<double>(p_max);
    if (avg < best_avg) {
      best_avg = avg;
      chosen = c;
    }
  }
  result.plan = *chosen;
  result.notes.push_back("shared block plan m = " + std::to_string(chosen->m) +
                         ", mu = " + std::to_string(chosen->mu) +
                         " minimizes the order-averaged bound");

  result.per_order.resize(p_max);
  parallel_for(p_max, opt.threads,
               [&](std::size_t i) { result.per_order[i] = bound_for(i, *chosen); });

  // Information criterion on rows shared by every order.
  const std::size_t n_eff = n - static_cast<std::size_t>(p_max);
  result.aic_per_order.resize(p_max);
  parallel_for(p_max, opt.threads, [&](std::size_t i) {
    const Design aligned = align_to(designs[i], p_max);
    const double rss = residual_sum_of_squares(aligned, fits[i].coef);
    result.aic_per_order[i] = {static_cast<int>(i) + 1,
                               aic(rss, static_cast<int>(i) + 1, n_eff)};
  });

  result.srm_choice = 1;
  result.aic_choice = 1;
  for (int p = 2; p <= p_max; ++p) {
    if (result.per_order[p - 1].bound_total <
        result.per_order[result.srm_choice - 1].bound_total)
      result.srm_choice = p;
    if (result.aic_per_order[p - 1].second <
        result.aic_per_order[result.aic_choice - 1].second)
      result.aic_choice = p;
  }
  return result;
}

}  // namespace arbound
