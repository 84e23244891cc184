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

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "arbound/armodel.hpp"
#include "arbound/errors.hpp"
#include "arbound/parallel.hpp"
#include "arbound/rng.hpp"
#include "arbound/stability.hpp"

namespace arbound {

/// How many block anchor points to lay down: mu (matching the 1/mu
/// normalization) or mu+1 (the inclusive reading, kept for sensitivity
/// analysis).
enum class IndexCount { mu, mu_plus_one };

/// The widely-spaced design-row index set for the independent-block
/// argument: anchors of every other length-m block.
struct BlockPlan {
  std::size_t n = 0;   // series length the plan was made for
  int m = 0;           // block length
  std::size_t mu = 0;  // block count (normalization constant)
  std::vector<std::size_t> indices;  // 0-based design-row offsets, 2m apart
  std::size_t dropped = 0;           // anchors beyond the last design row
};

/// Anchor k sits at floor(m/2) + 2*m*k, k = 0..mu-1 (or ..mu). Anchors past
/// the last design row (n - p - 1, 0-based) are dropped and counted; an
/// empty plan is an error.
inline BlockPlan block_indices(std::size_t n, int p, int m, std::size_t mu,
                               IndexCount count = IndexCount::mu) {
  if (m < 1) throw ConfigError("block_indices: block length m must be >= 1");
  if (mu < 1) throw ConfigError("block_indices: block count mu must be >= 1");
  if (p < 1) throw ConfigError("block_indices: order must be >= 1");
  if (2 * mu * static_cast<std::size_t>(m) > n)
    throw ConfigError("block_indices: 2*mu*m exceeds sample size");
  if (n <= static_cast<std::size_t>(p))
    throw ConfigError("block_indices: sample size must exceed order");
  BlockPlan plan;
  plan.n = n;
  plan.m = m;
  plan.mu = mu;
  const std::size_t rows = n - static_cast<std::size_t>(p);
  const std::size_t points = count == IndexCount::mu ? mu : mu + 1;
  const std::size_t offset = static_cast<std::size_t>(m) / 2;
  for (std::size_t k = 0; k < points; ++k) {
    const std::size_t idx = offset + 2 * static_cast<std::size_t>(m) * k;
    if (idx < rows)
      plan.indices.push_back(idx);
    else
      ++plan.dropped;
  }
  if (plan.indices.empty())
    throw ConfigError("block_indices: every anchor fell past the last design row");
  return plan;
}

struct ComplexityValue {
  double value = 0.0;
  int p = 0;
  std::size_t points_used = 0;
};

namespace detail {

// U(i, j) = <X_(I_i), vertex_j>, the anchor-row projections onto the
// stability-polytope vertices.
inline Eigen::MatrixXd anchor_projections(const Design& d, const BlockPlan& plan,
                                          const StabilityPolytope& poly) {
  if (poly.p != d.p)
    throw ConfigError("complexity: polytope order does not match design order");
  const int k = poly.p + 1;
  Eigen::MatrixXd V(d.p, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < d.p; ++i) V(i, j) = poly.vertices[j].phi[i];
  Eigen::MatrixXd rows(plan.indices.size(), d.p);
  for (std::size_t i = 0; i < plan.indices.size(); ++i) {
    if (plan.indices[i] >= d.rows())
      throw ConfigError("complexity: block plan index out of design range");
    rows.row(i) = d.X.row(plan.indices[i]);
  }
  return rows * V;
}

// max over unordered vertex pairs of sum_i (U_ij - U_ij')^2, via the Gram
// matrix of U.
inline double max_pair_square_sum(const Eigen::MatrixXd& U) {
  const Eigen::MatrixXd G = U.transpose() * U;
  double best = 0.0;
  for (Eigen::Index j = 0; j < G.rows(); ++j)
    for (Eigen::Index l = j + 1; l < G.rows(); ++l)
      best = std::max(best, std::max(0.0, G(j, j) + G(l, l) - 2.0 * G(j, l)));
  return best;
}

}  // namespace detail

/// Slepian-comparison bound on the empirical Gaussian complexity of the
/// stationary AR(p) class, at block scale:
///   (2 sqrt(2) / mu) * sqrt(log(p+1)) *
///       max_{j != j'} ( sum_{i in I} <X_i, v_j - v_j'>^2 )^(1/2)
/// with v_j the stability-polytope vertices.
inline ComplexityValue empirical_gaussian_complexity(const Design& d,
                                                     const BlockPlan& plan,
                                                     const StabilityPolytope& poly) {
  const Eigen::MatrixXd U = detail::anchor_projections(d, plan, poly);
  ComplexityValue out;
  out.p = d.p;
  out.points_used = plan.indices.size();
  out.value = (2.0 * std::sqrt(2.0) / static_cast<double>(plan.mu)) *
              std::sqrt(std::log(static_cast<double>(poly.p + 1))) *
              std::sqrt(detail::max_pair_square_sum(U));
  return out;
}

/// Closed-form complexity contribution for the AR(1) class:
///   (4 / mu) * sqrt(M / 2) * ( sum_{i in I} X_i^2 )^(1/2).
inline double ar1_complexity_term(const Design& d, const BlockPlan& plan,
                                  double M) {
  if (d.p != 1) throw ConfigError("ar1_complexity_term: design order must be 1");
  if (!(M > 0.0)) throw ConfigError("ar1_complexity_term: loss cap M must be > 0");
  double sum = 0.0;
  for (std::size_t idx : plan.indices) {
    if (idx >= d.rows())
      throw ConfigError("ar1_complexity_term: block plan index out of range");
    sum += d.X(idx, 0) * d.X(idx, 0);
  }
  return (4.0 / static_cast<double>(plan.mu)) * std::sqrt(M / 2.0) * std::sqrt(sum);
}

struct MonteCarloComplexity {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t draws = 0;
};

/// Monte Carlo estimate of the empirical Gaussian complexity over the
/// anchor set: averages 2 * max_j |(1/mu) sum_{i in I} Z_i <X_i, v_j>| over
/// standard-normal draws Z. The supremum over the whole polytope of the
/// absolute linear form is attained at a vertex, so scanning vertices is
/// exact. Draw d uses its own substream of `seed`; the average is a
/// fixed-order pairwise reduction, so the result is identical for any
/// thread count.
inline MonteCarloComplexity monte_carlo_complexity_stats(
    const Design& d, const BlockPlan& plan, const StabilityPolytope& poly,
    std::size_t draws, std::uint64_t seed, unsigned threads = 1) {
  if (draws < 1) throw ConfigError("monte_carlo_complexity: draws must be >= 1");
  const Eigen::MatrixXd U = detail::anchor_projections(d, plan, poly);
  const double inv_mu = 1.0 / static_cast<double>(plan.mu);
  std::vector<double> vals(draws);
  parallel_for(draws, threads, [&](std::size_t t) {
    Engine eng = substream_engine(seed, /*stream=*/0xC0, t);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd z(U.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = gauss(eng);
    vals[t] = 2.0 * inv_mu * (z.transpose() * U).cwiseAbs().maxCoeff();
  });
  MonteCarloComplexity out;
  out.draws = draws;
  out.mean = pairwise_sum(vals) / static_cast<double>(draws);
  if (draws > 1) {
    std::vector<double> sq(draws);
    for (std::size_t i = 0; i < draws; ++i) {
      const double c = vals[i] - out.mean;
      sq[i] = c * c;
    }
    out.std_error = std::sqrt(pairwise_sum(sq) / static_cast<double>(draws - 1) /
                              static_cast<double>(draws));
  }
  return out;
}

inline double monte_carlo_complexity(const Design& d, const BlockPlan& plan,
                                     const StabilityPolytope& poly,
                                     std::size_t draws, std::uint64_t seed,
                                     unsigned threads = 1) {
  return monte_carlo_complexity_stats(d, plan, poly, draws, seed, threads).mean;
}

}  // namespace arbound
