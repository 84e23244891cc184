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
#include <Eigen/SVD>
#include <cmath>
#include <span>
#include <string>

#include "arbound/errors.hpp"
#include "arbound/stability.hpp"
#include "arbound/timeseries.hpp"

namespace arbound {

/// Lagged design for an order-p autoregression on a series of length n.
/// Row k (0-based) is (x[p-1+k], ..., x[k]) -- most recent lag first --
/// and the target is Y[k] = x[p+k]. No intercept, no centering.
struct Design {
  Eigen::MatrixXd X;  // (n - p) x p
  Eigen::VectorXd Y;  // n - p
  int p = 0;
  std::size_t n = 0;

  std::size_t rows() const { return static_cast<std::size_t>(X.rows()); }
};

inline Design build_design(const GrowthSeries& series, int p) {
  if (p < 1) throw ConfigError("build_design: order must be >= 1");
  const std::size_t n = series.n();
  if (n <= static_cast<std::size_t>(p))
    throw ConfigError("build_design: series length " + std::to_string(n) +
                      " must exceed order " + std::to_string(p));
  Design d;
  d.p = p;
  d.n = n;
  const std::size_t rows = n - static_cast<std::size_t>(p);
  d.X.resize(rows, p);
  d.Y.resize(rows);
  for (std::size_t k = 0; k < rows; ++k) {
    for (int j = 0; j < p; ++j) d.X(k, j) = series.values[k + p - 1 - j];
    d.Y[k] = series.values[k + p];
  }
  return d;
}

/// Restricts a design to the rows whose targets are shared by every order
/// up to p_max (targets x[p_max..n-1]); used for aligned AIC and nested-RSS
/// comparisons.
inline Design align_to(const Design& d, int p_max) {
  if (p_max < d.p) throw ConfigError("align_to: p_max must be >= design order");
  const std::size_t skip = static_cast<std::size_t>(p_max - d.p);
  if (skip >= d.rows()) throw ConfigError("align_to: no rows left after alignment");
  Design out;
  out.p = d.p;
  out.n = d.n;
  out.X = d.X.bottomRows(d.rows() - skip);
  out.Y = d.Y.tail(d.rows() - skip);
  return out;
}

/// Least squares via singular value decomposition (no explicit normal
/// equations). Rejects designs whose smallest singular value is below
/// 1e-10 times the largest.
inline CoefVector ols_fit(const Design& d) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(d.X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double largest = sv[0];
  const double smallest = sv[sv.size() - 1];
  if (!(smallest > 1e-10 * largest))
    throw ConfigError("ols_fit: rank-deficient design, sigma_min/sigma_max = " +
                      std::to_string(largest > 0 ? smallest / largest : 0.0));
  const Eigen::VectorXd phi = svd.solve(d.Y);
  CoefVector c;
  c.phi.assign(phi.data(), phi.data() + phi.size());
  return c;
}

/// Mean squared prediction error with each term capped at M.
inline double truncated_mse(const Design& d, const CoefVector& coef, double M) {
  if (coef.order() != d.p) throw ConfigError("truncated_mse: order mismatch");
  Eigen::Map<const Eigen::VectorXd> phi(coef.phi.data(), coef.order());
  const Eigen::VectorXd resid = d.Y - d.X * phi;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < resid.size(); ++i)
    acc += std::min(resid[i] * resid[i], M);
  return acc / static_cast<double>(resid.size());
}

inline double residual_sum_of_squares(const Design& d, const CoefVector& coef) {
  if (coef.order() != d.p)
    throw ConfigError("residual_sum_of_squares: order mismatch");
  Eigen::Map<const Eigen::VectorXd> phi(coef.phi.data(), coef.order());
  return (d.Y - d.X * phi).squaredNorm();
}

/// An order-p fit with stationarity enforced.
struct FittedAR {
  CoefVector coef;
  double sigma2 = 0.0;       // RSS / (n - p), from the projected coefficients
  double rss = 0.0;          // untruncated, over this fit's own rows
  double train_error = 0.0;  // mean truncated squared loss, cap M
  bool stationary_before_projection = true;
  int p = 0;
};

/// OLS followed by radial shrinkage into the stability domain when the
/// unconstrained solution is non-stationary at `margin`. Residual moments
/// and the capped training error are computed from the projected
/// coefficients, so reported errors describe the model actually returned.
inline FittedAR fit_stationary(const GrowthSeries& series, int p, double M,
                               double margin = 1e-3) {
  if (!(M > 0.0)) throw ConfigError("fit_stationary: loss cap M must be > 0");
  const Design d = build_design(series, p);
  CoefVector raw = ols_fit(d);
  FittedAR fit;
  fit.p = p;
  fit.stationary_before_projection = is_stationary(raw, margin);
  fit.coef = fit.stationary_before_projection
                 ? std::move(raw)
                 : project_into_hull(raw, hull_vertices(p), margin);
  fit.rss = residual_sum_of_squares(d, fit.coef);
  fit.sigma2 = fit.rss / static_cast<double>(d.rows());
  fit.train_error = truncated_mse(d, fit.coef, M);
  return fit;
}

/// One-step prediction <(most recent p history values), phi>.
inline double predict(const FittedAR& fit, std::span<const double> history) {
  const int p = fit.p;
  if (history.size() < static_cast<std::size_t>(p))
    throw ConfigError("predict: history shorter than model order");
  double acc = 0.0;
  for (int i = 0; i < p; ++i)
    acc += fit.coef.phi[i] * history[history.size() - 1 - i];
  return acc;
}

}  // namespace arbound
