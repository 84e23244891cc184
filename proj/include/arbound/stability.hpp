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
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <vector>

#include "arbound/errors.hpp"

namespace arbound {

/// Coefficients phi_1..phi_p of an autoregression
///   X_t = phi_1 X_{t-1} + ... + phi_p X_{t-p} + eps_t.
/// The process is (asymptotically) stationary exactly when every root of the
/// characteristic polynomial
///   Q_p(z) = z^p - phi_1 z^{p-1} - ... - phi_p
/// lies strictly inside the unit circle.
struct CoefVector {
  std::vector<double> phi;

  int order() const { return static_cast<int>(phi.size()); }
};

struct StationarityCheck {
  bool stable = false;
  bool had_nan = false;  // diagnostic: non-finite coefficients force false
};

/// Jury / Schur-Cohn criterion, run as the Levinson step-down recursion on
/// the lag polynomial 1 - phi_1 L - ... - phi_p L^p: the process is stable
/// iff every reflection coefficient has magnitude < 1. O(p^2), no
/// eigensolver. `tol` shrinks the admissible root radius to 1 - tol, which
/// is implemented by testing the radius-scaled coefficients phi_i / r^i.
inline StationarityCheck check_stationary(const CoefVector& c,
                                          double tol = 0.0) {
  if (c.order() < 1) throw ConfigError("check_stationary: order must be >= 1");
  if (tol < 0.0 || tol >= 1.0)
    throw ConfigError("check_stationary: tol must lie in [0, 1)");
  StationarityCheck out;
  const double r = 1.0 - tol;
  const int p = c.order();
  std::vector<double> a(p);
  double scale = 1.0;
  for (int i = 0; i < p; ++i) {
    scale *= r;
    a[i] = -c.phi[i] / scale;
    if (!std::isfinite(a[i])) {
      out.had_nan = true;
      return out;
    }
  }
  for (int m = p; m >= 1; --m) {
    const double k = a[m - 1];
    if (!std::isfinite(k)) {
      out.had_nan = true;
      return out;
    }
    if (std::abs(k) >= 1.0) return out;
    if (m == 1) break;
    const double denom = 1.0 - k * k;
    std::vector<double> b(m - 1);
    for (int i = 0; i < m - 1; ++i) b[i] = (a[i] - k * a[m - 2 - i]) / denom;
    a.swap(b);
  }
  out.stable = true;
  return out;
}

inline bool is_stationary(const CoefVector& c, double tol = 0.0) {
  return check_stationary(c, tol).stable;
}

/// Largest root modulus of Q_p via the eigenvalues of the p x p companion
/// matrix. Kept as an independent cross-check of the Jury predicate.
inline double companion_spectral_radius(const CoefVector& c) {
  const int p = c.order();
  if (p < 1)
    throw ConfigError("companion_spectral_radius: order must be >= 1");
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) companion(0, i) = c.phi[i];
  for (int i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw ConfigError("companion_spectral_radius: eigensolver did not converge");
  double radius = 0.0;
  for (int i = 0; i < p; ++i)
    radius = std::max(radius, std::abs(es.eigenvalues()[i]));
  return radius;
}

/// The p+1 vertices of the convex hull of the stability domain
/// (Fam & Meditch). Vertex j is the coefficient vector of
///   (z - 1)^(p-j) (z + 1)^j,  j = 0..p,
/// whose roots all sit on the unit circle. Expansion is exact integer
/// binomial convolution; coefficients fit in 64 bits for p <= 64.
struct StabilityPolytope {
  int p = 0;
  std::vector<CoefVector> vertices;  // p + 1 entries
};

inline StabilityPolytope hull_vertices(int p) {
  if (p < 1) throw ConfigError("hull_vertices: order must be >= 1");
  if (p > 64) throw ConfigError("hull_vertices: exact expansion limited to p <= 64");
  StabilityPolytope poly;
  poly.p = p;
  poly.vertices.reserve(p + 1);
  for (int j = 0; j <= p; ++j) {
    std::vector<std::int64_t> coef{1};
    for (int k = 0; k < p - j; ++k) {  // multiply by (z - 1)
      std::vector<std::int64_t> next(coef.size() + 1, 0);
      for (std::size_t i = 0; i < coef.size(); ++i) {
        next[i] += coef[i];
        next[i + 1] -= coef[i];
      }
      coef.swap(next);
    }
    for (int k = 0; k < j; ++k) {  // multiply by (z + 1)
      std::vector<std::int64_t> next(coef.size() + 1, 0);
      for (std::size_t i = 0; i < coef.size(); ++i) {
        next[i] += coef[i];
        next[i + 1] += coef[i];
      }
      coef.swap(next);
    }
    CoefVector v;
    v.phi.resize(p);
    for (int i = 1; i <= p; ++i) v.phi[i - 1] = -static_cast<double>(coef[i]);
    poly.vertices.push_back(std::move(v));
  }
  return poly;
}

/// Returns c unchanged when it is already stationary at `margin`; otherwise
/// shrinks it radially, returning s*c for the largest s in (0, 1) that is
/// stationary at `margin` (bisection to 1e-10). Shrinking toward the origin
/// always terminates: the zero vector is stationary. Idempotent.
inline CoefVector project_into_hull(const CoefVector& c,
                                    const StabilityPolytope& poly,
                                    double margin) {
  if (poly.p != c.order())
    throw ConfigError("project_into_hull: polytope order mismatch");
  if (margin < 0.0 || margin >= 1.0)
    throw ConfigError("project_into_hull: margin must lie in [0, 1)");
  if (is_stationary(c, margin)) return c;
  const int p = c.order();
  auto scaled = [&](double s) {
    CoefVector out;
    out.phi.resize(p);
    for (int i = 0; i < p; ++i) out.phi[i] = s * c.phi[i];
    return out;
  };
  double lo = 0.0, hi = 1.0;  // lo stationary, hi not
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (is_stationary(scaled(mid), margin))
      lo = mid;
    else
      hi = mid;
  }
  return scaled(lo);
}

}  // namespace arbound
