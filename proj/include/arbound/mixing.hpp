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
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <vector>

#include "arbound/armodel.hpp"
#include "arbound/errors.hpp"
#include "arbound/parallel.hpp"
#include "arbound/quadrature.hpp"
#include "arbound/rng.hpp"
#include "arbound/stability.hpp"

namespace arbound {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

/// Total variation distance between N(mean1, var1) and N(mean2, var2),
/// convention (1/2) integral |f - g|, so the value lies in [0, 1].
/// Computed analytically: the density log-ratio is a quadratic in x, its
/// real roots split the line into sign-constant intervals, and the signed
/// mass differences over those intervals telescope through the two CDFs.
inline double tv_gaussians_1d(double mean1, double var1, double mean2,
                              double var2) {
  if (!(var1 > 0.0) || !(var2 > 0.0))
    throw ConfigError("tv_gaussians_1d: variances must be positive");
  if (mean1 == mean2 && var1 == var2) return 0.0;
  const double a = 0.5 / var2 - 0.5 / var1;
  const double b = mean1 / var1 - mean2 / var2;
  const double c = mean2 * mean2 / (2.0 * var2) - mean1 * mean1 / (2.0 * var1) +
                   0.5 * std::log(var2 / var1);
  std::vector<double> roots;
  if (a == 0.0) {
    if (b != 0.0) roots.push_back(-c / b);
  } else if (b == 0.0) {
    const double r2 = -c / a;
    if (r2 > 0.0) {
      roots.push_back(-std::sqrt(r2));
      roots.push_back(std::sqrt(r2));
    } else if (r2 == 0.0) {
      roots.push_back(0.0);
    }
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc > 0.0) {
      // cancellation-free quadratic roots
      const double qq = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      roots.push_back(qq / a);
      roots.push_back(c / qq);
      if (roots[0] > roots[1]) std::swap(roots[0], roots[1]);
    } else if (disc == 0.0) {
      roots.push_back(-b / (2.0 * a));
    }
  }
  const double s1 = std::sqrt(var1), s2 = std::sqrt(var2);
  double tv = 0.0;
  double prev_f = 0.0, prev_g = 0.0;
  for (double r : roots) {
    const double f = normal_cdf((r - mean1) / s1);
    const double g = normal_cdf((r - mean2) / s2);
    tv += std::abs((f - prev_f) - (g - prev_g));
    prev_f = f;
    prev_g = g;
  }
  tv += std::abs((1.0 - prev_f) - (1.0 - prev_g));
  return std::clamp(0.5 * tv, 0.0, 1.0);
}

/// A stationary Gaussian AR(q) stand-in for the unknown data law, used only
/// to compute mixing coefficients.
struct GaussianARSurrogate {
  CoefVector phi;
  double sigma = 1.0;
};

inline void validate_surrogate(const GaussianARSurrogate& s) {
  if (s.phi.order() < 1)
    throw ConfigError("surrogate: order must be >= 1");
  if (!(s.sigma > 0.0)) throw ConfigError("surrogate: sigma must be > 0");
  if (!is_stationary(s.phi))
    throw ConfigError("surrogate: coefficients are not stationary");
}

/// Least squares surrogate fit of order q with a significance filter:
/// coefficients with |t| < tstat are set to zero (tstat <= 0 keeps all).
/// A long unfiltered fit carries one noise-level coefficient per lag, and a
/// noise coefficient at lag L props the companion chain's spectral radius
/// near |noise|^(1/L); the surrogate then mixes orders of magnitude slower
/// than the data it was fit to, and every block plan is refused. Filtering
/// keeps the surrogate's memory to the lags the sample actually supports.
inline GaussianARSurrogate fit_surrogate(const GrowthSeries& series, int q,
                                         double tstat = 3.0,
                                         double margin = 1e-3) {
  const Design d = build_design(series, q);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(d.X,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (!(sv[sv.size() - 1] > 1e-10 * sv[0]))
    throw ConfigError("fit_surrogate: rank-deficient design");
  Eigen::VectorXd phi = svd.solve(d.Y);
  if (tstat > 0.0) {
    const double dof = static_cast<double>(d.rows()) - q;
    if (dof < 1.0) throw ConfigError("fit_surrogate: not enough rows");
    const double s2 = (d.Y - d.X * phi).squaredNorm() / dof;
    const Eigen::MatrixXd& V = svd.matrixV();
    for (int i = 0; i < q; ++i) {
      double inv_diag = 0.0;  // ((X'X)^-1)_ii via the right singular vectors
      for (int j = 0; j < q; ++j)
        inv_diag += V(i, j) * V(i, j) / (sv[j] * sv[j]);
      const double se = std::sqrt(s2 * inv_diag);
      if (std::abs(phi[i]) < tstat * se) phi[i] = 0.0;
    }
  }
  GaussianARSurrogate out;
  out.phi.phi.assign(phi.data(), phi.data() + q);
  if (!is_stationary(out.phi, margin))
    out.phi = project_into_hull(out.phi, hull_vertices(q), margin);
  Eigen::Map<const Eigen::VectorXd> kept(out.phi.phi.data(), q);
  out.sigma = std::sqrt((d.Y - d.X * kept).squaredNorm() /
                        static_cast<double>(d.rows()));
  if (!(out.sigma > 0.0))
    throw ConfigError("fit_surrogate: degenerate residuals");
  return out;
}

/// beta(m) of a stationary Gaussian AR(1): the average over the stationary
/// law pi = N(0, sigma^2/(1-phi^2)) of the total variation between the
/// m-step conditional N(phi^m x, sigma^2 (1-phi^(2m))/(1-phi^2)) and pi.
/// The outer integral uses Gauss-Hermite quadrature; the inner TV is exact.
inline double beta_ar1(const GaussianARSurrogate& s, int m,
                       int quad_points = 128) {
  validate_surrogate(s);
  if (s.phi.order() != 1) throw ConfigError("beta_ar1: surrogate order must be 1");
  if (m < 1) throw ConfigError("beta_ar1: lag must be >= 1");
  const double phi = s.phi.phi[0];
  if (phi == 0.0) return 0.0;
  const double var_pi = s.sigma * s.sigma / (1.0 - phi * phi);
  const double phi_m = std::pow(phi, m);
  const double var_m = var_pi * (1.0 - phi_m * phi_m);
  const GaussHermiteRule rule = gauss_hermite(quad_points);
  const double val = expect_normal(rule, 0.0, var_pi, [&](double x) {
    return tv_gaussians_1d(phi_m * x, var_m, 0.0, var_pi);
  });
  return std::clamp(val, 0.0, 1.0);
}

namespace detail {

inline Eigen::MatrixXd companion_matrix(const CoefVector& c) {
  const int q = c.order();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(q, q);
  for (int i = 0; i < q; ++i) A(0, i) = c.phi[i];
  for (int i = 1; i < q; ++i) A(i, i - 1) = 1.0;
  return A;
}

// Stationary covariance V of z_{t+1} = A z_t + e, e ~ N(0, Q): solves the
// discrete Lyapunov equation V = A V A' + Q by Kronecker vectorization.
inline Eigen::MatrixXd solve_discrete_lyapunov(const Eigen::MatrixXd& A,
                                               const Eigen::MatrixXd& Q) {
  const Eigen::Index q = A.rows();
  Eigen::MatrixXd K = Eigen::MatrixXd::Identity(q * q, q * q);
  for (Eigen::Index i = 0; i < q; ++i)
    for (Eigen::Index j = 0; j < q; ++j)
      K.block(i * q, j * q, q, q) -= A(i, j) * A;
  const Eigen::Map<const Eigen::VectorXd> rhs(Q.data(), q * q);
  Eigen::VectorXd v = K.partialPivLu().solve(rhs);
  Eigen::MatrixXd V = Eigen::Map<Eigen::MatrixXd>(v.data(), q, q);
  return 0.5 * (V + V.transpose());
}

}  // namespace detail

/// Mixing coefficient of the companion-form state chain of a Gaussian AR(q)
/// at `state_lag` chain steps:
///   E_{x ~ pi} TV( N(A^j x, V_j), N(0, V_inf) ),  j = state_lag,
/// with V_inf the stationary state covariance (discrete Lyapunov) and
/// V_j = V_inf - A^j V_inf A'^j. For j < q the state vectors still share
/// coordinates, V_j is rank-deficient and the distance is trivially 1, so
/// lags below q are rejected. The TV between the two full-rank Gaussians
/// has no closed form; each one is estimated by the symmetrized likelihood
/// ratio form TV(f, g) = E_{y~f} max(0, 1 - g(y)/f(y)) with `tv_samples`
/// draws. Deterministic for a given seed, any thread count.
struct BetaEstimate {
  double value = 0.0;
  double std_error = 0.0;  // across the outer state samples
  std::size_t samples = 0;
};

inline BetaEstimate beta_arq_stats(const GaussianARSurrogate& s, int state_lag,
                                   std::size_t samples, std::uint64_t seed,
                                   std::size_t tv_samples = 100000,
                                   unsigned threads = 1) {
  validate_surrogate(s);
  const int q = s.phi.order();
  if (state_lag < 1) throw ConfigError("beta_arq: lag must be >= 1");
  if (state_lag < q)
    throw ConfigError(
        "beta_arq: the m-step state covariance is rank-deficient for m < q; "
        "use m >= q (requested m = " + std::to_string(state_lag) +
        ", q = " + std::to_string(q) + ")");
  if (samples < 1 || tv_samples < 1)
    throw ConfigError("beta_arq: sample counts must be >= 1");

  const Eigen::MatrixXd A = detail::companion_matrix(s.phi);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(q, q);
  Q(0, 0) = s.sigma * s.sigma;
  const Eigen::MatrixXd Vinf = detail::solve_discrete_lyapunov(A, Q);
  Eigen::MatrixXd Aj = Eigen::MatrixXd::Identity(q, q);
  for (int k = 0; k < state_lag; ++k) Aj = A * Aj;
  if ((Aj.array() == 0.0).all()) {
    // nilpotent chain (all coefficients zero): the conditional law already
    // equals the stationary law
    return BetaEstimate{0.0, 0.0, samples};
  }
  Eigen::MatrixXd Vj = Vinf - Aj * Vinf * Aj.transpose();
  Vj = 0.5 * (Vj + Vj.transpose());

  Eigen::LLT<Eigen::MatrixXd> llt_g(Vinf);
  Eigen::LLT<Eigen::MatrixXd> llt_f(Vj);
  if (llt_g.info() != Eigen::Success)
    throw ConfigError("beta_arq: stationary covariance is not positive definite");
  if (llt_f.info() != Eigen::Success)
    throw ConfigError("beta_arq: m-step covariance is not positive definite");
  const Eigen::MatrixXd Lg = llt_g.matrixL();
  const Eigen::MatrixXd Lf = llt_f.matrixL();
  double ldf = 0.0, ldg = 0.0;
  for (int i = 0; i < q; ++i) {
    ldf += std::log(Lf(i, i));
    ldg += std::log(Lg(i, i));
  }

  constexpr std::size_t kChunk = 8192;
  std::vector<double> outer_vals(samples);
  parallel_for(samples, threads, [&](std::size_t t) {
    Engine eng = substream_engine(seed, /*stream=*/0xBEu, t);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd x(q);
    for (int i = 0; i < q; ++i) x[i] = gauss(eng);
    const Eigen::VectorXd center = Aj * (Lg * x);

    double acc_f = 0.0, acc_g = 0.0;
    Eigen::MatrixXd G(q, kChunk);
    for (std::size_t done = 0; done < tv_samples;) {
      const std::size_t b = std::min(kChunk, tv_samples - done);
      for (std::size_t col = 0; col < b; ++col)
        for (int i = 0; i < q; ++i) G(i, col) = gauss(eng);
      const auto Gb = G.leftCols(b);
      {  // draws from f = N(center, Vj), ratio g/f
        const Eigen::MatrixXd Y = (Lf * Gb).colwise() + center;
        const Eigen::MatrixXd W =
            Lg.triangularView<Eigen::Lower>().solve(Y);
        for (std::size_t col = 0; col < b; ++col) {
          const double lf = -0.5 * Gb.col(col).squaredNorm() - ldf;
          const double lg = -0.5 * W.col(col).squaredNorm() - ldg;
          acc_f += std::max(0.0, 1.0 - std::exp(lg - lf));
        }
      }
      for (std::size_t col = 0; col < b; ++col)
        for (int i = 0; i < q; ++i) G(i, col) = gauss(eng);
      {  // draws from g = N(0, Vinf), ratio f/g
        const Eigen::MatrixXd Y = Lg * Gb;
        const Eigen::MatrixXd W =
            Lf.triangularView<Eigen::Lower>().solve(Y.colwise() - center);
        for (std::size_t col = 0; col < b; ++col) {
          const double lg = -0.5 * Gb.col(col).squaredNorm() - ldg;
          const double lf = -0.5 * W.col(col).squaredNorm() - ldf;
          acc_g += std::max(0.0, 1.0 - std::exp(lf - lg));
        }
      }
      done += b;
    }
    const double inv = 1.0 / static_cast<double>(tv_samples);
    outer_vals[t] = 0.5 * (acc_f + acc_g) * inv;
  });
  BetaEstimate est;
  est.samples = samples;
  const double mean = pairwise_sum(outer_vals) / static_cast<double>(samples);
  est.value = std::clamp(mean, 0.0, 1.0);
  if (samples > 1) {
    std::vector<double> sq(samples);
    for (std::size_t i = 0; i < samples; ++i) {
      const double c = outer_vals[i] - mean;
      sq[i] = c * c;
    }
    est.std_error = std::sqrt(pairwise_sum(sq) / static_cast<double>(samples - 1) /
                              static_cast<double>(samples));
  }
  return est;
}

inline double beta_arq(const GaussianARSurrogate& s, int state_lag,
                       std::size_t samples, std::uint64_t seed,
                       std::size_t tv_samples = 100000, unsigned threads = 1) {
  return beta_arq_stats(s, state_lag, samples, seed, tv_samples, threads).value;
}

enum class MixingMethod { quadrature, monte_carlo };

/// beta(m) per process lag m for one surrogate. `betas` is the isotonic
/// (running-minimum) sequence consumed by block planning; `raw_betas` keeps
/// the uncorrected values for reporting.
struct MixingProfile {
  std::map<int, double> betas;
  std::map<int, double> raw_betas;
  MixingMethod method = MixingMethod::quadrature;
  GaussianARSurrogate surrogate;
};

struct MixingOptions {
  int quad_points = 128;           // Gauss-Hermite nodes (q = 1 path)
  std::size_t state_samples = 128;  // outer draws from pi (q > 1 path)
  std::size_t tv_samples = 100000;  // inner draws per TV estimate (q > 1 path)
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Computes beta over the given process lags. A separation of m
/// observations between past and future blocks corresponds to m + q - 1
/// steps of the companion-form state chain (the state spans q consecutive
/// observations), so the q > 1 path evaluates the chain at that lag; for
/// q = 1 the two notions coincide and the quadrature path is used.
inline MixingProfile mixing_profile(const GaussianARSurrogate& s,
                                    const std::vector<int>& lags,
                                    const MixingOptions& opt = {}) {
  validate_surrogate(s);
  MixingProfile profile;
  profile.surrogate = s;
  const int q = s.phi.order();
  profile.method = q == 1 ? MixingMethod::quadrature : MixingMethod::monte_carlo;
  for (int m : lags) {
    if (m < 1) throw ConfigError("mixing_profile: lags must be >= 1");
    double b;
    if (q == 1) {
      b = beta_ar1(s, m, opt.quad_points);
    } else {
      b = beta_arq(s, m + q - 1, opt.state_samples,
                   substream_seed(opt.seed, 0xB17a, static_cast<std::uint64_t>(m)),
                   opt.tv_samples, opt.threads);
    }
    profile.raw_betas[m] = b;
  }
  double running = 1.0;
  for (const auto& [m, b] : profile.raw_betas) {
    running = std::min(running, b);
    profile.betas[m] = running;
  }
  return profile;
}

/// One candidate block decomposition of a length-n sample.
struct BlockChoice {
  int m = 0;                // block length
  std::size_t mu = 0;       // floor(n / 2m) blocks
  double eta = 0.0;         // requested confidence level
  double beta_m = 0.0;      // mixing coefficient at lag m
  double eta_prime = 0.0;   // eta - 4 (mu - 1) beta(m)
  bool feasible = false;    // eta_prime > 0
  std::size_t leftover = 0; // n - 2 mu m unused points
};

/// Evaluates every lag in the profile: mu = floor(n / 2m) and
/// eta' = eta - 4 (mu - 1) beta(m). Entries are returned in lag order with
/// feasibility flags; an all-infeasible list is a legitimate result the
/// caller must inspect.
inline std::vector<BlockChoice> plan_blocks(std::size_t n, double eta,
                                            const MixingProfile& profile) {
  if (n < 4) throw ConfigError("plan_blocks: need n >= 4");
  if (!(eta > 0.0 && eta < 1.0))
    throw ConfigError("plan_blocks: eta must lie in (0, 1)");
  std::vector<BlockChoice> out;
  for (const auto& [m, beta] : profile.betas) {
    const std::size_t mu = n / (2 * static_cast<std::size_t>(m));
    if (mu < 1) continue;
    BlockChoice c;
    c.m = m;
    c.mu = mu;
    c.eta = eta;
    c.beta_m = beta;
    c.eta_prime = eta - 4.0 * static_cast<double>(mu - 1) * beta;
    c.feasible = c.eta_prime > 0.0;
    c.leftover = n - 2 * mu * static_cast<std::size_t>(m);
    out.push_back(c);
  }
  return out;
}

}  // namespace arbound
