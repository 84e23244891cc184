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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "arbound/armodel.hpp"
#include "arbound/simgen.hpp"

using namespace arbound;

namespace {

GrowthSeries series_of(std::vector<double> v) {
  GrowthSeries g;
  g.values = std::move(v);
  return g;
}

}  // namespace

TEST_CASE("build_design lays out lags most-recent-first") {
  const Design d = build_design(series_of({1, 2, 3, 4}), 2);
  REQUIRE(d.rows() == 2);
  CHECK(d.X(0, 0) == 2);
  CHECK(d.X(0, 1) == 1);
  CHECK(d.X(1, 0) == 3);
  CHECK(d.X(1, 1) == 2);
  CHECK(d.Y[0] == 3);
  CHECK(d.Y[1] == 4);

  CHECK(build_design(series_of({1, 2, 3, 4, 5}), 1).rows() == 4);
  CHECK_THROWS_AS(build_design(series_of({1, 2}), 2), ConfigError);
}

TEST_CASE("design shift structure: first lag column equals lagged targets") {
  std::mt19937_64 eng(2);
  std::normal_distribution<double> gauss;
  std::vector<double> v(60);
  for (auto& x : v) x = gauss(eng);
  const Design d = build_design(series_of(v), 3);
  for (std::size_t k = 1; k < d.rows(); ++k)
    REQUIRE(d.X(k, 0) == d.Y[k - 1]);
}

TEST_CASE("ols recovers a noiseless recursion exactly") {
  std::vector<double> v{1.0};
  for (int i = 1; i < 40; ++i) v.push_back(0.5 * v.back());
  const CoefVector c = ols_fit(build_design(series_of(v), 1));
  CHECK(c.phi[0] == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("ols returns zero when targets are orthogonal to the columns") {
  Design d;
  d.p = 2;
  d.n = 6;
  d.X.resize(4, 2);
  d.X << 1, 0, 0, 1, -1, 0, 0, -1;
  d.Y.resize(4);
  d.Y << 1, 1, 1, 1;  // orthogonal to both columns
  const CoefVector c = ols_fit(d);
  CHECK(std::abs(c.phi[0]) < 1e-12);
  CHECK(std::abs(c.phi[1]) < 1e-12);
}

TEST_CASE("ols rejects rank-deficient designs") {
  Design d;
  d.p = 2;
  d.n = 12;
  d.X.resize(10, 2);
  for (int i = 0; i < 10; ++i) {
    d.X(i, 0) = i + 1.0;
    d.X(i, 1) = 2.0 * (i + 1.0);  // exact collinearity
  }
  d.Y = Eigen::VectorXd::Ones(10);
  CHECK_THROWS_AS(ols_fit(d), ConfigError);
}

TEST_CASE("ols is consistent on a long simulated path") {
  SimSpec spec;
  spec.phi = {{0.5, -0.3}};
  spec.sigma = 1.0;
  spec.n = 100000;
  spec.seed = 42;
  const GrowthSeries g = simulate(spec);
  const CoefVector c = ols_fit(build_design(g, 2));
  CHECK(c.phi[0] == Catch::Approx(0.5).margin(0.02));
  CHECK(c.phi[1] == Catch::Approx(-0.3).margin(0.02));
}

TEST_CASE("ols residuals are orthogonal to every design column") {
  SimSpec spec;
  spec.phi = {{0.4, 0.1, -0.2}};
  spec.n = 4000;
  spec.seed = 9;
  const GrowthSeries g = simulate(spec);
  const Design d = build_design(g, 3);
  const CoefVector c = ols_fit(d);
  Eigen::Map<const Eigen::VectorXd> phi(c.phi.data(), 3);
  const Eigen::VectorXd resid = d.Y - d.X * phi;
  for (int j = 0; j < 3; ++j) {
    const double ip = std::abs(resid.dot(d.X.col(j)));
    REQUIRE(ip < 1e-8 * d.Y.norm() * d.X.col(j).norm());
  }
}

TEST_CASE("nested aligned fits have nonincreasing RSS") {
  SimSpec spec;
  spec.phi = {{0.3, 0.2}};
  spec.n = 3000;
  spec.seed = 17;
  const GrowthSeries g = simulate(spec);
  const int p_max = 8;
  double prev = std::numeric_limits<double>::infinity();
  for (int p = 1; p <= p_max; ++p) {
    const Design aligned = align_to(build_design(g, p), p_max);
    const CoefVector c = ols_fit(aligned);
    const double rss = residual_sum_of_squares(aligned, c);
    REQUIRE(rss <= prev * (1.0 + 1e-12));
    prev = rss;
  }
}

TEST_CASE("fit_stationary on white noise is near zero with train error near the variance") {
  SimSpec spec;
  spec.phi = {{0.0}};
  spec.n = 20000;
  spec.seed = 4;
  const GrowthSeries g = simulate(spec);
  const FittedAR fit = fit_stationary(g, 1, /*M=*/10.0);
  CHECK(std::abs(fit.coef.phi[0]) < 0.03);
  CHECK(fit.train_error == Catch::Approx(1.0).margin(0.05));
  CHECK(fit.stationary_before_projection);
}

TEST_CASE("fit_stationary projects an explosive recursion") {
  // explosive path generated by hand: X_t = 1.05 X_{t-1} + eps
  std::mt19937_64 eng(8);
  std::normal_distribution<double> gauss;
  std::vector<double> v{1.0};
  for (int i = 1; i < 400; ++i) v.push_back(1.05 * v.back() + gauss(eng));
  const FittedAR fit = fit_stationary(series_of(v), 1, /*M=*/1e30, /*margin=*/1e-3);
  CHECK_FALSE(fit.stationary_before_projection);
  CHECK(is_stationary(fit.coef, 1e-3));
}

TEST_CASE("fit_stationary output is always stationary, near-unit-root included") {
  std::mt19937_64 eng(31);
  std::uniform_real_distribution<double> unif(0.9, 0.999);
  for (int trial = 0; trial < 10; ++trial) {
    SimSpec spec;
    spec.phi = {{unif(eng)}};
    spec.n = 500;
    spec.seed = eng();
    const GrowthSeries g = simulate(spec);
    const FittedAR fit = fit_stationary(g, 1, 10.0, 1e-3);
    REQUIRE(is_stationary(fit.coef, 1e-3));
  }
}

TEST_CASE("truncation caps the training error at the loss cap") {
  const GrowthSeries g = series_of({10.0, -10.0, 10.0, -10.0, 10.0});
  const FittedAR fit = fit_stationary(g, 1, /*M=*/0.5);
  CHECK(fit.train_error <= 0.5);
}

TEST_CASE("predict dots the most recent history with the coefficients") {
  FittedAR unit;
  unit.p = 1;
  unit.coef = {{1.0}};
  const std::vector<double> h{1.0, 2.0, 3.7};
  CHECK(predict(unit, h) == 3.7);

  FittedAR two;
  two.p = 2;
  two.coef = {{0.5, 0.25}};
  const std::vector<double> h2{9.0, 4.0, 2.0};  // most recent 2, then 4
  CHECK(predict(two, h2) == 2.0);

  FittedAR zero;
  zero.p = 2;
  zero.coef = {{0.0, 0.0}};
  CHECK(predict(zero, h2) == 0.0);
  CHECK_THROWS_AS(predict(two, std::vector<double>{1.0}), ConfigError);
}

TEST_CASE("predict is linear in the history") {
  FittedAR fit;
  fit.p = 3;
  fit.coef = {{0.2, -0.4, 0.1}};
  std::mt19937_64 eng(6);
  std::normal_distribution<double> gauss;
  std::vector<double> h(10);
  for (auto& x : h) x = gauss(eng);
  const double base = predict(fit, h);
  std::vector<double> scaled = h;
  for (auto& x : scaled) x *= 3.25;
  CHECK(predict(fit, scaled) == Catch::Approx(3.25 * base).margin(1e-12));
}
