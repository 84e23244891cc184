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

#include "arbound/mixing.hpp"
#include "arbound/quadrature.hpp"
#include "arbound/simgen.hpp"
#include "oracles.hpp"

using namespace arbound;

TEST_CASE("gauss-hermite rule integrates normal moments") {
  const auto rule = gauss_hermite(64);
  CHECK(rule.weights.sum() == Catch::Approx(std::sqrt(3.14159265358979323846)).epsilon(1e-13));
  const double m2 = expect_normal(rule, 0.0, 2.5, [](double x) { return x * x; });
  CHECK(m2 == Catch::Approx(2.5).epsilon(1e-12));
  const double m4 = expect_normal(rule, 1.0, 1.0, [](double x) {
    const double c = x - 1.0;
    return c * c * c * c;
  });
  CHECK(m4 == Catch::Approx(3.0).epsilon(1e-11));
}

TEST_CASE("tv of identical gaussians is zero; far means approach one") {
  CHECK(tv_gaussians_1d(0.3, 2.0, 0.3, 2.0) == 0.0);
  CHECK(tv_gaussians_1d(0.0, 1.0, 40.0, 1.0) == Catch::Approx(1.0).margin(1e-12));
  CHECK_THROWS_AS(tv_gaussians_1d(0.0, -1.0, 0.0, 1.0), ConfigError);
}

TEST_CASE("tv of unit gaussians one mean apart") {
  // single density intersection at 1/2
  CHECK(tv_gaussians_1d(0.0, 1.0, 1.0, 1.0) ==
        Catch::Approx(0.3829249225480262).margin(1e-10));
}

TEST_CASE("tv is symmetric and obeys the triangle inequality") {
  std::mt19937_64 eng(15);
  std::uniform_real_distribution<double> mean(-3.0, 3.0), var(0.2, 5.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double m1 = mean(eng), m2 = mean(eng), m3 = mean(eng);
    const double v1 = var(eng), v2 = var(eng), v3 = var(eng);
    const double ab = tv_gaussians_1d(m1, v1, m2, v2);
    const double ba = tv_gaussians_1d(m2, v2, m1, v1);
    REQUIRE(ab == Catch::Approx(ba).margin(1e-12));
    const double ac = tv_gaussians_1d(m1, v1, m3, v3);
    const double cb = tv_gaussians_1d(m3, v3, m2, v2);
    REQUIRE(ab <= ac + cb + 1e-10);
  }
}

TEST_CASE("analytic tv agrees with direct numerical integration") {
  std::mt19937_64 eng(16);
  std::uniform_real_distribution<double> mean(-2.0, 2.0), var(0.3, 4.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double m1 = mean(eng), m2 = mean(eng);
    const double v1 = var(eng), v2 = var(eng);
    const double lo = std::min(m1 - 10 * std::sqrt(v1), m2 - 10 * std::sqrt(v2));
    const double hi = std::max(m1 + 10 * std::sqrt(v1), m2 + 10 * std::sqrt(v2));
    const double num = 0.5 * oracles::integrate(
                                 [&](double x) {
                                   return std::abs(oracles::normal_pdf(x, m1, v1) -
                                                   oracles::normal_pdf(x, m2, v2));
                                 },
                                 lo, hi, 4000);
    REQUIRE(tv_gaussians_1d(m1, v1, m2, v2) == Catch::Approx(num).margin(1e-7));
  }
}

TEST_CASE("beta_ar1 of an iid surrogate is exactly zero") {
  const GaussianARSurrogate s{{{0.0}}, 1.0};
  for (int m : {1, 2, 5, 20}) CHECK(beta_ar1(s, m) == 0.0);
}

TEST_CASE("beta_ar1 decays monotonically and stays in [0, 1]") {
  for (double phi : {0.1, 0.3, 0.5, 0.7, 0.9, 0.95}) {
    const GaussianARSurrogate s{{{phi}}, 1.0};
    double prev = 1.0;
    for (int m = 1; m <= 12; ++m) {
      const double b = beta_ar1(s, m);
      REQUIRE(b >= 0.0);
      REQUIRE(b <= 1.0);
      REQUIRE(b <= prev + 1e-8);  // raw values, before any isotonic step
      prev = b;
    }
  }
}

TEST_CASE("beta_ar1 is even in phi") {
  for (int m : {1, 2, 3, 4, 5, 6}) {
    const double plus = beta_ar1({{{0.6}}, 1.0}, m);
    const double minus = beta_ar1({{{-0.6}}, 1.0}, m);
    REQUIRE(plus == Catch::Approx(minus).margin(1e-12));
  }
}

TEST_CASE("beta_ar1 rejects non-stationary surrogates") {
  CHECK_THROWS_AS(beta_ar1({{{1.0}}, 1.0}, 1), ConfigError);
  CHECK_THROWS_AS(beta_ar1({{{0.5}}, -1.0}, 1), ConfigError);
}

TEST_CASE("beta_ar1 matches a monte carlo oracle of the defining integral") {
  // oracle: sample x from pi, average the exact conditional-vs-stationary TV
  const double phi = 0.5, sigma = 1.0;
  const int m = 3;
  const double var_pi = sigma * sigma / (1 - phi * phi);
  const double phi_m = std::pow(phi, m);
  const double var_m = var_pi * (1 - phi_m * phi_m);
  std::mt19937_64 eng(123);
  std::normal_distribution<double> gauss(0.0, std::sqrt(var_pi));
  double acc = 0.0;
  const int samples = 200000;
  for (int i = 0; i < samples; ++i)
    acc += tv_gaussians_1d(phi_m * gauss(eng), var_m, 0.0, var_pi);
  acc /= samples;
  CHECK(beta_ar1({{{phi}}, sigma}, m) == Catch::Approx(acc).margin(2e-3));
}

TEST_CASE("beta_arq rejects chain lags below the surrogate order") {
  const GaussianARSurrogate s{{{0.2, 0.1, 0.05}}, 1.0};
  CHECK_THROWS_WITH(beta_arq(s, 2, 16, 1, 100),
                    Catch::Matchers::ContainsSubstring("m >= q"));
}

TEST_CASE("beta_arq of a zero-coefficient surrogate is exactly zero") {
  const GaussianARSurrogate s{{{0.0, 0.0, 0.0}}, 1.0};
  CHECK(beta_arq(s, 3, 32, 9, 2000) == 0.0);
  CHECK(beta_arq(s, 8, 32, 9, 2000) == 0.0);
}

TEST_CASE("beta_arq order-1 path agrees with the quadrature path") {
  const GaussianARSurrogate s{{{0.6}}, 1.3};
  for (int m : {1, 2, 4}) {
    const auto est = beta_arq_stats(s, m, 1024, 77, 8192);
    const double ref = beta_ar1(s, m);
    REQUIRE(std::abs(est.value - ref) <= 3.0 * est.std_error + 2e-3);
  }
}

TEST_CASE("beta_arq is seed-deterministic and thread-invariant") {
  const GaussianARSurrogate s{{{0.5, -0.3}}, 1.0};
  const double a = beta_arq(s, 5, 64, 11, 4096, 1);
  const double b = beta_arq(s, 5, 64, 11, 4096, 1);
  const double c = beta_arq(s, 5, 64, 11, 4096, 4);
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("mixing_profile applies the running-minimum and keeps raw values") {
  const GaussianARSurrogate s{{{0.5, -0.3}}, 1.0};
  MixingOptions opt;
  opt.state_samples = 64;
  opt.tv_samples = 4096;
  opt.seed = 3;
  const MixingProfile profile = mixing_profile(s, {2, 4, 8, 16}, opt);
  REQUIRE(profile.betas.size() == 4);
  double prev = 1.0;
  for (const auto& [m, b] : profile.betas) {
    REQUIRE(b <= prev);
    REQUIRE(b <= profile.raw_betas.at(m));
    prev = b;
  }
  CHECK(profile.method == MixingMethod::monte_carlo);
}

TEST_CASE("mixing_profile process lag maps to chain lag m + q - 1") {
  const GaussianARSurrogate s{{{0.5, -0.3}}, 1.0};
  MixingOptions opt;
  opt.state_samples = 64;
  opt.tv_samples = 4096;
  opt.seed = 3;
  const MixingProfile profile = mixing_profile(s, {6}, opt);
  const double direct =
      beta_arq(s, 6 + 2 - 1, opt.state_samples,
               substream_seed(opt.seed, 0xB17a, 6), opt.tv_samples);
  CHECK(profile.raw_betas.at(6) == direct);
}

TEST_CASE("fit_surrogate zeroes noise coefficients and keeps real structure") {
  SimSpec spec;
  spec.phi = {{0.4}};
  spec.sigma = 1.0;
  spec.n = 8000;
  spec.seed = 14;
  const GrowthSeries g = simulate(spec);
  const GaussianARSurrogate s = fit_surrogate(g, 12, 3.0);
  CHECK(s.phi.phi[0] == Catch::Approx(0.4).margin(0.05));
  int kept = 0;
  for (double c : s.phi.phi)
    if (c != 0.0) ++kept;
  CHECK(kept <= 3);  // the true lag survives, noise lags mostly do not
  CHECK(s.sigma == Catch::Approx(1.0).margin(0.05));
  CHECK(is_stationary(s.phi));

  // unfiltered fit keeps the noise
  const GaussianARSurrogate raw = fit_surrogate(g, 12, 0.0);
  int nonzero = 0;
  for (double c : raw.phi.phi)
    if (c != 0.0) ++nonzero;
  CHECK(nonzero == 12);
}

TEST_CASE("fit_surrogate of pure noise can be coefficient-free") {
  SimSpec spec;
  spec.phi = {{0.0}};
  spec.n = 6000;
  spec.seed = 15;
  const GrowthSeries g = simulate(spec);
  const GaussianARSurrogate s = fit_surrogate(g, 8, 4.0);
  for (double c : s.phi.phi) CHECK(c == 0.0);
  // a zero surrogate is iid: the state chain forgets everything at lag q
  CHECK(beta_arq(s, 8, 32, 5, 2000) == 0.0);
}

TEST_CASE("plan_blocks with an iid profile keeps eta intact") {
  MixingProfile profile;
  profile.surrogate = {{{0.0}}, 1.0};
  for (int m : {1, 2, 3, 4}) profile.betas[m] = 0.0;
  const auto choices = plan_blocks(100, 0.05, profile);
  REQUIRE(choices.size() == 4);
  for (const auto& c : choices) {
    CHECK(c.feasible);
    CHECK(c.eta_prime == 0.05);
    CHECK(c.mu == 100 / (2 * static_cast<std::size_t>(c.m)));
    CHECK(2 * c.mu * static_cast<std::size_t>(c.m) <= 100);
  }
}

TEST_CASE("plan_blocks flags beta = eta as infeasible whenever mu >= 2") {
  MixingProfile profile;
  for (int m : {1, 2, 5}) profile.betas[m] = 0.05;
  const auto choices = plan_blocks(40, 0.05, profile);
  for (const auto& c : choices) {
    if (c.mu >= 2) {
      CHECK_FALSE(c.feasible);
      CHECK(c.eta_prime == Catch::Approx(0.05 - 4.0 * (double(c.mu) - 1) * 0.05));
    }
  }
}

TEST_CASE("plan_blocks computes the adjusted level exactly") {
  MixingProfile profile;
  profile.betas[3] = 1e-4;
  const auto choices = plan_blocks(60, 0.1, profile);
  REQUIRE(choices.size() == 1);
  CHECK(choices[0].mu == 10);
  CHECK(choices[0].eta_prime == Catch::Approx(0.1 - 4.0 * 9.0 * 1e-4).epsilon(1e-14));
  CHECK(choices[0].leftover == 0);
}
