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

// Test-only reference implementations, deliberately independent of the
// library code paths they are used to check.

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracles {

// Durand-Kerner simultaneous iteration for the roots of a monic real
// polynomial z^p + c[0] z^(p-1) + ... + c[p-1]. Adequate for simple roots;
// do not use on polynomials with multiplicities.
inline std::vector<std::complex<double>> poly_roots(const std::vector<double>& c) {
  const std::size_t p = c.size();
  std::vector<std::complex<double>> z(p);
  const std::complex<double> gen(0.4, 0.9);
  std::complex<double> acc(1.0, 0.0);
  for (std::size_t i = 0; i < p; ++i) {
    acc *= gen;
    z[i] = acc;
  }
  auto eval = [&](std::complex<double> x) {
    std::complex<double> v(1.0, 0.0);
    for (std::size_t i = 0; i < p; ++i) v = v * x + c[i];
    return v;
  };
  for (int iter = 0; iter < 500; ++iter) {
    double shift = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
      std::complex<double> denom(1.0, 0.0);
      for (std::size_t j = 0; j < p; ++j)
        if (j != i) denom *= z[i] - z[j];
      const std::complex<double> delta = eval(z[i]) / denom;
      z[i] -= delta;
      shift = std::max(shift, std::abs(delta));
    }
    if (shift < 1e-14) break;
  }
  return z;
}

// Spectral radius of Q_p(z) = z^p - phi_1 z^(p-1) - ... - phi_p.
inline double root_radius(const std::vector<double>& phi) {
  std::vector<double> c(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) c[i] = -phi[i];
  double r = 0.0;
  for (const auto& z : poly_roots(c)) r = std::max(r, std::abs(z));
  return r;
}

// Exact synthetic division of an integer monic polynomial by (z - root),
// root in {+1, -1}. Returns true and the quotient iff the remainder is
// exactly zero. Repeated exact deflation proves root locations even at high
// multiplicity, where floating root finders cannot.
inline bool deflate_exact(std::vector<std::int64_t>& coef, std::int64_t root) {
  std::vector<std::int64_t> q(coef.size() - 1);
  std::int64_t carry = coef[0];
  for (std::size_t i = 1; i < coef.size(); ++i) {
    q[i - 1] = carry;
    carry = coef[i] + root * carry;
  }
  if (carry != 0) return false;
  coef = std::move(q);
  return true;
}

// Composite Simpson rule.
inline double integrate(const std::function<double(double)>& f, double lo,
                        double hi, int panels) {
  const double h = (hi - lo) / (2 * panels);
  double acc = f(lo) + f(hi);
  for (int i = 1; i < 2 * panels; ++i)
    acc += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

inline double normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / var) / std::sqrt(2.0 * 3.14159265358979323846 * var);
}

inline double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

inline double lag1_autocorr(const std::vector<double>& v) {
  const double m = sample_mean(v);
  double num = 0.0, den = 0.0;
  for (std::size_t t = 0; t + 1 < v.size(); ++t)
    num += (v[t] - m) * (v[t + 1] - m);
  for (double x : v) den += (x - m) * (x - m);
  return num / den;
}

}  // namespace oracles
