//  Copyright 2026 The starenh Authors
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.

#include "starenh/curves.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "starenh/error.hpp"

namespace starenh::curves {

namespace {

void check_knots(std::span<const double> u) {
  require(u.size() >= 2, "curve needs at least two knots");
  for (double v : u) require(std::isfinite(v), "curve knot is not finite");
}

double interior_slope(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return 2.0 * a * b / (a + b);
}

double slope_at(std::span<const double> u, size_t k) {
  const size_t m = u.size();
  if (k == 0) return u[1] - u[0];
  if (k == m - 1) return u[m - 1] - u[m - 2];
  return interior_slope(u[k] - u[k - 1], u[k + 1] - u[k]);
}

// Partial derivatives of slope k with respect to knots k-1, k, k+1.
std::array<double, 3> slope_partials(std::span<const double> u, size_t k) {
  const size_t m = u.size();
  if (k == 0) return {0.0, -1.0, 1.0};
  if (k == m - 1) return {-1.0, 1.0, 0.0};
  const double a = u[k] - u[k - 1];
  const double b = u[k + 1] - u[k];
  if (a * b <= 0.0) return {0.0, 0.0, 0.0};
  const double denom = (a + b) * (a + b);
  const double da = 2.0 * b * b / denom;
  const double db = 2.0 * a * a / denom;
  return {-da, da - db, db};
}

struct Segment {
  size_t k;
  double tau;
};

Segment locate(size_t m, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::kDomain, "curve position outside [0, 1]");
  const double span = static_cast<double>(m - 1);
  double s = t * span;
  // Snap positions that land a rounding error away from a knot onto it so
  // that sampling on the knot grid reproduces the knots exactly.
  const double r = std::nearbyint(s);
  if (std::abs(s - r) <= 8.0 * std::numeric_limits<double>::epsilon() * span) s = r;
  const size_t k = std::min(static_cast<size_t>(s), m - 2);
  return {k, s - static_cast<double>(k)};
}

struct Basis {
  double h00, h10, h01, h11;
};

Basis hermite_basis(double tau) {
  const double one_m = 1.0 - tau;
  return {(1.0 + 2.0 * tau) * one_m * one_m, tau * one_m * one_m, tau * tau * (3.0 - 2.0 * tau),
          tau * tau * (tau - 1.0)};
}

double hermite(std::span<const double> u, std::span<const double> slopes, double t) {
  const auto [k, tau] = locate(u.size(), t);
  const Basis h = hermite_basis(tau);
  return h.h00 * u[k] + h.h10 * slopes[k] + h.h01 * u[k + 1] + h.h11 * slopes[k + 1];
}

void accumulate_gradient(std::span<const double> u, double t, double upstream,
                         std::span<double> grad_u) {
  const auto [k, tau] = locate(u.size(), t);
  const Basis h = hermite_basis(tau);
  grad_u[k] += upstream * h.h00;
  grad_u[k + 1] += upstream * h.h01;
  const auto pk = slope_partials(u, k);
  const auto pk1 = slope_partials(u, k + 1);
  for (int d = -1; d <= 1; ++d) {
    const auto a = static_cast<std::ptrdiff_t>(k) + d;
    const auto b = static_cast<std::ptrdiff_t>(k + 1) + d;
    if (a >= 0 && pk[d + 1] != 0.0) grad_u[static_cast<size_t>(a)] += upstream * h.h10 * pk[d + 1];
    if (b < static_cast<std::ptrdiff_t>(u.size()) && pk1[d + 1] != 0.0)
      grad_u[static_cast<size_t>(b)] += upstream * h.h11 * pk1[d + 1];
  }
}

double sample_position(int k, int n) {
  return static_cast<double>(k) / static_cast<double>(n - 1);
}

}  // namespace

CurveKnots::CurveKnots(std::vector<double> values) : values_(std::move(values)) {
  check_knots(values_);
}

void CurveKnots::set(int k, double value) {
  require(k >= 0 && k < size(), "knot index out of bounds");
  require(std::isfinite(value), "knot value is not finite");
  values_[static_cast<size_t>(k)] = value;
}

CurveKnots CurveKnots::scaled(double beta) const {
  CurveKnots out = *this;
  for (double& v : out.values_) v *= beta;
  return out;
}

std::vector<double> monotone_slopes(std::span<const double> knots) {
  check_knots(knots);
  std::vector<double> m(knots.size());
  for (size_t k = 0; k < knots.size(); ++k) m[k] = slope_at(knots, k);
  return m;
}

double eval_curve(std::span<const double> knots, double t) {
  const auto slopes = monotone_slopes(knots);
  return hermite(knots, slopes, t);
}

std::vector<double> sample_curve(std::span<const double> knots, int n) {
  std::vector<double> out(static_cast<size_t>(std::max(n, 0)));
  sample_curve_into<double>(knots, out);
  return out;
}

template <class T>
void sample_curve_into(std::span<const double> knots, std::span<T> out) {
  const int n = static_cast<int>(out.size());
  require(n >= 2, "curve sample count must be at least 2");
  const auto slopes = monotone_slopes(knots);
  for (int k = 0; k < n; ++k)
    out[static_cast<size_t>(k)] = static_cast<T>(hermite(knots, slopes, sample_position(k, n)));
}

template void sample_curve_into<float>(std::span<const double>, std::span<float>);
template void sample_curve_into<double>(std::span<const double>, std::span<double>);

void sample_curve_backward(std::span<const double> knots, std::span<const double> grad_v,
                           std::span<double> grad_u) {
  check_knots(knots);
  const int n = static_cast<int>(grad_v.size());
  require(n >= 2, "curve sample count must be at least 2");
  require(grad_u.size() == knots.size(), "knot gradient size mismatch");
  for (int k = 0; k < n; ++k) {
    const double g = grad_v[static_cast<size_t>(k)];
    if (g != 0.0) accumulate_gradient(knots, sample_position(k, n), g, grad_u);
  }
}

std::vector<double> eval_curve_gradient(std::span<const double> knots, double t) {
  check_knots(knots);
  std::vector<double> grad(knots.size(), 0.0);
  accumulate_gradient(knots, t, 1.0, grad);
  return grad;
}

}  // namespace starenh::curves
