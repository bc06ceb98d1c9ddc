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

#pragma once

#include <span>
#include <vector>

namespace starenh::curves {

/// Ordinates of a curve at uniform abscissae t_k = k / (M - 1) on [0, 1].
class CurveKnots {
 public:
  CurveKnots() = default;
  explicit CurveKnots(std::vector<double> values);

  int size() const { return static_cast<int>(values_.size()); }
  std::span<const double> values() const { return values_; }
  double operator[](int k) const { return values_[static_cast<size_t>(k)]; }

  void set(int k, double value);
  CurveKnots scaled(double beta) const;

  friend bool operator==(const CurveKnots&, const CurveKnots&) = default;

 private:
  std::vector<double> values_;
};

/// Fritsch-Carlson tangents in per-knot-step units: harmonic mean of the
/// adjacent secants inside, one-sided secant at the ends, zero where the
/// secants disagree in sign or either vanishes.
std::vector<double> monotone_slopes(std::span<const double> knots);

/// Continuous monotone cubic Hermite interpolant; t must lie in [0, 1].
double eval_curve(std::span<const double> knots, double t);

/// Dense resampling S^{M,N}: v_k = eval_curve(u, k / (N - 1)).
std::vector<double> sample_curve(std::span<const double> knots, int n);

/// Same as sample_curve but writes into `out` (size N) in the caller's
/// scalar type; entries are the double samples cast to T.
template <class T>
void sample_curve_into(std::span<const double> knots, std::span<T> out);

/// Accumulates grad_u += J^T grad_v where J = d sample_curve(u, N) / du.
/// At the zero-tangent clamps the derivative of the active branch is used.
void sample_curve_backward(std::span<const double> knots, std::span<const double> grad_v,
                           std::span<double> grad_u);

/// Derivative of eval_curve(u, t) with respect to each knot.
std::vector<double> eval_curve_gradient(std::span<const double> knots, double t);

}  // namespace starenh::curves
