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

#include <algorithm>
#include <array>
#include <span>
#include <string>
#include <vector>

#include "starenh/curves.hpp"
#include "starenh/image.hpp"

namespace starenh {

/// Input channels of the curve grid. Output channels are r, g, b (0..2).
enum class Source : int { kR = 0, kG = 1, kB = 2, kX = 3, kY = 4 };

inline constexpr int kCurveCount = 15;
inline constexpr int kDefaultDepth = 8;

/// Curves are stored source-major: index = source * 3 + output, which is
/// also the order the curve encoder emits its knot vector in.
constexpr int curve_index(int source, int output) { return source * 3 + output; }
constexpr bool is_coordinate_curve(int index) { return index / 3 >= 3; }

/// "r_to_g" style name for a curve index; parse_curve_name is its inverse.
std::string curve_name(int index);
int parse_curve_name(const std::string& name);

/// Knot count per curve.
struct CurveLayout {
  std::array<int, kCurveCount> knots{};

  static CurveLayout uniform(int color_knots = 17, int coord_knots = 9);
  int total() const;
  int offset(int index) const;

  friend bool operator==(const CurveLayout&, const CurveLayout&) = default;
};

class CurveSet {
 public:
  CurveSet() = default;
  explicit CurveSet(std::array<curves::CurveKnots, kCurveCount> curves);

  static CurveSet zeros(const CurveLayout& layout);
  /// Splits a flat knot vector (as emitted by the curve encoder).
  static CurveSet from_vector(std::span<const double> u, const CurveLayout& layout);
  std::vector<double> to_vector() const;

  CurveLayout layout() const;
  const curves::CurveKnots& at(int index) const { return curves_[static_cast<size_t>(index)]; }
  const curves::CurveKnots& at(int source, int output) const { return at(curve_index(source, output)); }
  curves::CurveKnots& mutable_at(int index) { return curves_[static_cast<size_t>(index)]; }

  friend bool operator==(const CurveSet&, const CurveSet&) = default;

 private:
  std::array<curves::CurveKnots, kCurveCount> curves_;
};

/// Per-curve contribution scales, each in [0, 2].
struct SliderSettings {
  std::array<double, kCurveCount> beta;

  SliderSettings() { beta.fill(1.0); }
  static SliderSettings all(double value);
  void validate() const;

  friend bool operator==(const SliderSettings&, const SliderSettings&) = default;
};

inline constexpr double kSliderMin = 0.0;
inline constexpr double kSliderMax = 2.0;

/// Dense tables for one render. Colour curves have 2^depth entries, x curves
/// `width` entries and y curves `height` entries.
template <class T>
struct LutSet {
  int depth = kDefaultDepth;
  int height = 0;
  int width = 0;
  std::array<std::vector<T>, kCurveCount> tables;

  const std::vector<T>& table(int source, int output) const {
    return tables[static_cast<size_t>(curve_index(source, output))];
  }
};

template <class T>
LutSet<T> build_lut_set(const CurveSet& curves, int depth, int height, int width);

/// Residual R of the five-term lookup sum for every pixel and output channel.
/// `workers` > 1 splits rows across threads; the result does not depend on it.
template <class T>
BasicImage<T> render_residual(const BasicImage<T>& image, const LutSet<T>& luts, int workers = 1);

/// O = R + I, optionally clamped to [0, 1].
template <class T>
BasicImage<T> enhance(const BasicImage<T>& image, const LutSet<T>& luts, bool clamp, int workers = 1);

template <class T>
BasicImage<T> enhance(const BasicImage<T>& image, const CurveSet& curves, int depth, bool clamp,
                      int workers = 1);

/// u'_{i,j} = beta_{i,j} * u_{i,j}.
CurveSet apply_sliders(const CurveSet& curves, const SliderSettings& sliders);

CurveSet set_knot(CurveSet curves, int source, int output, int k, double value);

/// Colour table index for a value: floor(v * (2^depth - 1)) clamped to the table.
template <class T>
inline int color_index(T v, T scale, int max_index) {
  const T s = std::min(std::max(v * scale, T(0)), static_cast<T>(max_index));
  return static_cast<int>(s);
}

}  // namespace starenh
