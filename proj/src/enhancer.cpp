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

#include "starenh/enhancer.hpp"

#include <cmath>

#include "starenh/parallel.hpp"

namespace starenh {

namespace {

constexpr const char* kSourceNames[5] = {"r", "g", "b", "x", "y"};
constexpr const char* kOutputNames[3] = {"r", "g", "b"};

template <class T>
std::vector<T> coordinate_table(const curves::CurveKnots& knots, int length) {
  // A single row or column only ever indexes position 0.
  if (length == 1) return {static_cast<T>(knots[0])};
  std::vector<T> table(static_cast<size_t>(length));
  curves::sample_curve_into<T>(knots.values(), table);
  return table;
}

template <class T>
void check_luts(const BasicImage<T>& image, const LutSet<T>& luts) {
  require(image.height == luts.height && image.width == luts.width,
          "image size does not match the lookup tables");
  const size_t colors = size_t{1} << luts.depth;
  for (int i = 0; i < kCurveCount; ++i) {
    const size_t want = is_coordinate_curve(i) ? (i / 3 == static_cast<int>(Source::kX)
                                                      ? static_cast<size_t>(luts.width)
                                                      : static_cast<size_t>(luts.height))
                                               : colors;
    require(luts.tables[static_cast<size_t>(i)].size() == want, "lookup table has the wrong length");
  }
}

// Shared row kernel. When `add_input` is set the input is added to the
// residual, giving O = R + I with the same rounding as a separate add.
template <class T, bool kAddInput, bool kClamp>
void render_rows(const BasicImage<T>& image, const LutSet<T>& luts, BasicImage<T>& out, int row_begin, int row_end) {
  const int w = image.width;
  const size_t plane = image.plane_size();
  const int max_index = (1 << luts.depth) - 1;
  const T scale = static_cast<T>(max_index);
  const T* cr[3];
  const T* cg[3];
  const T* cb[3];
  const T* cx[3];
  for (int j = 0; j < 3; ++j) {
    cr[j] = luts.table(0, j).data();
    cg[j] = luts.table(1, j).data();
    cb[j] = luts.table(2, j).data();
    cx[j] = luts.table(static_cast<int>(Source::kX), j).data();
  }
  const T* __restrict in_r = image.data.data();
  const T* __restrict in_g = in_r + plane;
  const T* __restrict in_b = in_g + plane;
  T* __restrict out_r = out.data.data();
  T* __restrict out_g = out_r + plane;
  T* __restrict out_b = out_g + plane;
  T* const outs[3] = {out_r, out_g, out_b};
  const T* const ins[3] = {in_r, in_g, in_b};
  std::vector<int> idx(static_cast<size_t>(w) * 3);
  int* __restrict ir = idx.data();
  int* __restrict ig = ir + w;
  int* __restrict ib = ig + w;
  for (int y = row_begin; y < row_end; ++y) {
    const size_t row = static_cast<size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      ir[x] = color_index(in_r[row + x], scale, max_index);
      ig[x] = color_index(in_g[row + x], scale, max_index);
      ib[x] = color_index(in_b[row + x], scale, max_index);
    }
    for (int j = 0; j < 3; ++j) {
      const T* __restrict tr = cr[j];
      const T* __restrict tg = cg[j];
      const T* __restrict tb = cb[j];
      const T* __restrict tx = cx[j];
      const T* __restrict src = ins[j] + row;
      T* __restrict dst = outs[j] + row;
      const T ry = luts.table(static_cast<int>(Source::kY), j)[static_cast<size_t>(y)];
      for (int x = 0; x < w; ++x) {
        T v = tr[ir[x]] + tg[ig[x]] + tb[ib[x]] + ry + tx[x];
        if constexpr (kAddInput) v = v + src[x];
        if constexpr (kClamp) v = std::clamp(v, T(0), T(1));
        dst[x] = v;
      }
    }
  }
}

template <class T>
void render_rows(const BasicImage<T>& image, const LutSet<T>& luts, BasicImage<T>& out, bool add_input, bool clamp,
                 int row_begin, int row_end) {
  if (!add_input) render_rows<T, false, false>(image, luts, out, row_begin, row_end);
  else if (clamp) render_rows<T, true, true>(image, luts, out, row_begin, row_end);
  else render_rows<T, true, false>(image, luts, out, row_begin, row_end);
}

}  // namespace

std::string curve_name(int index) {
  require(index >= 0 && index < kCurveCount, "curve index out of range");
  return std::string(kSourceNames[index / 3]) + "_to_" + kOutputNames[index % 3];
}

int parse_curve_name(const std::string& name) {
  for (int i = 0; i < kCurveCount; ++i)
    if (curve_name(i) == name) return i;
  throw_invalid("unknown curve name '" + name + "'");
}

CurveLayout CurveLayout::uniform(int color_knots, int coord_knots) {
  require(color_knots >= 2 && coord_knots >= 2, "curves need at least two knots");
  CurveLayout layout;
  for (int i = 0; i < kCurveCount; ++i)
    layout.knots[static_cast<size_t>(i)] = is_coordinate_curve(i) ? coord_knots : color_knots;
  return layout;
}

int CurveLayout::total() const {
  int n = 0;
  for (int k : knots) n += k;
  return n;
}

int CurveLayout::offset(int index) const {
  int n = 0;
  for (int i = 0; i < index; ++i) n += knots[static_cast<size_t>(i)];
  return n;
}

CurveSet::CurveSet(std::array<curves::CurveKnots, kCurveCount> curves) : curves_(std::move(curves)) {
  for (const auto& c : curves_) require(c.size() >= 2, "every curve needs at least two knots");
}

CurveSet CurveSet::zeros(const CurveLayout& layout) {
  std::array<curves::CurveKnots, kCurveCount> c;
  for (int i = 0; i < kCurveCount; ++i)
    c[static_cast<size_t>(i)] =
        curves::CurveKnots(std::vector<double>(static_cast<size_t>(layout.knots[static_cast<size_t>(i)]), 0.0));
  return CurveSet(std::move(c));
}

CurveSet CurveSet::from_vector(std::span<const double> u, const CurveLayout& layout) {
  require(u.size() == static_cast<size_t>(layout.total()), "knot vector length does not match layout");
  std::array<curves::CurveKnots, kCurveCount> c;
  size_t off = 0;
  for (int i = 0; i < kCurveCount; ++i) {
    const auto m = static_cast<size_t>(layout.knots[static_cast<size_t>(i)]);
    c[static_cast<size_t>(i)] = curves::CurveKnots(std::vector<double>(u.begin() + off, u.begin() + off + m));
    off += m;
  }
  return CurveSet(std::move(c));
}

std::vector<double> CurveSet::to_vector() const {
  std::vector<double> u;
  for (const auto& c : curves_) u.insert(u.end(), c.values().begin(), c.values().end());
  return u;
}

CurveLayout CurveSet::layout() const {
  CurveLayout layout;
  for (int i = 0; i < kCurveCount; ++i) layout.knots[static_cast<size_t>(i)] = at(i).size();
  return layout;
}

SliderSettings SliderSettings::all(double value) {
  SliderSettings s;
  s.beta.fill(value);
  return s;
}

void SliderSettings::validate() const {
  for (double b : beta)
    if (!(std::isfinite(b) && b >= kSliderMin && b <= kSliderMax))
      throw Error(ErrorKind::kDomain, "slider value outside [0, 2]");
}

template <class T>
LutSet<T> build_lut_set(const CurveSet& curves, int depth, int height, int width) {
  require(depth >= 1 && depth <= 16, "lookup depth must be between 1 and 16 bits");
  require(height >= 1 && width >= 1, "image dimensions must be positive");
  LutSet<T> luts;
  luts.depth = depth;
  luts.height = height;
  luts.width = width;
  const int colors = 1 << depth;
  for (int i = 0; i < kCurveCount; ++i) {
    auto& table = luts.tables[static_cast<size_t>(i)];
    const auto& knots = curves.at(i);
    if (i / 3 == static_cast<int>(Source::kX)) {
      table = coordinate_table<T>(knots, width);
    } else if (i / 3 == static_cast<int>(Source::kY)) {
      table = coordinate_table<T>(knots, height);
    } else {
      table.resize(static_cast<size_t>(colors));
      curves::sample_curve_into<T>(knots.values(), table);
    }
  }
  return luts;
}

template <class T>
BasicImage<T> render_residual(const BasicImage<T>& image, const LutSet<T>& luts, int workers) {
  check_luts(image, luts);
  BasicImage<T> out(image.height, image.width, image.bit_depth);
  parallel_for(image.height, workers, [&](int begin, int end) {
    render_rows(image, luts, out, false, false, begin, end);
  });
  return out;
}

template <class T>
BasicImage<T> enhance(const BasicImage<T>& image, const LutSet<T>& luts, bool clamp, int workers) {
  check_luts(image, luts);
  BasicImage<T> out(image.height, image.width, image.bit_depth);
  parallel_for(image.height, workers, [&](int begin, int end) {
    render_rows(image, luts, out, true, clamp, begin, end);
  });
  return out;
}

template <class T>
BasicImage<T> enhance(const BasicImage<T>& image, const CurveSet& curves, int depth, bool clamp,
                      int workers) {
  return enhance(image, build_lut_set<T>(curves, depth, image.height, image.width), clamp, workers);
}

CurveSet apply_sliders(const CurveSet& curves, const SliderSettings& sliders) {
  sliders.validate();
  CurveSet out = curves;
  for (int i = 0; i < kCurveCount; ++i)
    out.mutable_at(i) = curves.at(i).scaled(sliders.beta[static_cast<size_t>(i)]);
  return out;
}

CurveSet set_knot(CurveSet curves, int source, int output, int k, double value) {
  require(source >= 0 && source < 5 && output >= 0 && output < 3, "curve channel out of range");
  curves.mutable_at(curve_index(source, output)).set(k, value);
  return curves;
}

#define STARENH_INSTANTIATE(T)                                                                  \
  template LutSet<T> build_lut_set<T>(const CurveSet&, int, int, int);                          \
  template BasicImage<T> render_residual<T>(const BasicImage<T>&, const LutSet<T>&, int);       \
  template BasicImage<T> enhance<T>(const BasicImage<T>&, const LutSet<T>&, bool, int);         \
  template BasicImage<T> enhance<T>(const BasicImage<T>&, const CurveSet&, int, bool, int);

STARENH_INSTANTIATE(float)
STARENH_INSTANTIATE(double)

#undef STARENH_INSTANTIATE

}  // namespace starenh
