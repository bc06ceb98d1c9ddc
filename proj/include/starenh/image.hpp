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
#include <cstddef>
#include <span>
#include <vector>

#include "starenh/error.hpp"

namespace starenh {

/// Planar three-channel image. Channel c, row y, column x lives at
/// data[(c * height + y) * width + x]. Values are nominally in [0, 1];
/// `bit_depth` records the source precision (8 or 16) for export.
template <class T>
struct BasicImage {
  int height = 0;
  int width = 0;
  int bit_depth = 8;
  std::vector<T> data;

  BasicImage() = default;
  BasicImage(int h, int w, int depth = 8, T fill = T(0)) : height(h), width(w), bit_depth(depth) {
    require(h >= 1 && w >= 1, "image dimensions must be positive");
    data.assign(static_cast<size_t>(3) * static_cast<size_t>(h) * static_cast<size_t>(w), fill);
  }

  size_t plane_size() const { return static_cast<size_t>(height) * static_cast<size_t>(width); }
  size_t pixel_count() const { return plane_size(); }

  T& at(int c, int y, int x) { return data[(static_cast<size_t>(c) * height + y) * width + x]; }
  T at(int c, int y, int x) const { return data[(static_cast<size_t>(c) * height + y) * width + x]; }

  std::span<T> channel(int c) { return std::span<T>(data).subspan(c * plane_size(), plane_size()); }
  std::span<const T> channel(int c) const {
    return std::span<const T>(data).subspan(c * plane_size(), plane_size());
  }

  bool same_size(const BasicImage& o) const { return height == o.height && width == o.width; }

  friend bool operator==(const BasicImage&, const BasicImage&) = default;
};

using Image = BasicImage<float>;
using ImageD = BasicImage<double>;

template <class To, class From>
BasicImage<To> image_cast(const BasicImage<From>& in) {
  BasicImage<To> out;
  out.height = in.height;
  out.width = in.width;
  out.bit_depth = in.bit_depth;
  out.data.assign(in.data.begin(), in.data.end());
  return out;
}

template <class T>
void clamp_unit(BasicImage<T>& img) {
  for (T& v : img.data) v = std::clamp(v, T(0), T(1));
}

/// Bilinear resampling with half-pixel centres (no antialiasing).
template <class T>
BasicImage<T> resize_bilinear(const BasicImage<T>& in, int out_h, int out_w);

}  // namespace starenh
