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

#include "starenh/image.hpp"

#include <cmath>

namespace starenh {

namespace {

struct Tap {
  int i0, i1;
  double w1;
};

std::vector<Tap> taps(int in, int out) {
  std::vector<Tap> t(static_cast<size_t>(out));
  const double scale = static_cast<double>(in) / out;
  for (int o = 0; o < out; ++o) {
    double src = (o + 0.5) * scale - 0.5;
    src = std::clamp(src, 0.0, static_cast<double>(in - 1));
    const int i0 = static_cast<int>(std::floor(src));
    const int i1 = std::min(i0 + 1, in - 1);
    t[static_cast<size_t>(o)] = {i0, i1, src - i0};
  }
  return t;
}

}  // namespace

template <class T>
BasicImage<T> resize_bilinear(const BasicImage<T>& in, int out_h, int out_w) {
  require(out_h >= 1 && out_w >= 1, "resize target must be positive");
  BasicImage<T> out(out_h, out_w, in.bit_depth);
  const auto ty = taps(in.height, out_h);
  const auto tx = taps(in.width, out_w);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < out_h; ++y) {
      const Tap& a = ty[static_cast<size_t>(y)];
      for (int x = 0; x < out_w; ++x) {
        const Tap& b = tx[static_cast<size_t>(x)];
        const double top = in.at(c, a.i0, b.i0) * (1.0 - b.w1) + in.at(c, a.i0, b.i1) * b.w1;
        const double bot = in.at(c, a.i1, b.i0) * (1.0 - b.w1) + in.at(c, a.i1, b.i1) * b.w1;
        out.at(c, y, x) = static_cast<T>(top * (1.0 - a.w1) + bot * a.w1);
      }
    }
  }
  return out;
}

template BasicImage<float> resize_bilinear(const BasicImage<float>&, int, int);
template BasicImage<double> resize_bilinear(const BasicImage<double>&, int, int);

}  // namespace starenh
