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

#include "starenh/colorspace.hpp"

#include <cmath>

namespace starenh::colorspace {

namespace {

constexpr double kM[3][3] = {
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
};

constexpr double kWhite[3] = {
    kM[0][0] + kM[0][1] + kM[0][2],
    kM[1][0] + kM[1][1] + kM[1][2],
    kM[2][0] + kM[2][1] + kM[2][2],
};

constexpr double kDelta = 6.0 / 29.0;
constexpr double kDelta3 = kDelta * kDelta * kDelta;
constexpr double kLinSlope = 1.0 / (3.0 * kDelta * kDelta);

double to_linear(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double to_linear_deriv(double c) {
  return c <= 0.04045 ? 1.0 / 12.92 : 2.4 / 1.055 * std::pow((c + 0.055) / 1.055, 1.4);
}

double lab_f(double t) { return t > kDelta3 ? std::cbrt(t) : t * kLinSlope + 4.0 / 29.0; }

double lab_f_deriv(double t) {
  if (t > kDelta3) {
    const double c = std::cbrt(t);
    return 1.0 / (3.0 * c * c);
  }
  return kLinSlope;
}

struct PixelLab {
  double lab[3];
  double f[3];
  double t[3];
  double lin_deriv[3];
};

PixelLab convert(const double rgb[3], bool want_deriv) {
  PixelLab p{};
  double lin[3];
  for (int c = 0; c < 3; ++c) {
    require(std::isfinite(rgb[c]), "non-finite pixel value");
    const double v = std::clamp(rgb[c], 0.0, 1.0);
    lin[c] = to_linear(v);
    if (want_deriv) p.lin_deriv[c] = to_linear_deriv(v);
  }
  for (int r = 0; r < 3; ++r) {
    const double xyz = kM[r][0] * lin[0] + kM[r][1] * lin[1] + kM[r][2] * lin[2];
    p.t[r] = xyz / kWhite[r];
    p.f[r] = lab_f(p.t[r]);
  }
  p.lab[0] = 116.0 * p.f[1] - 16.0;
  p.lab[1] = 500.0 * (p.f[0] - p.f[1]);
  p.lab[2] = 200.0 * (p.f[1] - p.f[2]);
  return p;
}

double sign(double d) { return d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0); }

}  // namespace

std::array<double, 3> srgb_to_lab(double r, double g, double b) {
  const double rgb[3] = {r, g, b};
  const PixelLab p = convert(rgb, false);
  return {p.lab[0], p.lab[1], p.lab[2]};
}

LabImage srgb_to_lab(const ImageD& image) {
  LabImage out(image.height, image.width, image.bit_depth);
  const size_t n = image.plane_size();
  for (size_t i = 0; i < n; ++i) {
    const double rgb[3] = {image.data[i], image.data[n + i], image.data[2 * n + i]};
    const PixelLab p = convert(rgb, false);
    for (int c = 0; c < 3; ++c) out.data[c * n + i] = p.lab[c];
  }
  return out;
}

double lab_l1_loss(const ImageD& a, const ImageD& b) {
  require(a.same_size(b), "lab_l1_loss: image dimensions differ");
  return lab_l1_loss(a.data, b.data, a.plane_size());
}

double lab_l1_loss(std::span<const double> a, std::span<const double> b, size_t plane,
                   std::span<double> grad_a) {
  require(plane > 0 && a.size() == b.size() && a.size() % (3 * plane) == 0,
          "lab_l1_loss: buffer sizes do not match");
  const bool want_grad = !grad_a.empty();
  if (want_grad) require(grad_a.size() == a.size(), "lab_l1_loss: gradient size mismatch");
  const size_t blocks = a.size() / (3 * plane);
  const double inv_count = 1.0 / static_cast<double>(a.size());
  double total = 0.0;
  for (size_t blk = 0; blk < blocks; ++blk) {
    const size_t base = blk * 3 * plane;
    for (size_t i = 0; i < plane; ++i) {
      const double pa[3] = {a[base + i], a[base + plane + i], a[base + 2 * plane + i]};
      const double pb[3] = {b[base + i], b[base + plane + i], b[base + 2 * plane + i]};
      const PixelLab la = convert(pa, want_grad);
      const PixelLab lb = convert(pb, false);
      double diff_sign[3];
      for (int c = 0; c < 3; ++c) {
        const double d = la.lab[c] - lb.lab[c];
        total += std::abs(d);
        diff_sign[c] = sign(d);
      }
      if (!want_grad) continue;
      // d(L, a, b) / d(f_x, f_y, f_z)
      const double gf[3] = {
          500.0 * diff_sign[1],
          116.0 * diff_sign[0] - 500.0 * diff_sign[1] + 200.0 * diff_sign[2],
          -200.0 * diff_sign[2],
      };
      double gxyz[3];
      for (int r = 0; r < 3; ++r) gxyz[r] = gf[r] * lab_f_deriv(la.t[r]) / kWhite[r];
      for (int c = 0; c < 3; ++c) {
        const double glin = kM[0][c] * gxyz[0] + kM[1][c] * gxyz[1] + kM[2][c] * gxyz[2];
        grad_a[base + c * plane + i] = glin * la.lin_deriv[c] * inv_count;
      }
    }
  }
  return total * inv_count;
}

}  // namespace starenh::colorspace
