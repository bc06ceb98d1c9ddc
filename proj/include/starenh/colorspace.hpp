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

#include <array>
#include <span>

#include "starenh/image.hpp"

namespace starenh::colorspace {

/// CIELab planes (L, a, b) stored in the image's three channels.
using LabImage = BasicImage<double>;

/// sRGB (IEC 61966-2-1 transfer, D65) to CIELab. Inputs are clamped to
/// [0, 1] first. The white point is the XYZ of sRGB (1, 1, 1) under the
/// conversion matrix, so white maps to exactly L = 100.
std::array<double, 3> srgb_to_lab(double r, double g, double b);
LabImage srgb_to_lab(const ImageD& image);

/// Mean absolute CIELab difference over every pixel and channel.
double lab_l1_loss(const ImageD& a, const ImageD& b);

/// Batched kernel behind lab_l1_loss. `a` and `b` hold consecutive blocks of
/// three planes of `plane` pixels each. When `grad_a` is non-empty it
/// receives d(loss)/d(a) (overwritten); the clamp is treated as identity in
/// the backward pass and the L1 subgradient at zero difference is zero.
double lab_l1_loss(std::span<const double> a, std::span<const double> b, size_t plane,
                   std::span<double> grad_a = {});

}  // namespace starenh::colorspace
