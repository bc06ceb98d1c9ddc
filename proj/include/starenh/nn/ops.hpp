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

#include "starenh/enhancer.hpp"
#include "starenh/nn/autograd.hpp"

namespace starenh::nn {

inline constexpr double kSigmaMin = 1e-3;

/// 2-D convolution. x: [B, Ci, H, W], weight: [Co, Ci, k, k], bias: [Co] or
/// null. Zero padding.
Var conv2d(const Var& x, const Var& weight, const Var& bias, int stride, int pad);

Var relu(const Var& x);
Var add(const Var& a, const Var& b);
/// x + s and x * s for a one-element tensor s.
Var add_scalar(const Var& x, const Var& s);
Var mul_scalar(const Var& x, const Var& s);

/// [B, C, H, W] -> [B, C].
Var global_avg_pool(const Var& x);

/// x: [B, I], weight: [O, I], bias: [O] or null -> [B, O].
Var linear(const Var& x, const Var& weight, const Var& bias);

/// Columns [offset, offset + len) of a [B, N] tensor.
Var slice_cols(const Var& x, int offset, int len);

/// max(1 + raw, kSigmaMin); the gradient is zero where the floor is active.
Var sigma_from_raw(const Var& raw);

/// F' = sigma_b * (F - mu_a) / sigma_a + mu_b per batch element and channel.
/// F: [B, C, H, W] or [B, C]; codes: [B, C]. Uses no statistics of F.
Var dual_adain(const Var& f, const Var& mu_a, const Var& sigma_a, const Var& mu_b, const Var& sigma_b);

Var sum(const Var& x);
Var mean(const Var& x);

/// Batch mean of -log softmax(s * cos(f_b, w_q))_{label_b}. f: [B, E], w: [Q, E].
Var normalized_softmax_loss(const Var& f, const Var& w, std::span<const int> labels, double scale);

/// O = I + R for a batch: image [B, 3, H, W] (constant), knots u [B, total]
/// split per `layout`. The lookup is a gather; its gradient scatter-adds into
/// the sampled tables and chains through the interpolation into the knots.
Var render_enhance(const Var& image, const Var& u, const CurveLayout& layout, int depth);

/// Mean CIELab L1 distance between pred [B, 3, H, W] and a constant target.
Var lab_l1(const Var& pred, const Var& target);

}  // namespace starenh::nn
