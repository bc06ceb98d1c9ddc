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

#include "starenh/nn/optim.hpp"

#include <cmath>

namespace starenh::nn {

void Adam::add_group(const std::vector<Var>& params, double lr_multiplier) {
  require(lr_multiplier > 0, "learning-rate multiplier must be positive");
  for (const Var& p : params) {
    require(p && p->requires_grad, "optimizer parameters must require gradients");
    for (const Slot& s : slots_) require(s.param != p, "parameter registered twice");
    slots_.push_back({p, lr_multiplier, std::vector<double>(p->value.size()), std::vector<double>(p->value.size())});
  }
}

void Adam::step(double lr) {
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (Slot& s : slots_) {
    Tensor& g = s.param->grad_buffer();
    auto& w = s.param->value.values();
    const double a = lr * s.multiplier;
    for (size_t i = 0; i < w.size(); ++i) {
      s.m[i] = config_.beta1 * s.m[i] + (1 - config_.beta1) * g[i];
      s.v[i] = config_.beta2 * s.v[i] + (1 - config_.beta2) * g[i] * g[i];
      w[i] -= a * (s.m[i] / c1) / (std::sqrt(s.v[i] / c2) + config_.eps);
    }
    g.fill(0.0);
  }
}

}  // namespace starenh::nn
