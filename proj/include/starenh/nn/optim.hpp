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

#include <vector>

#include "starenh/nn/autograd.hpp"

namespace starenh::nn {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam over parameter groups; each group scales the step's learning rate.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  void add_group(const std::vector<Var>& params, double lr_multiplier = 1.0);
  /// One update from the accumulated gradients, then clears them.
  void step(double lr);
  long steps() const { return t_; }

 private:
  struct Slot {
    Var param;
    double multiplier;
    std::vector<double> m, v;
  };
  AdamConfig config_;
  std::vector<Slot> slots_;
  long t_ = 0;
};

}  // namespace starenh::nn
