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

#include <functional>
#include <memory>
#include <vector>

#include "starenh/nn/tensor.hpp"

namespace starenh::nn {

struct Node;
using Var = std::shared_ptr<Node>;

/// One recorded value in a computation graph. Interior nodes own a closure
/// that pushes their gradient into their inputs.
struct Node {
  Tensor value;
  Tensor grad;
  bool requires_grad = false;
  bool is_leaf = true;
  std::vector<Var> inputs;
  std::function<void(Node&)> backward_fn;

  /// Gradient buffer of matching shape, allocated (zeroed) on first use.
  Tensor& grad_buffer();
};

/// Trainable leaf. Its gradient accumulates across backward() calls until
/// zero_grad() is called.
Var parameter(Tensor value);
/// Leaf that never receives a gradient.
Var constant(Tensor value);

/// Interior node helper used by the ops.
Var make_node(Tensor value, std::vector<Var> inputs, std::function<void(Node&)> backward_fn);

/// Reverse-mode sweep from a one-element root. Interior gradients are
/// recomputed from scratch on every call; parameter gradients accumulate.
void backward(const Var& root);

void zero_grad(const std::vector<Var>& params);

}  // namespace starenh::nn
