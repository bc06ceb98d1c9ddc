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

#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "starenh/error.hpp"

namespace starenh::nn {

/// Dense row-major tensor of up to four axes (batch, channel, height, width).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape, double fill = 0.0) : shape_(std::move(shape)) {
    require(shape_.size() <= 4, "tensors have at most four axes");
    for (int d : shape_) require(d >= 0, "negative tensor extent");
    values_.assign(count(shape_), fill);
  }
  Tensor(std::vector<int> shape, std::vector<double> values) : shape_(std::move(shape)), values_(std::move(values)) {
    require(values_.size() == count(shape_), "tensor value count does not match its shape");
  }

  static Tensor scalar(double v) { return Tensor({1}, std::vector<double>{v}); }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int axis) const { return shape_[static_cast<size_t>(axis)]; }
  size_t size() const { return values_.size(); }

  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }
  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double& operator[](size_t i) { return values_[i]; }
  double operator[](size_t i) const { return values_[i]; }

  void fill(double v) { std::fill(values_.begin(), values_.end(), v); }

  static size_t count(const std::vector<int>& shape) {
    return std::accumulate(shape.begin(), shape.end(), size_t{1},
                           [](size_t a, int b) { return a * static_cast<size_t>(b); });
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<int> shape_;
  std::vector<double> values_;
};

std::string shape_string(const std::vector<int>& shape);

}  // namespace starenh::nn
