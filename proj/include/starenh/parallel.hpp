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
#include <thread>
#include <vector>

namespace starenh {

/// Runs fn(begin, end) over [0, n) split into at most `workers` contiguous
/// chunks. With one worker the call happens inline.
template <class Fn>
void parallel_for(int n, int workers, Fn&& fn) {
  workers = std::clamp(workers, 1, std::max(n, 1));
  if (workers == 1) {
    fn(0, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<size_t>(workers));
  const int chunk = (n + workers - 1) / workers;
  for (int begin = 0; begin < n; begin += chunk) {
    const int end = std::min(n, begin + chunk);
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
}

inline int hardware_workers() {
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace starenh
