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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "starenh/nn/models.hpp"
#include "starenh/style.hpp"

namespace starenh::nn {

inline constexpr char kWeightsMagic[8] = {'S', 'T', 'A', 'R', 'E', 'N', 'H', '1'};

/// Everything a deployment needs: any subset of the three networks plus
/// named style latents.
struct ModelBundle {
  std::vector<ModelWeights> models;
  std::map<std::string, style::StyleLatent> styles;

  const ModelWeights* find(const std::string& kind) const;
  const ModelWeights& require_model(const std::string& kind) const;
  void put(ModelWeights weights);
};

/// Layout: magic "STARENH1", u64 LE header length, UTF-8 JSON header with
/// the configs and ordered tensor manifest, then f32 LE tensor data.
std::string encode_bundle(const ModelBundle& bundle);
ModelBundle decode_bundle(const std::string& bytes);
void save_bundle(const std::string& path, const ModelBundle& bundle);
ModelBundle load_bundle(const std::string& path);

}  // namespace starenh::nn
