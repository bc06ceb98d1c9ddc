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

#include <atomic>
#include <memory>
#include <optional>

#include "starenh/nn/models.hpp"
#include "starenh/nn/weights_io.hpp"

namespace starenh {

/// Inference over a loaded model bundle. The style encoder is optional
/// (only needed to embed new galleries); mapping and curve encoder are
/// required. Thread-safe for concurrent calls.
class Pipeline {
 public:
  explicit Pipeline(const nn::ModelBundle& bundle);

  bool can_embed() const { return style_encoder_ != nullptr; }
  int embed_size() const;
  int encoder_size() const { return encoder_->config().trunk.input_size; }
  const nn::MappingConfig& mapping_config() const { return mapping_->config(); }
  const CurveLayout& layout() const { return encoder_->config().layout; }

  /// Bilinear downsample to the style encoder's K, then embed.
  style::Embedding embed(const Image& image) const;
  nn::StyleCodes codes(const style::StyleLatent& latent) const;
  /// Curve prediction from a full-resolution image (downsampled to K).
  CurveSet predict(const Image& image, const nn::StyleCodes& source, const nn::StyleCodes& target) const;

  /// Encoder invocations since construction (predict calls).
  long inference_count() const { return inferences_.load(); }
  long mapping_count() const { return mapping_calls_.load(); }

 private:
  std::unique_ptr<nn::StyleEncoder> style_encoder_;
  std::unique_ptr<nn::MappingNetwork> mapping_;
  std::unique_ptr<nn::CurveEncoder> encoder_;
  mutable std::atomic<long> inferences_{0};
  mutable std::atomic<long> mapping_calls_{0};
};

}  // namespace starenh
