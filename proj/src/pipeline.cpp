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

#include "starenh/pipeline.hpp"

namespace starenh {

Pipeline::Pipeline(const nn::ModelBundle& bundle)
    : mapping_(std::make_unique<nn::MappingNetwork>(bundle.require_model(nn::kMappingKind))),
      encoder_(std::make_unique<nn::CurveEncoder>(bundle.require_model(nn::kCurveEncoderKind))) {
  if (const auto* s = bundle.find(nn::kStyleEncoderKind)) {
    style_encoder_ = std::make_unique<nn::StyleEncoder>(*s);
    require(style_encoder_->config().embedding_dim() == mapping_->config().latent_dim,
            "style encoder width does not match the mapping network's latent size");
  }
  require(mapping_->config().code_channels == encoder_->config().trunk.widths,
          "mapping network codes do not match the curve encoder's insertion points");
}

int Pipeline::embed_size() const {
  if (!style_encoder_) throw Error(ErrorKind::kNotFound, "model has no style encoder");
  return style_encoder_->config().trunk.input_size;
}

style::Embedding Pipeline::embed(const Image& image) const {
  const int k = embed_size();
  return style_encoder_->embed(nn::constant(nn::image_tensor(image, k)))->value.values();
}

nn::StyleCodes Pipeline::codes(const style::StyleLatent& latent) const {
  ++mapping_calls_;
  return mapping_->codes(latent);
}

CurveSet Pipeline::predict(const Image& image, const nn::StyleCodes& source, const nn::StyleCodes& target) const {
  ++inferences_;
  return encoder_->predict(image, source, target);
}

}  // namespace starenh
