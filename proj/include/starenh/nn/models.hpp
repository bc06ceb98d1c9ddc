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

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "starenh/enhancer.hpp"
#include "starenh/image.hpp"
#include "starenh/nn/ops.hpp"
#include "starenh/style.hpp"

namespace starenh::nn {

/// Convolutional backbone shared by the style and curve encoders: a 3x3
/// stem, then per stage a stride-2 3x3 transition followed by Fixup
/// residual blocks (no normalization layers).
struct TrunkConfig {
  int input_size = 256;
  int stem_width = 16;
  std::vector<int> widths{16, 32, 64, 96};
  int blocks_per_stage = 1;

  void validate() const;
  int residual_blocks() const { return static_cast<int>(widths.size()) * blocks_per_stage; }
};

struct StyleEncoderConfig {
  TrunkConfig trunk{256, 16, {16, 32, 64}, 1};
  int num_styles = 2;
  double scale = style::kDefaultScale;

  int embedding_dim() const { return trunk.widths.back(); }
  void validate() const;
};

struct MappingConfig {
  int latent_dim = 64;
  int hidden = 128;
  int hidden_layers = 2;
  /// Channel count at each Dual AdaIN insertion point of the curve encoder.
  std::vector<int> code_channels{16, 32, 64, 96};

  int insertion_count() const { return static_cast<int>(code_channels.size()); }
  void validate() const;
};

struct CurveEncoderConfig {
  TrunkConfig trunk{};
  CurveLayout layout = CurveLayout::uniform();

  int insertion_count() const { return static_cast<int>(trunk.widths.size()); }
  void validate() const;
};

nlohmann::json to_json(const TrunkConfig& c);
nlohmann::json to_json(const StyleEncoderConfig& c);
nlohmann::json to_json(const MappingConfig& c);
nlohmann::json to_json(const CurveEncoderConfig& c);
StyleEncoderConfig style_config_from_json(const nlohmann::json& j);
MappingConfig mapping_config_from_json(const nlohmann::json& j);
CurveEncoderConfig encoder_config_from_json(const nlohmann::json& j);

inline constexpr const char* kStyleEncoderKind = "style_encoder";
inline constexpr const char* kMappingKind = "mapping";
inline constexpr const char* kCurveEncoderKind = "curve_encoder";

/// Named tensors of one network plus its architecture config.
struct ModelWeights {
  std::string kind;
  nlohmann::json config;
  std::vector<std::pair<std::string, Tensor>> tensors;

  const Tensor& get(const std::string& name) const;
  Tensor& get(const std::string& name);
  bool has(const std::string& name) const;
  void validate_unique() const;

  friend bool operator==(const ModelWeights&, const ModelWeights&) = default;
};

/// L (mu, sigma) pairs, one per insertion point, for a single latent.
struct StyleCodes {
  std::vector<std::vector<double>> mu;
  std::vector<std::vector<double>> sigma;

  static StyleCodes identity(const std::vector<int>& channels);
  int count() const { return static_cast<int>(mu.size()); }
  friend bool operator==(const StyleCodes&, const StyleCodes&) = default;
};

/// Batched code tensors ([B, C_l] per insertion point) inside a graph.
struct CodeVars {
  std::vector<Var> mu;
  std::vector<Var> sigma;

  /// Stacks per-sample codes into batch tensors (constants).
  static CodeVars stack(const std::vector<const StyleCodes*>& codes);
};

class ParamFactory;

class Module {
 public:
  virtual ~Module() = default;

  const std::string& kind() const { return kind_; }
  const std::vector<std::pair<std::string, Var>>& named_parameters() const { return params_; }
  std::vector<Var> parameters() const;
  ModelWeights weights() const;

 protected:
  friend class ParamFactory;

  std::string kind_;
  nlohmann::json config_json_;
  std::vector<std::pair<std::string, Var>> params_;
};

/// Residual backbone parameters. Each block computes
///   x + scale * conv2(relu(conv1(x + b1a) + b1b) + b2a) + b2b
/// so a zero conv2 (the Fixup initialization) makes the block the identity.
struct Trunk {
  struct Block {
    Var bias1a, conv1, bias1b, bias2a, conv2, scale, bias2b;
  };
  struct Stage {
    Var down_w, down_b;
    std::vector<Block> blocks;
  };

  Var stem_w, stem_b;
  std::vector<Stage> stages;

  void build(const TrunkConfig& c, ParamFactory& f);
  /// Applies the trunk; when `src`/`tgt` are given, Dual AdaIN follows each
  /// stage.
  Var forward(const Var& x, const CodeVars* src, const CodeVars* tgt) const;
};

class StyleEncoder : public Module {
 public:
  StyleEncoder(const StyleEncoderConfig& config, std::uint64_t seed);
  explicit StyleEncoder(const ModelWeights& weights);

  const StyleEncoderConfig& config() const { return config_; }
  /// [B, 3, K, K] -> embeddings [B, E].
  Var embed(const Var& images) const;
  /// Normalized-softmax classification loss over a labelled batch.
  Var loss(const Var& images, std::span<const int> labels) const;
  const Var& classifier() const { return classifier_; }
  const Trunk& trunk() const { return trunk_; }

 private:
  void build(ParamFactory& f);
  StyleEncoderConfig config_;
  Trunk trunk_;
  Var classifier_;
};

class MappingNetwork : public Module {
 public:
  MappingNetwork(const MappingConfig& config, std::uint64_t seed);
  explicit MappingNetwork(const ModelWeights& weights);

  const MappingConfig& config() const { return config_; }
  /// Unit latents [B, E] -> per-insertion (mu, sigma) tensors.
  CodeVars forward(const Var& latents) const;
  StyleCodes codes(const style::StyleLatent& latent) const;

 private:
  void build(ParamFactory& f);
  MappingConfig config_;
  std::vector<Var> hidden_w_, hidden_b_;
  Var out_w_, out_b_;
};

class CurveEncoder : public Module {
 public:
  CurveEncoder(const CurveEncoderConfig& config, std::uint64_t seed);
  explicit CurveEncoder(const ModelWeights& weights);

  const CurveEncoderConfig& config() const { return config_; }
  /// images [B, 3, K, K] -> knot vectors [B, layout.total()]. Null codes run
  /// the encoder without Dual AdaIN.
  Var forward(const Var& images, const CodeVars* src, const CodeVars* tgt) const;
  /// Single-image prediction with fixed codes.
  CurveSet predict(const Image& image, const StyleCodes& src, const StyleCodes& tgt) const;
  const Trunk& trunk() const { return trunk_; }

 private:
  void build(ParamFactory& f);
  CurveEncoderConfig config_;
  Trunk trunk_;
  Var head_w_, head_b_;
};

/// Downsamples to K x K and packs into a [1, 3, K, K] tensor.
Tensor image_tensor(const Image& image, int size);
Tensor image_tensor(const ImageD& image, int size);
/// Packs equally sized images into [B, 3, H, W] without resampling.
Tensor batch_tensor(const std::vector<const ImageD*>& images);

// Plain-value entry points over stored weights.
style::Embedding style_forward(const Image& image, const ModelWeights& weights);
std::pair<StyleCodes, StyleCodes> mapping_forward(const style::StyleLatent& source,
                                                  const style::StyleLatent& target,
                                                  const ModelWeights& weights);
std::vector<double> encoder_forward(const Image& image, const StyleCodes& source, const StyleCodes& target,
                                    const ModelWeights& weights);
ModelWeights fixup_init(const StyleEncoderConfig& config, std::uint64_t seed);
ModelWeights fixup_init(const MappingConfig& config, std::uint64_t seed);
ModelWeights fixup_init(const CurveEncoderConfig& config, std::uint64_t seed);

}  // namespace starenh::nn
