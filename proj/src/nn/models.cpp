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

#include "starenh/nn/models.hpp"

#include <cmath>
#include <random>
#include <set>

namespace starenh::nn {

using nlohmann::json;

// Hands out parameters either freshly initialized from a seeded generator
// or looked up (with shape checks) in stored weights.
class ParamFactory {
 public:
  enum class Init { kHe, kZeros, kOnes, kNormal };

  ParamFactory(Module& owner, std::uint64_t seed) : owner_(owner), rng_(seed) {}
  ParamFactory(Module& owner, const ModelWeights& source) : owner_(owner), rng_(0), source_(&source) {}

  /// `gain` scales the He standard deviation (Fixup branch rescaling) or is
  /// the standard deviation itself for kNormal.
  Var make(const std::string& name, std::vector<int> shape, Init init, double gain = 1.0) {
    Tensor value(shape);
    if (source_) {
      require(source_->has(name), "weights are missing tensor '" + name + "'");
      const Tensor& t = source_->get(name);
      require(t.shape() == shape, "tensor '" + name + "' has shape " + shape_string(t.shape()) +
                                      ", expected " + shape_string(shape));
      value = t;
    } else {
      switch (init) {
        case Init::kZeros:
          break;
        case Init::kOnes:
          value.fill(1.0);
          break;
        case Init::kHe:
        case Init::kNormal: {
          double stddev = gain;
          if (init == Init::kHe) {
            size_t fan_in = 1;
            for (size_t d = 1; d < shape.size(); ++d) fan_in *= static_cast<size_t>(shape[d]);
            stddev = gain * std::sqrt(2.0 / static_cast<double>(fan_in));
          }
          std::normal_distribution<double> dist(0.0, stddev);
          // Round through float so stored weights reload bit-identically.
          for (double& v : value.values()) v = static_cast<float>(dist(rng_));
          break;
        }
      }
    }
    Var p = parameter(std::move(value));
    for (const auto& [existing, _] : owner_.params_)
      require(existing != name, "duplicate parameter name '" + name + "'");
    owner_.params_.emplace_back(name, p);
    return p;
  }

  void finish() {
    if (source_) require(source_->tensors.size() == owner_.params_.size(), "weights contain unexpected tensors");
  }

 private:
  Module& owner_;
  std::mt19937_64 rng_;
  const ModelWeights* source_ = nullptr;
};

namespace {

using Init = ParamFactory::Init;

json parse_check(const ModelWeights& w, const char* kind) {
  require(w.kind == kind, std::string("expected ") + kind + " weights, got '" + w.kind + "'");
  w.validate_unique();
  return w.config;
}

Var scalar_param(ParamFactory& f, const std::string& name, Init init) {
  return f.make(name, {1}, init);
}

}  // namespace

// ---------------------------------------------------------------------------
// configs

void TrunkConfig::validate() const {
  require(input_size >= 4, "trunk input size must be at least 4");
  require(stem_width >= 1 && !widths.empty(), "trunk needs a stem and at least one stage");
  for (int w : widths) require(w >= 1, "trunk widths must be positive");
  require(blocks_per_stage >= 1, "trunk needs at least one block per stage");
  require((input_size >> widths.size()) >= 1, "too many stride-2 stages for the input size");
}

void StyleEncoderConfig::validate() const {
  trunk.validate();
  require(num_styles >= 2, "style classifier needs at least two styles");
  require(scale > 0, "classifier scale must be positive");
  require(embedding_dim() >= 2, "embedding dimension must be at least 2");
}

void MappingConfig::validate() const {
  require(latent_dim >= 2 && hidden >= 1 && hidden_layers >= 1, "invalid mapping network shape");
  require(!code_channels.empty(), "mapping network needs at least one insertion point");
  for (int c : code_channels) require(c >= 1, "code channel counts must be positive");
}

void CurveEncoderConfig::validate() const {
  trunk.validate();
  for (int m : layout.knots) require(m >= 2, "every curve needs at least two knots");
}

json to_json(const TrunkConfig& c) {
  return json{{"input_size", c.input_size},
              {"stem_width", c.stem_width},
              {"widths", c.widths},
              {"blocks_per_stage", c.blocks_per_stage}};
}

json to_json(const StyleEncoderConfig& c) {
  return json{{"trunk", to_json(c.trunk)}, {"num_styles", c.num_styles}, {"scale", c.scale}};
}

json to_json(const MappingConfig& c) {
  return json{{"latent_dim", c.latent_dim},
              {"hidden", c.hidden},
              {"hidden_layers", c.hidden_layers},
              {"code_channels", c.code_channels}};
}

json to_json(const CurveEncoderConfig& c) {
  return json{{"trunk", to_json(c.trunk)},
              {"knots", std::vector<int>(c.layout.knots.begin(), c.layout.knots.end())}};
}

namespace {

TrunkConfig trunk_from_json(const json& j) {
  TrunkConfig c;
  c.input_size = j.at("input_size").get<int>();
  c.stem_width = j.at("stem_width").get<int>();
  c.widths = j.at("widths").get<std::vector<int>>();
  c.blocks_per_stage = j.at("blocks_per_stage").get<int>();
  return c;
}

template <class F>
auto parse_config(const json& j, F&& f) {
  try {
    auto c = f(j);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw_invalid(std::string("malformed model config: ") + e.what());
  }
}

}  // namespace

StyleEncoderConfig style_config_from_json(const json& j) {
  return parse_config(j, [](const json& v) {
    StyleEncoderConfig c;
    c.trunk = trunk_from_json(v.at("trunk"));
    c.num_styles = v.at("num_styles").get<int>();
    c.scale = v.at("scale").get<double>();
    return c;
  });
}

MappingConfig mapping_config_from_json(const json& j) {
  return parse_config(j, [](const json& v) {
    MappingConfig c;
    c.latent_dim = v.at("latent_dim").get<int>();
    c.hidden = v.at("hidden").get<int>();
    c.hidden_layers = v.at("hidden_layers").get<int>();
    c.code_channels = v.at("code_channels").get<std::vector<int>>();
    return c;
  });
}

CurveEncoderConfig encoder_config_from_json(const json& j) {
  return parse_config(j, [](const json& v) {
    CurveEncoderConfig c;
    c.trunk = trunk_from_json(v.at("trunk"));
    const auto knots = v.at("knots").get<std::vector<int>>();
    require(knots.size() == kCurveCount, "encoder config needs 15 knot counts");
    std::copy(knots.begin(), knots.end(), c.layout.knots.begin());
    return c;
  });
}

// ---------------------------------------------------------------------------
// containers

const Tensor& ModelWeights::get(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return t;
  throw_invalid("no tensor named '" + name + "'");
}

Tensor& ModelWeights::get(const std::string& name) {
  for (auto& [n, t] : tensors)
    if (n == name) return t;
  throw_invalid("no tensor named '" + name + "'");
}

bool ModelWeights::has(const std::string& name) const {
  for (const auto& [n, _] : tensors)
    if (n == name) return true;
  return false;
}

void ModelWeights::validate_unique() const {
  std::set<std::string> names;
  for (const auto& [n, _] : tensors) require(names.insert(n).second, "duplicate tensor name '" + n + "'");
}

StyleCodes StyleCodes::identity(const std::vector<int>& channels) {
  StyleCodes c;
  for (int ch : channels) {
    c.mu.emplace_back(static_cast<size_t>(ch), 0.0);
    c.sigma.emplace_back(static_cast<size_t>(ch), 1.0);
  }
  return c;
}

CodeVars CodeVars::stack(const std::vector<const StyleCodes*>& codes) {
  require(!codes.empty(), "no style codes to stack");
  const int layers = codes.front()->count();
  const int b = static_cast<int>(codes.size());
  CodeVars out;
  for (int l = 0; l < layers; ++l) {
    const int c = static_cast<int>(codes.front()->mu[static_cast<size_t>(l)].size());
    Tensor mu({b, c}), sigma({b, c});
    for (int n = 0; n < b; ++n) {
      const StyleCodes& sc = *codes[static_cast<size_t>(n)];
      require(sc.count() == layers, "style code sets differ in length");
      const auto& m = sc.mu[static_cast<size_t>(l)];
      const auto& s = sc.sigma[static_cast<size_t>(l)];
      require(m.size() == static_cast<size_t>(c) && s.size() == static_cast<size_t>(c),
              "style code channel mismatch");
      std::copy(m.begin(), m.end(), mu.data() + static_cast<size_t>(n) * c);
      std::copy(s.begin(), s.end(), sigma.data() + static_cast<size_t>(n) * c);
    }
    out.mu.push_back(constant(std::move(mu)));
    out.sigma.push_back(constant(std::move(sigma)));
  }
  return out;
}

std::vector<Var> Module::parameters() const {
  std::vector<Var> out;
  for (const auto& [_, p] : params_) out.push_back(p);
  return out;
}

ModelWeights Module::weights() const {
  ModelWeights w{kind_, config_json_, {}};
  for (const auto& [n, p] : params_) w.tensors.emplace_back(n, p->value);
  return w;
}

// ---------------------------------------------------------------------------
// trunk

void Trunk::build(const TrunkConfig& c, ParamFactory& f) {
  // Fixup: the first conv of each branch is scaled by L^(-1/(2m-2)) with
  // m = 2 layers per branch, the last conv starts at zero.
  const double branch_gain = 1.0 / std::sqrt(static_cast<double>(c.residual_blocks()));
  stem_w = f.make("stem.weight", {c.stem_width, 3, 3, 3}, Init::kHe);
  stem_b = f.make("stem.bias", {c.stem_width}, Init::kZeros);
  int in = c.stem_width;
  stages.clear();
  for (size_t s = 0; s < c.widths.size(); ++s) {
    const std::string p = "stage" + std::to_string(s) + ".";
    const int out = c.widths[s];
    Stage st;
    st.down_w = f.make(p + "down.weight", {out, in, 3, 3}, Init::kHe);
    st.down_b = f.make(p + "down.bias", {out}, Init::kZeros);
    for (int b = 0; b < c.blocks_per_stage; ++b) {
      const std::string q = p + "block" + std::to_string(b) + ".";
      Block blk;
      blk.bias1a = scalar_param(f, q + "bias1a", Init::kZeros);
      blk.conv1 = f.make(q + "conv1.weight", {out, out, 3, 3}, Init::kHe, branch_gain);
      blk.bias1b = scalar_param(f, q + "bias1b", Init::kZeros);
      blk.bias2a = scalar_param(f, q + "bias2a", Init::kZeros);
      blk.conv2 = f.make(q + "conv2.weight", {out, out, 3, 3}, Init::kZeros);
      blk.scale = scalar_param(f, q + "scale", Init::kOnes);
      blk.bias2b = scalar_param(f, q + "bias2b", Init::kZeros);
      st.blocks.push_back(blk);
    }
    stages.push_back(std::move(st));
    in = out;
  }
}

Var Trunk::forward(const Var& x, const CodeVars* src, const CodeVars* tgt) const {
  require((src == nullptr) == (tgt == nullptr), "source and target codes must be given together");
  if (src) {
    require(src->mu.size() == stages.size() && tgt->mu.size() == stages.size(),
            "style codes have " + std::to_string(src->mu.size()) + " entries, encoder has " +
                std::to_string(stages.size()) + " insertion points");
  }
  Var h = relu(conv2d(x, stem_w, stem_b, 1, 1));
  for (size_t s = 0; s < stages.size(); ++s) {
    const Stage& st = stages[s];
    h = relu(conv2d(h, st.down_w, st.down_b, 2, 1));
    for (const Block& b : st.blocks) {
      Var r = conv2d(add_scalar(h, b.bias1a), b.conv1, nullptr, 1, 1);
      r = relu(add_scalar(r, b.bias1b));
      r = conv2d(add_scalar(r, b.bias2a), b.conv2, nullptr, 1, 1);
      r = add_scalar(mul_scalar(r, b.scale), b.bias2b);
      h = add(h, r);
    }
    if (src) h = dual_adain(h, src->mu[s], src->sigma[s], tgt->mu[s], tgt->sigma[s]);
  }
  return h;
}

// ---------------------------------------------------------------------------
// style encoder

StyleEncoder::StyleEncoder(const StyleEncoderConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  ParamFactory f(*this, seed);
  build(f);
}

StyleEncoder::StyleEncoder(const ModelWeights& weights)
    : config_(style_config_from_json(parse_check(weights, kStyleEncoderKind))) {
  ParamFactory f(*this, weights);
  build(f);
}

void StyleEncoder::build(ParamFactory& f) {
  kind_ = kStyleEncoderKind;
  config_json_ = to_json(config_);
  trunk_.build(config_.trunk, f);
  const int e = config_.embedding_dim();
  classifier_ = f.make("classifier.weight", {config_.num_styles, e}, Init::kNormal,
                       1.0 / std::sqrt(static_cast<double>(e)));
  f.finish();
}

Var StyleEncoder::embed(const Var& images) const {
  const Tensor& v = images->value;
  require(v.rank() == 4 && v.dim(1) == 3 && v.dim(2) == config_.trunk.input_size &&
              v.dim(3) == config_.trunk.input_size,
          "style encoder expects [B,3," + std::to_string(config_.trunk.input_size) + "," +
              std::to_string(config_.trunk.input_size) + "] input, got " + shape_string(v.shape()));
  return global_avg_pool(trunk_.forward(images, nullptr, nullptr));
}

Var StyleEncoder::loss(const Var& images, std::span<const int> labels) const {
  return normalized_softmax_loss(embed(images), classifier_, labels, config_.scale);
}

// ---------------------------------------------------------------------------
// mapping network

MappingNetwork::MappingNetwork(const MappingConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  ParamFactory f(*this, seed);
  build(f);
}

MappingNetwork::MappingNetwork(const ModelWeights& weights)
    : config_(mapping_config_from_json(parse_check(weights, kMappingKind))) {
  ParamFactory f(*this, weights);
  build(f);
}

void MappingNetwork::build(ParamFactory& f) {
  kind_ = kMappingKind;
  config_json_ = to_json(config_);
  int in = config_.latent_dim;
  for (int l = 0; l < config_.hidden_layers; ++l) {
    const std::string p = "fc" + std::to_string(l) + ".";
    hidden_w_.push_back(f.make(p + "weight", {config_.hidden, in}, Init::kHe));
    hidden_b_.push_back(f.make(p + "bias", {config_.hidden}, Init::kZeros));
    in = config_.hidden;
  }
  int total = 0;
  for (int c : config_.code_channels) total += 2 * c;
  out_w_ = f.make("out.weight", {total, in}, Init::kZeros);
  out_b_ = f.make("out.bias", {total}, Init::kZeros);
  f.finish();
}

CodeVars MappingNetwork::forward(const Var& latents) const {
  const Tensor& v = latents->value;
  require(v.rank() == 2 && v.dim(1) == config_.latent_dim,
          "mapping network expects [B," + std::to_string(config_.latent_dim) + "] latents, got " +
              shape_string(v.shape()));
  for (int n = 0; n < v.dim(0); ++n) {
    double s = 0;
    for (int e = 0; e < v.dim(1); ++e) s += v[static_cast<size_t>(n) * v.dim(1) + e] * v[static_cast<size_t>(n) * v.dim(1) + e];
    require(std::abs(std::sqrt(s) - 1.0) <= 1e-3, "style latent is not unit norm");
  }
  Var h = latents;
  for (size_t l = 0; l < hidden_w_.size(); ++l) h = relu(linear(h, hidden_w_[l], hidden_b_[l]));
  Var raw = linear(h, out_w_, out_b_);
  CodeVars codes;
  int off = 0;
  for (int c : config_.code_channels) {
    codes.mu.push_back(slice_cols(raw, off, c));
    codes.sigma.push_back(sigma_from_raw(slice_cols(raw, off + c, c)));
    off += 2 * c;
  }
  return codes;
}

StyleCodes MappingNetwork::codes(const style::StyleLatent& latent) const {
  const Var out = constant(Tensor({1, latent.dimension()}, latent.values));
  const CodeVars v = forward(out);
  StyleCodes c;
  for (size_t l = 0; l < v.mu.size(); ++l) {
    c.mu.push_back(v.mu[l]->value.values());
    c.sigma.push_back(v.sigma[l]->value.values());
  }
  return c;
}

// ---------------------------------------------------------------------------
// curve encoder

CurveEncoder::CurveEncoder(const CurveEncoderConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  ParamFactory f(*this, seed);
  build(f);
}

CurveEncoder::CurveEncoder(const ModelWeights& weights)
    : config_(encoder_config_from_json(parse_check(weights, kCurveEncoderKind))) {
  ParamFactory f(*this, weights);
  build(f);
}

void CurveEncoder::build(ParamFactory& f) {
  kind_ = kCurveEncoderKind;
  config_json_ = to_json(config_);
  trunk_.build(config_.trunk, f);
  const int total = config_.layout.total();
  head_w_ = f.make("head.weight", {total, config_.trunk.widths.back()}, Init::kZeros);
  head_b_ = f.make("head.bias", {total}, Init::kZeros);
  f.finish();
}

Var CurveEncoder::forward(const Var& images, const CodeVars* src, const CodeVars* tgt) const {
  const Tensor& v = images->value;
  const int k = config_.trunk.input_size;
  require(v.rank() == 4 && v.dim(1) == 3 && v.dim(2) == k && v.dim(3) == k,
          "curve encoder expects [B,3," + std::to_string(k) + "," + std::to_string(k) + "] input, got " +
              shape_string(v.shape()));
  return linear(global_avg_pool(trunk_.forward(images, src, tgt)), head_w_, head_b_);
}

CurveSet CurveEncoder::predict(const Image& image, const StyleCodes& src, const StyleCodes& tgt) const {
  const Var x = constant(image_tensor(image, config_.trunk.input_size));
  const CodeVars s = CodeVars::stack({&src});
  const CodeVars t = CodeVars::stack({&tgt});
  const Var u = forward(x, &s, &t);
  return CurveSet::from_vector(u->value.values(), config_.layout);
}

// ---------------------------------------------------------------------------
// free functions

namespace {

template <class T>
Tensor pack(const BasicImage<T>& img) {
  Tensor t({1, 3, img.height, img.width});
  std::copy(img.data.begin(), img.data.end(), t.data());
  return t;
}

}  // namespace

Tensor image_tensor(const Image& image, int size) {
  if (image.height == size && image.width == size) return pack(image);
  return pack(resize_bilinear(image, size, size));
}

Tensor image_tensor(const ImageD& image, int size) {
  if (image.height == size && image.width == size) return pack(image);
  return pack(resize_bilinear(image, size, size));
}

Tensor batch_tensor(const std::vector<const ImageD*>& images) {
  require(!images.empty(), "empty image batch");
  const int h = images.front()->height, w = images.front()->width;
  Tensor t({static_cast<int>(images.size()), 3, h, w});
  size_t off = 0;
  for (const ImageD* img : images) {
    require(img->height == h && img->width == w, "batch images differ in size");
    std::copy(img->data.begin(), img->data.end(), t.data() + off);
    off += img->data.size();
  }
  return t;
}

style::Embedding style_forward(const Image& image, const ModelWeights& weights) {
  const StyleEncoder enc(weights);
  const int k = enc.config().trunk.input_size;
  require(image.height == k && image.width == k,
          "style_forward expects a " + std::to_string(k) + "x" + std::to_string(k) + " image");
  return enc.embed(constant(pack(image)))->value.values();
}

std::pair<StyleCodes, StyleCodes> mapping_forward(const style::StyleLatent& source,
                                                  const style::StyleLatent& target,
                                                  const ModelWeights& weights) {
  const MappingNetwork net(weights);
  return {net.codes(source), net.codes(target)};
}

std::vector<double> encoder_forward(const Image& image, const StyleCodes& source, const StyleCodes& target,
                                    const ModelWeights& weights) {
  const CurveEncoder enc(weights);
  const int k = enc.config().trunk.input_size;
  require(image.height == k && image.width == k,
          "encoder_forward expects a " + std::to_string(k) + "x" + std::to_string(k) + " image");
  return enc.predict(image, source, target).to_vector();
}

ModelWeights fixup_init(const StyleEncoderConfig& config, std::uint64_t seed) {
  return StyleEncoder(config, seed).weights();
}

ModelWeights fixup_init(const MappingConfig& config, std::uint64_t seed) {
  return MappingNetwork(config, seed).weights();
}

ModelWeights fixup_init(const CurveEncoderConfig& config, std::uint64_t seed) {
  return CurveEncoder(config, seed).weights();
}

}  // namespace starenh::nn
