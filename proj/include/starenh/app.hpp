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
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "starenh/enhancer.hpp"
#include "starenh/image.hpp"
#include "starenh/pipeline.hpp"
#include "starenh/style.hpp"

namespace starenh::app {

/// Full-resolution render shared by the CLI and the service so both produce
/// identical pixels for identical inputs.
Image render(const Image& image, const CurveSet& curves, int depth, int workers = 1);

/// Largest size that fits in max_h × max_w with the source aspect ratio. Never upscales.
std::pair<int, int> preview_size(int height, int width, int max_h, int max_w);

/// Dense samples of every curve at t = k/(n−1), keyed by curve name.
nlohmann::json curve_samples(const CurveSet& curves, int n = 65);

struct KnotOverride {
  int curve = 0;
  int knot = 0;
  double value = 0.0;
};

nlohmann::json overrides_to_json(const std::vector<KnotOverride>& overrides);
std::vector<KnotOverride> overrides_from_json(const nlohmann::json& doc);

/// β-scaling followed by absolute knot overrides.
CurveSet adjusted_curves(const CurveSet& base, const SliderSettings& sliders,
                         const std::vector<KnotOverride>& overrides);

class StyleRegistry {
 public:
  struct Entry {
    std::string id;
    style::StyleLatent latent;
  };

  /// Inserts or replaces; the latent must be unit-norm to 1e-6.
  void put(const std::string& id, style::StyleLatent latent);
  bool contains(const std::string& id) const;
  style::StyleLatent latent(const std::string& id) const;
  std::vector<Entry> list() const;
  size_t size() const;

  /// Mapping-network output for a style, computed once per style and model.
  nn::StyleCodes codes(const std::string& id, const Pipeline& pipeline);

 private:
  mutable std::mutex mu_;
  std::map<std::string, style::StyleLatent> latents_;
  std::map<std::string, std::shared_ptr<const nn::StyleCodes>> codes_;
  const Pipeline* codes_owner_ = nullptr;
};

struct Session {
  std::string id;
  Image image;
  Image preview_input;
  CurveSet curves;
  SliderSettings sliders;
  std::vector<KnotOverride> overrides;
  Image base_preview;
  std::mutex mu;
};

class SessionStore {
 public:
  explicit SessionStore(size_t capacity = 32, uint64_t seed = std::random_device{}());

  std::shared_ptr<Session> create();
  /// Throws kNotFound for unknown or evicted ids. Marks the session as recently used.
  std::shared_ptr<Session> get(const std::string& id);
  size_t size() const;
  size_t capacity() const { return capacity_; }

 private:
  using Order = std::list<std::string>;
  mutable std::mutex mu_;
  size_t capacity_;
  std::mt19937_64 rng_;
  Order order_;
  std::unordered_map<std::string, std::pair<std::shared_ptr<Session>, Order::iterator>> sessions_;
};

struct ServiceConfig {
  int preview_max_height = 720;
  int preview_max_width = 1280;
  int depth = kDefaultDepth;
  int workers = 1;
  size_t max_sessions = 32;
};

class Service {
 public:
  explicit Service(std::shared_ptr<const Pipeline> pipeline, ServiceConfig config = {},
                   uint64_t seed = std::random_device{}());

  const ServiceConfig& config() const { return config_; }
  const Pipeline& pipeline() const { return *pipeline_; }
  StyleRegistry& registry() { return registry_; }
  const StyleRegistry& registry() const { return registry_; }
  SessionStore& sessions() { return sessions_; }

  struct StyleResult {
    std::string id;
    style::StyleLatent latent;
    int used = 0;
    int skipped = 0;
  };
  /// Undecodable uploads are skipped; none decodable is an invalid-input error.
  StyleResult add_style(const std::vector<std::string>& encoded_images, const std::optional<std::string>& id);
  StyleResult add_style(const std::vector<Image>& images, const std::optional<std::string>& id);

  struct EnhanceResult {
    std::string session;
    Image rendered;
    CurveSet curves;
  };
  EnhanceResult enhance(const Image& image, const std::string& source, const std::string& target, bool preview);

  /// Re-renders the preview from the cached curves. Never runs the encoder.
  Image sliders(const std::string& session, const SliderSettings& sliders,
                const std::vector<KnotOverride>& overrides);

  Image export_image(const std::string& session, bool sliders_applied);

  nlohmann::json health() const;

 private:
  std::string next_style_id();

  std::shared_ptr<const Pipeline> pipeline_;
  ServiceConfig config_;
  StyleRegistry registry_;
  SessionStore sessions_;
  std::mutex id_mu_;
  int style_counter_ = 0;
};

}  // namespace starenh::app
