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

#include "starenh/app.hpp"

#include <cmath>
#include <cstdio>

#include "starenh/curveset_io.hpp"
#include "starenh/image_io.hpp"

namespace starenh::app {

using nlohmann::json;

Image render(const Image& image, const CurveSet& curves, int depth, int workers) {
  return enhance(image, curves, depth, true, workers);
}

std::pair<int, int> preview_size(int height, int width, int max_h, int max_w) {
  require(height >= 1 && width >= 1 && max_h >= 1 && max_w >= 1, "preview sizes must be positive");
  const double s = std::min({1.0, static_cast<double>(max_h) / height, static_cast<double>(max_w) / width});
  if (s >= 1.0) return {height, width};
  const int h = std::clamp(static_cast<int>(std::lround(height * s)), 1, max_h);
  const int w = std::clamp(static_cast<int>(std::lround(width * s)), 1, max_w);
  return {h, w};
}

json curve_samples(const CurveSet& curves, int n) {
  require(n >= 2, "need at least two samples per curve");
  json out = json::object();
  for (int i = 0; i < kCurveCount; ++i) out[curve_name(i)] = curves::sample_curve(curves.at(i).values(), n);
  return out;
}

json overrides_to_json(const std::vector<KnotOverride>& overrides) {
  json out = json::array();
  for (const auto& o : overrides) out.push_back({{"curve", curve_name(o.curve)}, {"knot", o.knot}, {"value", o.value}});
  return out;
}

std::vector<KnotOverride> overrides_from_json(const json& doc) {
  require(doc.is_array(), "knot overrides must be a JSON array");
  std::vector<KnotOverride> out;
  for (const auto& item : doc) {
    require(item.is_object() && item.contains("curve") && item.contains("knot") && item.contains("value"),
            "each knot override needs 'curve', 'knot' and 'value'");
    require(item["curve"].is_string(), "override 'curve' must be a curve name");
    require(item["knot"].is_number_integer(), "override 'knot' must be an integer");
    require(item["value"].is_number(), "override 'value' must be a number");
    out.push_back({parse_curve_name(item["curve"].get<std::string>()), item["knot"].get<int>(),
                   item["value"].get<double>()});
  }
  return out;
}

CurveSet adjusted_curves(const CurveSet& base, const SliderSettings& sliders,
                         const std::vector<KnotOverride>& overrides) {
  CurveSet out = apply_sliders(base, sliders);
  for (const auto& o : overrides) {
    const int size = out.at(o.curve).size();
    if (o.knot < 0 || o.knot >= size)
      throw Error(ErrorKind::kDomain, "knot " + std::to_string(o.knot) + " outside " + curve_name(o.curve) +
                                          " (" + std::to_string(size) + " knots)");
    if (!std::isfinite(o.value)) throw Error(ErrorKind::kDomain, "knot value must be finite");
    out = set_knot(std::move(out), o.curve / 3, o.curve % 3, o.knot, o.value);
  }
  return out;
}

// ---------------------------------------------------------------------------

void StyleRegistry::put(const std::string& id, style::StyleLatent latent) {
  require(!id.empty(), "style id must not be empty");
  double n2 = 0.0;
  for (double v : latent.values) n2 += v * v;
  require(std::abs(std::sqrt(n2) - 1.0) <= 1e-6, "style latent '" + id + "' is not unit-norm");
  std::lock_guard lock(mu_);
  latents_[id] = std::move(latent);
  codes_.erase(id);
}

bool StyleRegistry::contains(const std::string& id) const {
  std::lock_guard lock(mu_);
  return latents_.count(id) > 0;
}

style::StyleLatent StyleRegistry::latent(const std::string& id) const {
  std::lock_guard lock(mu_);
  const auto it = latents_.find(id);
  if (it == latents_.end()) throw Error(ErrorKind::kNotFound, "unknown style '" + id + "'");
  return it->second;
}

std::vector<StyleRegistry::Entry> StyleRegistry::list() const {
  std::lock_guard lock(mu_);
  std::vector<Entry> out;
  for (const auto& [id, latent] : latents_) out.push_back({id, latent});
  return out;
}

size_t StyleRegistry::size() const {
  std::lock_guard lock(mu_);
  return latents_.size();
}

nn::StyleCodes StyleRegistry::codes(const std::string& id, const Pipeline& pipeline) {
  std::lock_guard lock(mu_);
  if (codes_owner_ != &pipeline) {
    codes_.clear();
    codes_owner_ = &pipeline;
  }
  if (auto it = codes_.find(id); it != codes_.end()) return *it->second;
  const auto lit = latents_.find(id);
  if (lit == latents_.end()) throw Error(ErrorKind::kNotFound, "unknown style '" + id + "'");
  auto codes = std::make_shared<const nn::StyleCodes>(pipeline.codes(lit->second));
  codes_[id] = codes;
  return *codes;
}

// ---------------------------------------------------------------------------

SessionStore::SessionStore(size_t capacity, uint64_t seed) : capacity_(capacity), rng_(seed) {
  require(capacity >= 1, "session capacity must be at least 1");
}

std::shared_ptr<Session> SessionStore::create() {
  std::lock_guard lock(mu_);
  std::string id;
  do {
    char buf[33];
    std::snprintf(buf, sizeof buf, "%016llx%016llx", static_cast<unsigned long long>(rng_()),
                  static_cast<unsigned long long>(rng_()));
    id = buf;
  } while (sessions_.count(id));
  while (sessions_.size() >= capacity_) {
    sessions_.erase(order_.back());
    order_.pop_back();
  }
  order_.push_front(id);
  auto s = std::make_shared<Session>();
  s->id = id;
  sessions_.emplace(id, std::make_pair(s, order_.begin()));
  return s;
}

std::shared_ptr<Session> SessionStore::get(const std::string& id) {
  std::lock_guard lock(mu_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorKind::kNotFound, "unknown session '" + id + "'");
  order_.splice(order_.begin(), order_, it->second.second);
  return it->second.first;
}

size_t SessionStore::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

// ---------------------------------------------------------------------------

Service::Service(std::shared_ptr<const Pipeline> pipeline, ServiceConfig config, uint64_t seed)
    : pipeline_(std::move(pipeline)), config_(config), sessions_(config.max_sessions, seed) {
  require(pipeline_ != nullptr, "service needs a model");
  require(config_.depth >= 1 && config_.depth <= 16, "lookup depth must be between 1 and 16 bits");
  require(config_.workers >= 1, "worker count must be positive");
}

std::string Service::next_style_id() {
  std::lock_guard lock(id_mu_);
  std::string id;
  do id = "style-" + std::to_string(++style_counter_);
  while (registry_.contains(id));
  return id;
}

Service::StyleResult Service::add_style(const std::vector<std::string>& encoded_images,
                                        const std::optional<std::string>& id) {
  std::vector<Image> images;
  int skipped = 0;
  for (const auto& bytes : encoded_images) {
    try {
      images.push_back(decode_image(bytes));
    } catch (const Error&) {
      ++skipped;
    }
  }
  if (images.empty()) throw_invalid("no decodable image among " + std::to_string(encoded_images.size()) + " uploads");
  auto r = add_style(images, id);
  r.skipped = skipped;
  return r;
}

Service::StyleResult Service::add_style(const std::vector<Image>& images, const std::optional<std::string>& id) {
  require(!images.empty(), "a style needs at least one image");
  if (!pipeline_->can_embed()) throw Error(ErrorKind::kNotFound, "model has no style encoder");
  std::vector<style::Embedding> emb;
  emb.reserve(images.size());
  for (const auto& img : images) emb.push_back(pipeline_->embed(img));
  StyleResult r;
  r.id = id && !id->empty() ? *id : next_style_id();
  r.latent = style::average_latent(emb, "upload:" + std::to_string(images.size()));
  r.used = static_cast<int>(images.size());
  registry_.put(r.id, r.latent);
  return r;
}

Service::EnhanceResult Service::enhance(const Image& image, const std::string& source, const std::string& target,
                                        bool preview) {
  const auto src = registry_.codes(source, *pipeline_);
  const auto tgt = registry_.codes(target, *pipeline_);
  auto session = sessions_.create();
  std::lock_guard lock(session->mu);
  session->image = image;
  session->curves = pipeline_->predict(image, src, tgt);
  const auto [ph, pw] = preview_size(image.height, image.width, config_.preview_max_height, config_.preview_max_width);
  session->preview_input = ph == image.height && pw == image.width ? image : resize_bilinear(image, ph, pw);
  session->base_preview = render(session->preview_input, session->curves, config_.depth, config_.workers);
  EnhanceResult r{session->id, preview ? session->base_preview
                                       : render(image, session->curves, config_.depth, config_.workers),
                  session->curves};
  return r;
}

Image Service::sliders(const std::string& id, const SliderSettings& sliders,
                       const std::vector<KnotOverride>& overrides) {
  sliders.validate();
  auto session = sessions_.get(id);
  std::lock_guard lock(session->mu);
  const CurveSet curves = adjusted_curves(session->curves, sliders, overrides);
  session->sliders = sliders;
  session->overrides = overrides;
  return render(session->preview_input, curves, config_.depth, config_.workers);
}

Image Service::export_image(const std::string& id, bool sliders_applied) {
  auto session = sessions_.get(id);
  std::lock_guard lock(session->mu);
  const CurveSet curves =
      sliders_applied ? adjusted_curves(session->curves, session->sliders, session->overrides) : session->curves;
  return render(session->image, curves, config_.depth, config_.workers);
}

json Service::health() const {
  return {{"status", "ok"},
          {"inferences", pipeline_->inference_count()},
          {"mapping_calls", pipeline_->mapping_count()},
          {"styles", registry_.size()},
          {"sessions", sessions_.size()},
          {"can_embed", pipeline_->can_embed()}};
}

}  // namespace starenh::app
