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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "starenh/image.hpp"

namespace starenh::synth {

/// A global photo-finishing recipe. Applied per pixel in this order:
///   v *= gains[c];  v = v^gamma[c];  v = (1 - saturation) * y + saturation * v
///   (y = Rec.709 luma);  v = lift + gain * v;  v *= 1 - vignette * r^2
/// where r is the pixel centre's distance from the image centre normalized
/// to 1 at the corners; the result is clamped to [0,1].
struct SyntheticStyleSpec {
  std::array<double, 3> gamma{1.0, 1.0, 1.0};
  std::array<double, 3> gains{1.0, 1.0, 1.0};
  double saturation = 1.0;
  double lift = 0.0;
  double gain = 1.0;
  double vignette = 0.0;

  void validate() const;
  friend bool operator==(const SyntheticStyleSpec&, const SyntheticStyleSpec&) = default;
};

nlohmann::json spec_to_json(const SyntheticStyleSpec& spec);
SyntheticStyleSpec spec_from_json(const nlohmann::json& doc);

template <class T>
BasicImage<T> synth_style_apply(const BasicImage<T>& image, const SyntheticStyleSpec& spec);

/// Procedural scenes (gradients, shapes, mild noise) with a photo-like
/// bias toward darker tones.
std::vector<ImageD> generate_base_images(int count, int height, int width, std::uint64_t seed);

/// Aligned multi-style data: images[q][i] is base item i rendered in style
/// q. A missing entry is an unavailable pair.
struct StyleDataset {
  std::vector<std::string> ids;
  std::vector<SyntheticStyleSpec> specs;
  std::vector<std::vector<std::optional<ImageD>>> images;

  int styles() const { return static_cast<int>(ids.size()); }
  size_t items() const { return images.empty() ? 0 : images.front().size(); }
  int index_of(const std::string& id) const;
  const ImageD& at(int style, size_t item) const;
  bool has(int style, size_t item) const;
};

struct NamedStyle {
  std::string id;
  SyntheticStyleSpec spec;
};

StyleDataset build_dataset(const std::vector<ImageD>& bases, const std::vector<NamedStyle>& styles);

/// Writes base/NNNN.png (16-bit), styles.json and pairs/<id>/NNNN.png.
void save_dataset(const std::string& dir, const std::vector<ImageD>& bases, const std::vector<NamedStyle>& styles);
/// Reads a dataset directory. Cached pairs are used when present, missing
/// ones are regenerated from styles.json; extra base images (any PNG/PPM in
/// base/) are picked up in name order.
StyleDataset load_dataset(const std::string& dir);

/// Style presets used by the desk-scale benchmarks and the `synth` command.
std::vector<NamedStyle> preset_styles(const std::string& name);

}  // namespace starenh::synth
