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

#include "starenh/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "starenh/image_io.hpp"

namespace starenh::synth {

namespace fs = std::filesystem;
using nlohmann::json;

void SyntheticStyleSpec::validate() const {
  for (int c = 0; c < 3; ++c) {
    require(std::isfinite(gamma[c]) && gamma[c] > 0, "style gamma must be positive");
    require(std::isfinite(gains[c]) && gains[c] > 0, "style gains must be positive");
  }
  require(std::isfinite(saturation) && saturation >= 0, "style saturation must be nonnegative");
  require(std::isfinite(lift) && std::isfinite(gain), "style lift and gain must be finite");
  require(std::isfinite(vignette) && std::abs(vignette) <= 1, "style vignette must lie in [-1, 1]");
}

json spec_to_json(const SyntheticStyleSpec& s) {
  return json{{"gamma", s.gamma},       {"gains", s.gains}, {"saturation", s.saturation},
              {"lift", s.lift},         {"gain", s.gain},   {"vignette", s.vignette}};
}

SyntheticStyleSpec spec_from_json(const json& j) {
  SyntheticStyleSpec s;
  try {
    s.gamma = j.value("gamma", s.gamma);
    s.gains = j.value("gains", s.gains);
    s.saturation = j.value("saturation", s.saturation);
    s.lift = j.value("lift", s.lift);
    s.gain = j.value("gain", s.gain);
    s.vignette = j.value("vignette", s.vignette);
  } catch (const json::exception& e) {
    throw_invalid(std::string("malformed style spec: ") + e.what());
  }
  s.validate();
  return s;
}

template <class T>
BasicImage<T> synth_style_apply(const BasicImage<T>& image, const SyntheticStyleSpec& spec) {
  spec.validate();
  BasicImage<T> out(image.height, image.width, image.bit_depth);
  for (int y = 0; y < image.height; ++y) {
    const double ny = (2.0 * y + 1.0) / image.height - 1.0;
    for (int x = 0; x < image.width; ++x) {
      const double nx = (2.0 * x + 1.0) / image.width - 1.0;
      const double falloff = 1.0 - spec.vignette * 0.5 * (nx * nx + ny * ny);
      double v[3];
      for (int c = 0; c < 3; ++c)
        v[c] = std::pow(std::max(0.0, static_cast<double>(image.at(c, y, x)) * spec.gains[c]), spec.gamma[c]);
      const double luma = 0.2126 * v[0] + 0.7152 * v[1] + 0.0722 * v[2];
      for (int c = 0; c < 3; ++c) {
        const double s = (1.0 - spec.saturation) * luma + spec.saturation * v[c];
        out.at(c, y, x) = static_cast<T>(std::clamp((spec.lift + spec.gain * s) * falloff, 0.0, 1.0));
      }
    }
  }
  return out;
}

template BasicImage<float> synth_style_apply(const BasicImage<float>&, const SyntheticStyleSpec&);
template BasicImage<double> synth_style_apply(const BasicImage<double>&, const SyntheticStyleSpec&);

std::vector<ImageD> generate_base_images(int count, int height, int width, std::uint64_t seed) {
  require(count >= 0, "image count must be nonnegative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<ImageD> out;
  out.reserve(static_cast<size_t>(count));
  for (int n = 0; n < count; ++n) {
    ImageD img(height, width, 16);
    // Per-channel linear ramps with random direction and range.
    for (int c = 0; c < 3; ++c) {
      const double a = unit(rng) * 2 * M_PI;
      const double lo = unit(rng) * 0.3, hi = 0.35 + unit(rng) * 0.6;
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
          const double t = 0.5 + 0.5 * (std::cos(a) * (2.0 * x / std::max(1, width - 1) - 1.0) +
                                        std::sin(a) * (2.0 * y / std::max(1, height - 1) - 1.0)) /
                                       std::sqrt(2.0);
          img.at(c, y, x) = lo + (hi - lo) * t;
        }
    }
    // Flat-coloured discs and boxes.
    const int shapes = 2 + static_cast<int>(unit(rng) * 5);
    for (int s = 0; s < shapes; ++s) {
      const double col[3] = {std::pow(unit(rng), 1.5), std::pow(unit(rng), 1.5), std::pow(unit(rng), 1.5)};
      const double cx = unit(rng) * width, cy = unit(rng) * height;
      const double rx = (0.08 + 0.3 * unit(rng)) * width, ry = (0.08 + 0.3 * unit(rng)) * height;
      const bool disc = unit(rng) < 0.5;
      for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
          const double dx = (x + 0.5 - cx) / rx, dy = (y + 0.5 - cy) / ry;
          const bool inside = disc ? dx * dx + dy * dy <= 1.0 : std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0;
          if (inside)
            for (int c = 0; c < 3; ++c) img.at(c, y, x) = col[c];
        }
    }
    const double sigma = 0.02 * unit(rng);
    for (double& v : img.data) v = std::clamp(v + sigma * noise(rng), 0.0, 1.0);
    out.push_back(std::move(img));
  }
  return out;
}

int StyleDataset::index_of(const std::string& id) const {
  for (size_t i = 0; i < ids.size(); ++i)
    if (ids[i] == id) return static_cast<int>(i);
  throw Error(ErrorKind::kNotFound, "unknown style '" + id + "'");
}

const ImageD& StyleDataset::at(int style, size_t item) const {
  const auto& slot = images.at(static_cast<size_t>(style)).at(item);
  if (!slot) throw Error(ErrorKind::kNotFound, "no image for style '" + ids[static_cast<size_t>(style)] + "' item " +
                                                   std::to_string(item));
  return *slot;
}

bool StyleDataset::has(int style, size_t item) const {
  return images.at(static_cast<size_t>(style)).at(item).has_value();
}

StyleDataset build_dataset(const std::vector<ImageD>& bases, const std::vector<NamedStyle>& styles) {
  StyleDataset ds;
  for (const auto& s : styles) {
    for (const auto& id : ds.ids) require(id != s.id, "duplicate style id '" + s.id + "'");
    ds.ids.push_back(s.id);
    ds.specs.push_back(s.spec);
    std::vector<std::optional<ImageD>> col;
    col.reserve(bases.size());
    for (const auto& b : bases) col.emplace_back(synth_style_apply(b, s.spec));
    ds.images.push_back(std::move(col));
  }
  return ds;
}

namespace {

std::string item_name(size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu.png", i);
  return buf;
}

void write_16bit(const std::string& path, const ImageD& img) {
  Image f = image_cast<float>(img);
  f.bit_depth = 16;
  write_image(path, f);
}

}  // namespace

void save_dataset(const std::string& dir, const std::vector<ImageD>& bases, const std::vector<NamedStyle>& styles) {
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "base", ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + dir + ": " + ec.message());
  json doc{{"version", 1}, {"styles", json::array()}};
  for (const auto& s : styles) {
    s.spec.validate();
    doc["styles"].push_back({{"id", s.id}, {"spec", spec_to_json(s.spec)}});
  }
  {
    std::ofstream f(fs::path(dir) / "styles.json");
    if (!f) throw Error(ErrorKind::kIo, "cannot write styles.json in " + dir);
    f << doc.dump(2) << '\n';
  }
  for (size_t i = 0; i < bases.size(); ++i) write_16bit((fs::path(dir) / "base" / item_name(i)).string(), bases[i]);
  // Pairs are rendered from the quantized bases so a reload reproduces them.
  std::vector<ImageD> stored;
  for (size_t i = 0; i < bases.size(); ++i)
    stored.push_back(image_cast<double>(read_image((fs::path(dir) / "base" / item_name(i)).string())));
  for (const auto& s : styles) {
    const fs::path pd = fs::path(dir) / "pairs" / s.id;
    fs::create_directories(pd, ec);
    if (ec) throw Error(ErrorKind::kIo, "cannot create " + pd.string());
    for (size_t i = 0; i < stored.size(); ++i)
      write_16bit((pd / item_name(i)).string(), synth_style_apply(stored[i], s.spec));
  }
}

StyleDataset load_dataset(const std::string& dir) {
  const fs::path root(dir);
  std::ifstream f(root / "styles.json");
  if (!f) throw Error(ErrorKind::kIo, "dataset " + dir + " has no styles.json");
  std::vector<NamedStyle> styles;
  try {
    const json doc = json::parse(f);
    for (const auto& s : doc.at("styles"))
      styles.push_back({s.at("id").get<std::string>(), spec_from_json(s.at("spec"))});
  } catch (const json::exception& e) {
    throw_invalid("malformed styles.json: " + std::string(e.what()));
  }
  require(!styles.empty(), "styles.json lists no styles");

  std::vector<fs::path> files;
  if (fs::is_directory(root / "base"))
    for (const auto& e : fs::directory_iterator(root / "base")) {
      const std::string ext = e.path().extension().string();
      if (e.is_regular_file() && (ext == ".png" || ext == ".ppm" || ext == ".pnm")) files.push_back(e.path());
    }
  std::sort(files.begin(), files.end());
  require(!files.empty(), "dataset " + dir + " has no base images");

  StyleDataset ds;
  std::vector<ImageD> bases;
  for (const auto& p : files) bases.push_back(image_cast<double>(read_image(p.string())));
  for (const auto& s : styles) {
    for (const auto& id : ds.ids) require(id != s.id, "duplicate style id '" + s.id + "'");
    ds.ids.push_back(s.id);
    ds.specs.push_back(s.spec);
    std::vector<std::optional<ImageD>> col;
    for (size_t i = 0; i < files.size(); ++i) {
      const fs::path cached = root / "pairs" / s.id / files[i].filename().replace_extension(".png");
      if (fs::exists(cached))
        col.emplace_back(image_cast<double>(read_image(cached.string())));
      else
        col.emplace_back(synth_style_apply(bases[i], s.spec));
    }
    ds.images.push_back(std::move(col));
  }
  return ds;
}

std::vector<NamedStyle> preset_styles(const std::string& name) {
  SyntheticStyleSpec warm, cool, fade, punch, holdout;
  warm.gamma = {0.85, 0.95, 1.2};
  warm.gains = {1.0, 0.9, 0.6};
  cool.gamma = {1.25, 1.05, 0.9};
  cool.gains = {0.6, 0.9, 1.0};
  fade.gamma = {0.9, 0.9, 0.9};
  fade.lift = 0.08;
  fade.gain = 0.85;
  punch.gamma = {1.45, 1.4, 1.35};
  punch.gains = {1.0, 1.0, 0.97};
  holdout.gamma = {1.05, 1.0, 0.98};
  holdout.gains = {0.93, 0.97, 0.92};
  holdout.lift = 0.04;
  holdout.gain = 0.92;
  if (name == "gamma2") return {{"warm", warm}, {"cool", cool}};
  if (name == "matrix4") return {{"warm", warm}, {"cool", cool}, {"fade", fade}, {"punch", punch}};
  if (name == "holdout5") return {{"warm", warm}, {"cool", cool}, {"fade", fade}, {"punch", punch}, {"holdout", holdout}};
  throw_invalid("unknown style preset '" + name + "' (use gamma2, matrix4 or holdout5)");
}

}  // namespace starenh::synth
