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

#include "starenh/nn/weights_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace starenh::nn {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "weights I/O assumes a little-endian host");

const ModelWeights* ModelBundle::find(const std::string& kind) const {
  for (const auto& m : models)
    if (m.kind == kind) return &m;
  return nullptr;
}

const ModelWeights& ModelBundle::require_model(const std::string& kind) const {
  const ModelWeights* m = find(kind);
  if (!m) throw Error(ErrorKind::kNotFound, "model file has no " + kind + " weights");
  return *m;
}

void ModelBundle::put(ModelWeights weights) {
  for (auto& m : models)
    if (m.kind == weights.kind) {
      m = std::move(weights);
      return;
    }
  models.push_back(std::move(weights));
}

std::string encode_bundle(const ModelBundle& bundle) {
  json header{{"format", "starenh-weights"}, {"version", 1}, {"models", json::array()}, {"styles", json::object()}};
  std::string data;
  for (const auto& m : bundle.models) {
    m.validate_unique();
    json manifest = json::array();
    for (const auto& [name, t] : m.tensors) {
      manifest.push_back({{"name", name}, {"shape", t.shape()}});
      for (double v : t.values()) {
        const float f = static_cast<float>(v);
        require(std::isfinite(f), "tensor '" + name + "' has a non-finite value");
        char b[4];
        std::memcpy(b, &f, 4);
        data.append(b, 4);
      }
    }
    header["models"].push_back({{"kind", m.kind}, {"config", m.config}, {"tensors", manifest}});
  }
  for (const auto& [id, latent] : bundle.styles) header["styles"][id] = style::latent_to_json(latent);

  const std::string text = header.dump();
  const std::uint64_t len = text.size();
  std::string out(kWeightsMagic, sizeof kWeightsMagic);
  char b[8];
  std::memcpy(b, &len, 8);
  out.append(b, 8);
  out += text;
  out += data;
  return out;
}

ModelBundle decode_bundle(const std::string& bytes) {
  require(bytes.size() >= 16 && std::memcmp(bytes.data(), kWeightsMagic, 8) == 0, "not a starenh weights file");
  std::uint64_t len = 0;
  std::memcpy(&len, bytes.data() + 8, 8);
  require(len <= bytes.size() - 16, "weights header is truncated");
  json header;
  try {
    header = json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<std::ptrdiff_t>(len));
  } catch (const json::exception& e) {
    throw_invalid(std::string("weights header is not valid JSON: ") + e.what());
  }
  size_t pos = 16 + len;
  ModelBundle bundle;
  try {
    require(header.at("version").get<int>() == 1, "unsupported weights version");
    for (const auto& m : header.at("models")) {
      ModelWeights w{m.at("kind").get<std::string>(), m.at("config"), {}};
      for (const auto& t : m.at("tensors")) {
        Tensor tensor(t.at("shape").get<std::vector<int>>());
        require(bytes.size() - pos >= tensor.size() * 4, "weights data is truncated");
        for (double& v : tensor.values()) {
          float f;
          std::memcpy(&f, bytes.data() + pos, 4);
          pos += 4;
          v = f;
        }
        w.tensors.emplace_back(t.at("name").get<std::string>(), std::move(tensor));
      }
      w.validate_unique();
      require(bundle.find(w.kind) == nullptr, "weights file repeats model kind '" + w.kind + "'");
      bundle.models.push_back(std::move(w));
    }
    if (header.contains("styles"))
      for (const auto& [id, doc] : header.at("styles").items()) bundle.styles.emplace(id, style::latent_from_json(doc));
  } catch (const json::exception& e) {
    throw_invalid(std::string("malformed weights header: ") + e.what());
  }
  require(pos == bytes.size(), "weights file has trailing bytes");
  return bundle;
}

void save_bundle(const std::string& path, const ModelBundle& bundle) {
  const std::string bytes = encode_bundle(bundle);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + path);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorKind::kIo, "failed writing " + path);
}

ModelBundle load_bundle(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return decode_bundle(ss.str());
}

}  // namespace starenh::nn
