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

#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <random>

#include "starenh/curveset_io.hpp"
#include "starenh/image_io.hpp"
#include "starenh/nn/optim.hpp"
#include "starenh/nn/weights_io.hpp"
#include "test_util.hpp"

using namespace starenh;
using namespace starenh::nn;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("starenh_io_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Image quantized_image(std::mt19937_64& rng, int h, int w, int depth) {
  const int maxv = depth == 16 ? 65535 : 255;
  std::uniform_int_distribution<int> d(0, maxv);
  Image img(h, w, depth);
  for (float& v : img.data) v = static_cast<float>(d(rng)) * static_cast<float>(1.0 / maxv);
  return img;
}

}  // namespace

TEST_CASE("adam matches a hand-computed first step") {
  auto p = parameter(Tensor({2}, {1.0, -2.0}));
  Adam opt;
  opt.add_group({p}, 1.0);
  p->grad_buffer()[0] = 0.5;
  p->grad_buffer()[1] = -3.0;
  opt.step(0.1);
  // First bias-corrected step is lr * g / (|g| + eps).
  CHECK(p->value[0] == doctest::Approx(1.0 - 0.1 * 0.5 / (0.5 + 1e-8)).epsilon(1e-14));
  CHECK(p->value[1] == doctest::Approx(-2.0 + 0.1 * 3.0 / (3.0 + 1e-8)).epsilon(1e-14));
  CHECK(p->grad[0] == 0.0);
  CHECK_THROWS_AS(opt.add_group({p}), Error);
}

TEST_CASE("adam minimizes a quadratic and honours group multipliers") {
  auto a = parameter(Tensor({3}, {3.0, -1.0, 2.0}));
  auto b = parameter(Tensor({1}, {5.0}));
  Adam opt;
  opt.add_group({a}, 1.0);
  opt.add_group({b}, 10.0);
  for (int i = 0; i < 2000; ++i) {
    for (size_t k = 0; k < 3; ++k) a->grad_buffer()[k] = 2 * a->value[k];
    b->grad_buffer()[0] = 2 * b->value[0];
    opt.step(0.01);
  }
  for (double v : a->value.values()) CHECK(std::abs(v) < 1e-2);
  CHECK(std::abs(b->value[0]) < 1e-2);
  CHECK(opt.steps() == 2000);
}

TEST_CASE("weights bundle round-trips") {
  ModelBundle bundle;
  bundle.put(fixup_init(StyleEncoderConfig{TrunkConfig{16, 4, {4, 8}, 1}, 3, 30.0}, 1));
  bundle.put(fixup_init(MappingConfig{8, 16, 2, {4, 6}}, 2));
  bundle.put(fixup_init(CurveEncoderConfig{TrunkConfig{16, 4, {4, 6}, 1}, CurveLayout::uniform(5, 3)}, 3));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d(0, 1);
  for (auto& m : bundle.models)
    for (auto& [_, t] : m.tensors)
      for (double& v : t.values()) v = d(rng);  // not float-representable
  std::vector<double> lat(8);
  for (double& v : lat) v = d(rng);
  bundle.styles.emplace("expert", style::average_latent(std::vector<style::Embedding>{lat}, "unit test"));

  const std::string path = temp_path("bundle.bin");
  save_bundle(path, bundle);
  const ModelBundle back = load_bundle(path);
  REQUIRE(back.models.size() == 3);
  for (size_t m = 0; m < 3; ++m) {
    CHECK(back.models[m].kind == bundle.models[m].kind);
    CHECK(back.models[m].config == bundle.models[m].config);
    for (size_t t = 0; t < bundle.models[m].tensors.size(); ++t) {
      const auto& [n0, t0] = bundle.models[m].tensors[t];
      const auto& [n1, t1] = back.models[m].tensors[t];
      CHECK(n0 == n1);
      REQUIRE(t0.shape() == t1.shape());
      for (size_t i = 0; i < t0.size(); ++i) CHECK(t1[i] == static_cast<double>(static_cast<float>(t0[i])));
    }
  }
  CHECK(back.styles.at("expert").values == bundle.styles.at("expert").values);
  CHECK(encode_bundle(back) == encode_bundle(load_bundle(path)));
  CHECK(encode_bundle(decode_bundle(encode_bundle(back))) == encode_bundle(back));

  // Loaded weights rebuild working modules.
  CHECK_NOTHROW(CurveEncoder(back.require_model(kCurveEncoderKind)));
  CHECK_THROWS_AS(ModelBundle{}.require_model(kMappingKind), Error);
  std::remove(path.c_str());
}

TEST_CASE("weights decoding rejects corrupt input") {
  ModelBundle bundle;
  bundle.put(fixup_init(MappingConfig{4, 4, 1, {2}}, 2));
  const std::string good = encode_bundle(bundle);
  CHECK_THROWS_AS(decode_bundle("STARENH2" + good.substr(8)), Error);
  CHECK_THROWS_AS(decode_bundle(good.substr(0, good.size() - 1)), Error);
  CHECK_THROWS_AS(decode_bundle(good + "x"), Error);
  CHECK_THROWS_AS(decode_bundle(good.substr(0, 12)), Error);
  std::string bad_header = good;
  bad_header[16] = '[';
  CHECK_THROWS_AS(decode_bundle(bad_header), Error);
  CHECK_THROWS_AS(load_bundle(temp_path("does_not_exist.bin")), Error);
}

TEST_CASE("16-bit and 8-bit PNG round-trips are bit-exact") {
  std::mt19937_64 rng(6);
  for (int depth : {8, 16}) {
    const Image img = quantized_image(rng, 13, 17, depth);
    const Image back = decode_image(encode_image(img));
    CHECK(back.bit_depth == depth);
    CHECK(back == img);
    const Image ppm = decode_image(encode_image(img, ImageFormat::kPpm));
    CHECK(ppm == img);
  }
}

TEST_CASE("16-bit PNG file through zero curves is recovered exactly") {
  std::mt19937_64 rng(7);
  const Image img = quantized_image(rng, 31, 23, 16);
  const std::string in = temp_path("in16.png"), out = temp_path("out16.png");
  write_image(in, img);
  const Image loaded = read_image(in);
  Image result = enhance<float>(loaded, CurveSet::zeros(CurveLayout::uniform()), kDefaultDepth, true, 1);
  result.bit_depth = loaded.bit_depth;
  write_image(out, result);
  CHECK(read_image(out) == img);
  CHECK(slurp(out) == slurp(in));
  std::remove(in.c_str());
  std::remove(out.c_str());
}

TEST_CASE("image decoding errors") {
  CHECK_THROWS_AS(decode_image("not an image"), Error);
  CHECK_THROWS_AS(decode_image("P6\n2 2\n255\n\x01\x02"), Error);
  CHECK_THROWS_AS(decode_image("P6\n2 2\n100\n"), Error);
  const std::string png = encode_image(Image(4, 4));
  CHECK_THROWS_AS(decode_image(png.substr(0, png.size() / 2)), Error);
  CHECK_THROWS_AS(write_image(temp_path("x.bmp"), Image(2, 2)), Error);
  CHECK_THROWS_AS(read_image(temp_path("missing.png")), Error);
}

TEST_CASE("encoding clamps out-of-range samples") {
  Image img(1, 2, 8);
  img.data = {-0.5f, 1.5f, 0.5f, 0.5f, 0.0f, 1.0f};
  const Image back = decode_image(encode_image(img));
  CHECK(back.at(0, 0, 0) == 0.0f);
  CHECK(back.at(0, 0, 1) == 1.0f);
  CHECK(back.at(1, 0, 0) == static_cast<float>(128) * static_cast<float>(1.0 / 255));
}
