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

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "starenh/curveset_io.hpp"
#include "starenh/enhancer.hpp"
#include "test_util.hpp"

using namespace starenh;

namespace {

CurveSet with_curve(const CurveLayout& layout, int source, int output, std::vector<double> knots) {
  CurveSet cs = CurveSet::zeros(layout);
  cs.mutable_at(curve_index(source, output)) = curves::CurveKnots(std::move(knots));
  return cs;
}

}  // namespace

TEST_CASE("curve names") {
  CHECK(curve_name(curve_index(0, 1)) == "r_to_g");
  CHECK(curve_name(curve_index(4, 2)) == "y_to_b");
  for (int i = 0; i < kCurveCount; ++i) CHECK(parse_curve_name(curve_name(i)) == i);
  CHECK_THROWS_AS(parse_curve_name("q_to_r"), Error);
}

TEST_CASE("build_lut_set") {
  const auto layout = CurveLayout::uniform();
  const auto zero = build_lut_set<double>(CurveSet::zeros(layout), 8, 5, 7);
  for (const auto& t : zero.tables)
    for (double v : t) CHECK(v == 0.0);
  CHECK(zero.table(3, 0).size() == 7);
  CHECK(zero.table(4, 0).size() == 5);
  CHECK(zero.table(0, 0).size() == 256);

  const auto line = build_lut_set<double>(with_curve(CurveLayout::uniform(2, 2), 0, 0, {0, 1}), 2, 3, 3);
  const auto& t = line.table(0, 0);
  REQUIRE(t.size() == 4);
  CHECK(t[0] == 0.0);
  CHECK(t[1] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(t[2] == doctest::Approx(2.0 / 3).epsilon(1e-15));
  CHECK(t[3] == 1.0);

  std::mt19937_64 rng(4);
  const auto cs = testutil::random_curves(rng, layout);
  const auto luts = build_lut_set<double>(cs, 8, 10, 12);
  for (int i = 0; i < kCurveCount; ++i) {
    const auto& tab = luts.tables[static_cast<size_t>(i)];
    for (size_t k = 0; k < tab.size(); ++k)
      CHECK(tab[k] == curves::eval_curve(cs.at(i).values(), static_cast<double>(k) / (tab.size() - 1)));
  }

  // one-pixel rows/columns take the curve value at t = 0
  const auto thin = build_lut_set<double>(cs, 8, 1, 1);
  CHECK(thin.table(3, 1) == std::vector<double>{cs.at(3, 1)[0]});
  CHECK(thin.table(4, 2) == std::vector<double>{cs.at(4, 2)[0]});

  CHECK_THROWS_AS(build_lut_set<double>(cs, 0, 4, 4), Error);
  CHECK_THROWS_AS(build_lut_set<double>(cs, 17, 4, 4), Error);
}

TEST_CASE("render_residual examples") {
  std::mt19937_64 rng(5);
  const auto layout = CurveLayout::uniform();
  const auto img = testutil::random_image<double>(rng, 9, 11);
  const auto zero = render_residual(img, build_lut_set<double>(CurveSet::zeros(layout), 8, 9, 11));
  for (double v : zero.data) CHECK(v == 0.0);

  const auto cs = testutil::random_curves(rng, layout);
  ImageD white(1, 1, 8, 1.0);
  const auto luts = build_lut_set<double>(cs, 8, 1, 1);
  const auto r = render_residual(white, luts);
  for (int j = 0; j < 3; ++j) {
    const double expect = luts.table(0, j)[255] + luts.table(1, j)[255] + luts.table(2, j)[255] +
                          luts.table(4, j)[0] + luts.table(3, j)[0];
    CHECK(r.at(j, 0, 0) == expect);
  }

  const auto big = testutil::random_image<double>(rng, 32, 32);
  CHECK(render_residual(big, build_lut_set<double>(cs, 8, 32, 32)) == oracle::naive_residual(big, cs, 8));
  CHECK_THROWS_AS(render_residual(big, luts), Error);
}

TEST_CASE("render matches the naive loop for float, odd depths and thread counts") {
  std::mt19937_64 rng(6);
  const auto layout = CurveLayout::uniform(5, 3);
  for (int depth : {1, 4, 8, 10}) {
    const auto cs = testutil::random_curves(rng, layout);
    const auto img = testutil::random_image<float>(rng, 13, 7);
    const auto luts = build_lut_set<float>(cs, depth, 13, 7);
    const auto ref = oracle::naive_residual(img, cs, depth);
    CHECK(render_residual(img, luts) == ref);
    CHECK(render_residual(img, luts, 4) == ref);
  }
}

TEST_CASE("enhance examples") {
  std::mt19937_64 rng(7);
  const auto layout = CurveLayout::uniform();
  const auto img = testutil::random_image<double>(rng, 16, 20);
  CHECK(enhance(img, CurveSet::zeros(layout), 8, false) == img);

  ImageD half(4, 4, 8, 0.5);
  const auto out = enhance(half, with_curve(CurveLayout::uniform(2, 2), 0, 0, {0.1, 0.1}), 8, false);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) {
      CHECK(out.at(0, y, x) == 0.6);
      CHECK(out.at(1, y, x) == 0.5);
      CHECK(out.at(2, y, x) == 0.5);
    }

  const auto cs = testutil::random_curves(rng, layout, 0.5);
  const auto ref = oracle::naive_residual(img, cs, 8);
  auto expect = img;
  for (size_t i = 0; i < expect.data.size(); ++i) expect.data[i] = ref.data[i] + img.data[i];
  CHECK(enhance(img, cs, 8, false) == expect);
  auto clamped = expect;
  clamp_unit(clamped);
  CHECK(enhance(img, cs, 8, true) == clamped);
}

TEST_CASE("apply_sliders and set_knot") {
  std::mt19937_64 rng(8);
  const auto layout = CurveLayout::uniform();
  const auto cs = testutil::random_curves(rng, layout);
  CHECK(apply_sliders(cs, SliderSettings{}) == cs);

  SliderSettings s;
  s.beta[static_cast<size_t>(curve_index(0, 0))] = 0.0;
  const auto off = apply_sliders(cs, s);
  for (double v : off.at(0, 0).values()) CHECK(v == 0.0);
  for (int i = 1; i < kCurveCount; ++i) CHECK(off.at(i) == cs.at(i));

  const auto img = testutil::random_image<double>(rng, 12, 12);
  const auto base = render_residual(img, build_lut_set<double>(cs, 8, 12, 12));
  const auto halved = render_residual(img, build_lut_set<double>(apply_sliders(cs, SliderSettings::all(0.5)), 8, 12, 12));
  for (size_t i = 0; i < base.data.size(); ++i) CHECK(std::abs(halved.data[i] - 0.5 * base.data[i]) < 1e-12);

  CHECK_THROWS_AS(apply_sliders(cs, SliderSettings::all(2.5)), Error);
  CHECK_THROWS_AS(apply_sliders(cs, SliderSettings::all(-0.1)), Error);

  const auto edited = set_knot(cs, 1, 2, 3, 0.75);
  CHECK(edited.at(1, 2)[3] == 0.75);
  CHECK(set_knot(cs, 1, 2, 3, cs.at(1, 2)[3]) == cs);
  CHECK_THROWS_AS(set_knot(cs, 1, 2, 17, 0.0), Error);
  CHECK_THROWS_AS(set_knot(cs, 5, 0, 0, 0.0), Error);

  // the r residual of a black pixel moves by exactly the change in table entry 0
  ImageD black(1, 1);
  const auto moved = set_knot(cs, 0, 0, 0, 0.3);
  const auto before = render_residual(black, build_lut_set<double>(cs, 8, 1, 1));
  const auto after = render_residual(black, build_lut_set<double>(moved, 8, 1, 1));
  const double t_before = build_lut_set<double>(cs, 8, 1, 1).table(0, 0)[0];
  const double t_after = build_lut_set<double>(moved, 8, 1, 1).table(0, 0)[0];
  CHECK(t_after == 0.3);
  CHECK(after.at(0, 0, 0) - before.at(0, 0, 0) == doctest::Approx(t_after - t_before).epsilon(1e-12));
  CHECK(after.at(1, 0, 0) == before.at(1, 0, 0));
}

TEST_CASE("colour contributions do not depend on image size") {
  std::mt19937_64 rng(9);
  const auto layout = CurveLayout::uniform();
  auto cs = testutil::random_curves(rng, layout);
  for (int i = 9; i < kCurveCount; ++i) cs.mutable_at(i) = CurveSet::zeros(layout).at(i);
  ImageD small(3, 4, 8, 0.37);
  ImageD large(50, 70, 8, 0.37);
  const auto a = render_residual(small, build_lut_set<double>(cs, 8, 3, 4));
  const auto b = render_residual(large, build_lut_set<double>(cs, 8, 50, 70));
  for (int j = 0; j < 3; ++j) CHECK(a.at(j, 1, 2) == b.at(j, 33, 61));
}

TEST_CASE("table lookup stays within one table step of the continuous curve") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto layout = CurveLayout::uniform();
  const auto cs = testutil::random_curves(rng, layout, 0.5);
  const auto luts = build_lut_set<double>(cs, 8, 2, 2);
  for (int i = 0; i < 9; ++i) {
    const auto& tab = luts.tables[static_cast<size_t>(i)];
    double gap = 0;
    for (size_t k = 1; k < tab.size(); ++k) gap = std::max(gap, std::abs(tab[k] - tab[k - 1]));
    for (int s = 0; s < 500; ++s) {
      const double v = u(rng);
      const double lookup = tab[static_cast<size_t>(color_index(v, 255.0, 255))];
      CHECK(std::abs(lookup - curves::eval_curve(cs.at(i).values(), v)) <= gap + 1e-15);
    }
  }
}

TEST_CASE("colour-only rendering commutes with pixel permutation") {
  std::mt19937_64 rng(11);
  const auto layout = CurveLayout::uniform();
  auto cs = testutil::random_curves(rng, layout);
  for (int i = 9; i < kCurveCount; ++i) cs.mutable_at(i) = CurveSet::zeros(layout).at(i);
  const auto img = testutil::random_image<float>(rng, 8, 9);
  std::vector<size_t> perm(img.plane_size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Image shuffled = img;
  for (int c = 0; c < 3; ++c)
    for (size_t p = 0; p < perm.size(); ++p) shuffled.channel(c)[p] = img.channel(c)[perm[p]];
  const auto out = enhance(img, cs, 8, false);
  const auto out_shuffled = enhance(shuffled, cs, 8, false);
  for (int c = 0; c < 3; ++c)
    for (size_t p = 0; p < perm.size(); ++p) CHECK(out_shuffled.channel(c)[p] == out.channel(c)[perm[p]]);
}

TEST_CASE("curve set JSON") {
  std::mt19937_64 rng(12);
  const auto cs = testutil::random_curves(rng, CurveLayout::uniform());
  SliderSettings s = SliderSettings::all(0.7);
  s.beta[3] = 1.9;
  const auto doc = curveset_to_json(cs, s);
  CHECK(doc["version"] == 1);
  CHECK(doc["curves"].contains("y_to_b"));
  const auto back = curveset_from_json(nlohmann::json::parse(doc.dump()));
  CHECK(back.curves == cs);
  REQUIRE(back.sliders);
  CHECK(*back.sliders == s);
  CHECK_FALSE(curveset_from_json(curveset_to_json(cs)).sliders);

  auto broken = doc;
  broken["curves"].erase("r_to_r");
  CHECK_THROWS_AS(curveset_from_json(broken), Error);
  auto bad_slider = doc;
  bad_slider["sliders"]["r_to_r"] = 3.0;
  CHECK_THROWS_AS(curveset_from_json(bad_slider), Error);
}
