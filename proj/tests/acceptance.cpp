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

// Acceptance runner: one PASS/FAIL line per criterion at the pinned tolerances.
// Exit status is 0 only if every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "starenh/app.hpp"
#include "starenh/colorspace.hpp"
#include "starenh/curveset_io.hpp"
#include "starenh/image_io.hpp"
#include "starenh/nn/weights_io.hpp"
#include "starenh/pipeline.hpp"
#include "starenh/style.hpp"
#include "starenh/training.hpp"
#include "test_util.hpp"

using namespace starenh;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <class T>
double max_abs(const BasicImage<T>& a, const BasicImage<T>& b) {
  double m = 0;
  for (size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(double(a.data[i]) - double(b.data[i])));
  return m;
}

std::vector<double> random_knots(std::mt19937_64& rng, int m, double scale = 0.3) {
  std::normal_distribution<double> n(0.0, scale);
  std::vector<double> u(static_cast<size_t>(m));
  for (double& v : u) v = n(rng);
  return u;
}

// --- 1. interpolation ------------------------------------------------------

Outcome interpolation_suite() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> knots(2, 33);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int violations = 0;
  double knot_err = 0, linear_err = 0, homog_err = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = knots(rng);
    std::vector<double> u(static_cast<size_t>(m));
    for (double& v : u) v = u01(rng) < 0.2 ? 0.0 : u01(rng);
    std::sort(u.begin(), u.end());
    for (int k = 1; k < m; ++k) u[k] = u[k - 1] + u[k];  // plateaus and jumps
    const bool decreasing = trial % 2 == 1;
    if (decreasing)
      for (double& v : u) v = -v;
    const auto s = curves::sample_curve(u, 1001);
    for (size_t k = 1; k < s.size(); ++k)
      if (decreasing ? s[k] > s[k - 1] : s[k] < s[k - 1]) ++violations;

    for (int k = 0; k < m; ++k)
      knot_err = std::max(knot_err, std::abs(curves::eval_curve(u, static_cast<double>(k) / (m - 1)) - u[k]));

    const double a = u01(rng) - 0.5, b = 4.0 * (u01(rng) - 0.5);
    std::vector<double> lin(static_cast<size_t>(m));
    for (int k = 0; k < m; ++k) lin[k] = a + b * k / (m - 1);
    const double beta = 3.0 * u01(rng);
    const auto r = random_knots(rng, m);
    std::vector<double> scaled(r);
    for (double& v : scaled) v *= beta;
    for (int j = 0; j < 50; ++j) {
      const double t = u01(rng);
      linear_err = std::max(linear_err, std::abs(curves::eval_curve(lin, t) - (a + b * t)));
      homog_err = std::max(homog_err, std::abs(curves::eval_curve(scaled, t) - beta * curves::eval_curve(r, t)));
    }
  }
  const bool pass = violations == 0 && knot_err <= 1e-12 && linear_err <= 1e-12 && homog_err <= 1e-12;
  return {pass, fmt("1000 monotone vectors: %d violations; knot %.2e, linear %.2e, homogeneity %.2e (tol 1e-12)",
                    violations, knot_err, linear_err, homog_err)};
}

// --- 2. enhancer oracle ----------------------------------------------------

Outcome enhancer_oracle() {
  std::mt19937_64 rng(102);
  std::uniform_int_distribution<int> side(1, 64), color(2, 33), coord(2, 17), depth(1, 16);
  int mismatches = 0, identity_fail = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int h = side(rng), w = side(rng), d = depth(rng);
    CurveLayout layout = CurveLayout::uniform(color(rng), coord(rng));
    const auto cs = testutil::random_curves(rng, layout, 0.3);
    auto img = testutil::random_image<double>(rng, h, w);
    const auto ref = oracle::naive_residual(img, cs, d);
    ImageD expect = img;
    for (size_t i = 0; i < expect.data.size(); ++i) expect.data[i] = ref.data[i] + img.data[i];
    if (!(enhance(img, cs, d, false) == expect)) ++mismatches;
    if (!(enhance(img, CurveSet::zeros(layout), d, false) == img) ||
        !(enhance(img, CurveSet::zeros(layout), d, true) == img))
      ++identity_fail;
  }
  return {mismatches == 0 && identity_fail == 0,
          fmt("100 random images/CurveSets: %d renderer mismatches, %d zero-curve identity failures", mismatches,
              identity_fail)};
}

// --- 3. slider homogeneity -------------------------------------------------

Outcome slider_homogeneity() {
  std::mt19937_64 rng(103);
  double worst = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto cs = testutil::random_curves(rng, CurveLayout::uniform(), 0.3);
    const auto img = testutil::random_image<double>(rng, 40, 56);
    const auto base = render_residual(img, build_lut_set<double>(cs, 8, 40, 56));
    for (double beta : {0.0, 0.25, 0.5, 1.0, 1.5, 2.0}) {
      const auto r = render_residual(img, build_lut_set<double>(apply_sliders(cs, SliderSettings::all(beta)), 8, 40, 56));
      for (size_t i = 0; i < r.data.size(); ++i) worst = std::max(worst, std::abs(r.data[i] - beta * base.data[i]));
    }
  }
  return {worst <= 1e-9, fmt("max |residual(beta) - beta*residual| = %.2e over beta in {0,.25,.5,1,1.5,2} (tol 1e-9)", worst)};
}

// --- 4. dual adain ---------------------------------------------------------

Outcome dual_adain_algebra() {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> mu(-1.0, 1.0), sig(0.25, 4.0), feat(-3.0, 3.0);
  auto f32 = [](double v) { return static_cast<double>(static_cast<float>(v)); };
  bool identity_exact = true;
  double roundtrip = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 3, c = 1 + trial % 7, h = 2 + trial % 5, w = 3 + trial % 4;
    nn::Tensor f({n, c, h, w}), ma({n, c}), sa({n, c}), mb({n, c}), sb({n, c});
    for (double& v : f.values()) v = f32(feat(rng));
    for (size_t i = 0; i < ma.size(); ++i) {
      ma[i] = f32(mu(rng));
      sa[i] = f32(sig(rng));
      mb[i] = f32(mu(rng));
      sb[i] = f32(sig(rng));
    }
    using nn::constant;
    const auto same = nn::dual_adain(constant(f), constant(ma), constant(sa), constant(ma), constant(sa));
    if (!(same->value == f)) identity_exact = false;
    const auto ab = nn::dual_adain(constant(f), constant(ma), constant(sa), constant(mb), constant(sb));
    nn::Tensor ab32 = ab->value;
    for (double& v : ab32.values()) v = f32(v);
    const auto back = nn::dual_adain(constant(ab32), constant(mb), constant(sb), constant(ma), constant(sa));
    for (size_t i = 0; i < f.size(); ++i)
      roundtrip = std::max(roundtrip, std::abs(back->value[i] - f[i]) / std::max(1.0, std::abs(f[i])));
  }
  return {identity_exact && roundtrip <= 1e-6,
          fmt("identity codes exact: %s; a->b->a round trip through float32 %.2e (tol 1e-6)",
              identity_exact ? "yes" : "no", roundtrip)};
}

// --- 5. style math ---------------------------------------------------------

Outcome style_math() {
  std::mt19937_64 rng(105);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  double norm_err = 0, perm_err = 0, uniform_err = 0, scale_err = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int e = 2 + trial % 63, count = 1 + trial % 25;
    std::vector<style::Embedding> emb(static_cast<size_t>(count), style::Embedding(static_cast<size_t>(e)));
    for (auto& f : emb)
      for (double& v : f) v = nd(rng) + 0.5;
    const auto c = style::average_latent(emb);
    double n2 = 0;
    for (double v : c.values) n2 += v * v;
    norm_err = std::max(norm_err, std::abs(std::sqrt(n2) - 1.0));
    std::shuffle(emb.begin(), emb.end(), rng);
    const auto c2 = style::average_latent(emb);
    for (int i = 0; i < e; ++i) perm_err = std::max(perm_err, std::abs(c.values[i] - c2.values[i]));

    const int q = 2 + trial % 15;
    style::ClassifierHead head;
    head.scale = 30.0;
    std::vector<double> row(static_cast<size_t>(e));
    for (double& v : row) v = nd(rng);
    head.weights.assign(static_cast<size_t>(q), row);
    uniform_err = std::max(uniform_err, std::abs(style::classify_loss(emb[0], head, trial % q) - std::log(q)));

    for (auto& r : head.weights)
      for (double& v : r) v = nd(rng);
    const double base = style::classify_loss(emb[0], head, trial % q);
    style::ClassifierHead scaled = head;
    for (auto& r : scaled.weights) {
      const double k = scale(rng);
      for (double& v : r) v *= k;
    }
    std::vector<double> f = emb[0];
    const double k = scale(rng);
    for (double& v : f) v *= k;
    scale_err = std::max(scale_err, std::abs(style::classify_loss(f, scaled, trial % q) - base));
  }
  const bool pass = norm_err <= 1e-6 && perm_err <= 1e-12 && uniform_err <= 1e-9 && scale_err <= 1e-9;
  return {pass, fmt("unit norm %.2e (tol 1e-6), permutation %.2e (tol 1e-12), uniform ln|Q| %.2e, scale %.2e (tol 1e-9)",
                    norm_err, perm_err, uniform_err, scale_err)};
}

// --- 6. gradient checks ----------------------------------------------------

Outcome gradient_checks() {
  const auto t0 = Clock::now();
  using namespace gradcheck;
  const auto dense = dense_suite();
  const std::vector<std::pair<std::string, GradReport>> ops{
      {"conv", conv2d_suite()},          {"fc", dense.linear},        {"pool", dense.pooling},
      {"elementwise", dense.elementwise}, {"dual_adain", dual_adain_suite()}, {"render", render_suite()},
      {"lab_l1", lab_l1_suite()},        {"classify", classify_suite()}, {"full_graph", full_graph_suite()}};
  const double secs = seconds_since(t0);
  bool pass = secs < 300.0;
  std::string detail;
  for (const auto& [name, r] : ops) {
    pass = pass && r.worst <= kGradTol;
    detail += fmt("%s %.1e, ", name.c_str(), r.worst);
  }
  return {pass, detail + fmt("%d cases/op, tol 1e-4, %.1f s (limit 300 s)", kCases, secs)};
}

// --- shared training stack -------------------------------------------------

struct StackConfig {
  int bases = 200;
  int size = 64;
  int test_count = 40;
  uint64_t data_seed = 7;
  nn::StyleEncoderConfig style{nn::TrunkConfig{32, 16, {16, 32, 64}, 1}, 2, 30.0};
  nn::MappingConfig mapping{64, 128, 2, {16, 32, 64, 96}};
  nn::CurveEncoderConfig encoder{nn::TrunkConfig{32, 16, {16, 32, 64, 96}, 1}, CurveLayout::uniform(17, 9)};
  train::TrainConfig style_train;
  train::TrainConfig enhancer_train;
};

StackConfig default_stack() {
  StackConfig c;
  c.style_train.epochs = 25;
  c.style_train.batch_size = 16;
  c.style_train.lr = 1e-3;
  c.style_train.seed = 1;
  c.enhancer_train.epochs = 30;
  c.enhancer_train.batch_size = 16;
  c.enhancer_train.lr = 1e-3;
  c.enhancer_train.seed = 2;
  return c;
}

struct Stack {
  synth::StyleDataset data;
  std::vector<size_t> train_items, test_items;
  train::StyleTrainResult style;
  double test_recall = 0;
  std::unique_ptr<nn::StyleEncoder> style_encoder;
  std::unique_ptr<nn::MappingNetwork> mapping;
  std::unique_ptr<nn::CurveEncoder> encoder;
  train::EnhancerTrainResult enhancer;
  std::vector<std::vector<double>> matrix;
  double style_seconds = 0, enhancer_seconds = 0;
};

double mean_recall(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

std::unique_ptr<Stack> train_stack(const StackConfig& cfg, const std::vector<synth::NamedStyle>& styles) {
  auto s = std::make_unique<Stack>();
  const auto bases = synth::generate_base_images(cfg.bases, cfg.size, cfg.size, cfg.data_seed);
  s->data = synth::build_dataset(bases, styles);
  std::tie(s->train_items, s->test_items) = train::split_items(s->data.items(), static_cast<size_t>(cfg.test_count));

  auto t0 = Clock::now();
  s->style = train::train_style_encoder(s->data, s->train_items, cfg.style, cfg.style_train);
  s->style_encoder = std::make_unique<nn::StyleEncoder>(s->style.weights);
  std::vector<style::Embedding> emb;
  std::vector<int> labels;
  for (int q = 0; q < s->data.styles(); ++q) {
    std::vector<const ImageD*> imgs;
    for (size_t i : s->test_items) imgs.push_back(&s->data.at(q, i));
    for (auto& f : train::embed_images(*s->style_encoder, imgs)) {
      emb.push_back(std::move(f));
      labels.push_back(q);
    }
  }
  s->test_recall = mean_recall(style::recall_at_1(emb, labels, s->style.latents).recall);
  s->style_seconds = seconds_since(t0);

  t0 = Clock::now();
  s->enhancer = train::train_enhancer(s->data, s->train_items, s->style.pools, cfg.mapping, cfg.encoder,
                                      cfg.enhancer_train);
  s->mapping = std::make_unique<nn::MappingNetwork>(s->enhancer.mapping);
  s->encoder = std::make_unique<nn::CurveEncoder>(s->enhancer.encoder);
  s->matrix = train::style_matrix_eval(*s->mapping, *s->encoder, s->style.latents, s->data, s->test_items);
  s->enhancer_seconds = seconds_since(t0);
  return s;
}

std::string matrix_text(const std::vector<std::vector<double>>& m) {
  std::string out = "[";
  for (size_t i = 0; i < m.size(); ++i) {
    out += i ? "; " : "";
    for (size_t j = 0; j < m[i].size(); ++j) out += fmt(j ? " %.1f" : "%.1f", m[i][j]);
  }
  return out + "]";
}

// --- 7. initialization invariant -------------------------------------------

Outcome init_invariant() {
  std::mt19937_64 rng(107);
  const StackConfig cfg = default_stack();
  const nn::CurveEncoder enc(nn::fixup_init(cfg.encoder, 5));
  auto mw = nn::fixup_init(cfg.mapping, 6);
  gradcheck::randomize(mw, rng, 0.2);
  const nn::MappingNetwork map(mw);
  int failures = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::normal_distribution<double> nd;
    std::vector<double> a(64), b(64);
    for (double& v : a) v = nd(rng);
    for (double& v : b) v = nd(rng);
    const auto ca = map.codes(style::average_latent(std::vector<style::Embedding>{a}));
    const auto cb = map.codes(style::average_latent(std::vector<style::Embedding>{b}));
    Image img = testutil::random_image<float>(rng, 1 + trial * 7, 3 + trial * 5);
    if (trial % 2) img.bit_depth = 16;
    const CurveSet cs = enc.predict(img, ca, cb);
    if (!(cs == CurveSet::zeros(cfg.encoder.layout)) || !(enhance(img, cs, 8, true) == img)) ++failures;
  }

  const auto bases = synth::generate_base_images(24, 32, 32, 3);
  const auto ds = synth::build_dataset(bases, synth::preset_styles("matrix4"));
  const auto [tr, te] = train::split_items(ds.items(), 0);
  std::vector<std::vector<style::Embedding>> pools(4);
  for (auto& p : pools)
    for (int i = 0; i < 6; ++i) {
      std::vector<double> v(64);
      for (double& x : v) x = std::normal_distribution<double>()(rng);
      p.push_back(v);
    }
  train::TrainConfig tc;
  tc.epochs = 1;
  tc.batch_size = 8;
  tc.seed = 4;
  const auto r = train::train_enhancer(ds, tr, pools, cfg.mapping, cfg.encoder, tc);
  const bool exact = r.step0_loss == r.identity_loss;
  return {failures == 0 && exact,
          fmt("zero-head identity failures %d/20; step-0 loss %.17g vs lab_l1(input, target) %.17g (%s)", failures,
              r.step0_loss, r.identity_loss, exact ? "equal" : "differ")};
}

// --- 8-10. learning --------------------------------------------------------

Outcome desk_scale() {
  const auto t0 = Clock::now();
  StackConfig cfg = default_stack();
  const auto s = train_stack(cfg, synth::preset_styles("gamma2"));
  const auto& m = s->matrix;
  const double cross = (m[0][1] + m[1][0]) / 2.0;
  const double train_recall = s->style.epoch_recall.back();
  const double secs = seconds_since(t0);
  const bool pass = cross >= 35.0 && train_recall == 1.0 && s->test_recall == 1.0 && secs <= 900.0;
  return {pass, fmt("held-out cross-style PSNR %.2f dB (>= 35), matrix %s; Recall@1 train %.4f, held-out %.4f; "
                    "%.0f s (style %.0f s, enhancer %.0f s; limit 900 s)",
                    cross, matrix_text(m).c_str(), train_recall, s->test_recall, secs, s->style_seconds,
                    s->enhancer_seconds)};
}

std::unique_ptr<Stack> g_matrix_stack;

Outcome style_matrix() {
  const auto t0 = Clock::now();
  StackConfig cfg = default_stack();
  cfg.style.num_styles = 4;
  g_matrix_stack = train_stack(cfg, synth::preset_styles("matrix4"));
  const auto& m = g_matrix_stack->matrix;
  double lo = 1e9, sum = 0;
  for (const auto& row : m)
    for (double v : row) lo = std::min(lo, v), sum += v;
  const double mean = sum / 16.0, secs = seconds_since(t0);
  return {lo >= 25.0 && mean >= 30.0 && secs <= 1800.0,
          fmt("4x4 held-out PSNR min %.2f dB (>= 25), mean %.2f dB (>= 30), matrix %s; Recall@1 train %.4f; %.0f s "
              "(limit 1800 s)",
              lo, mean, matrix_text(m).c_str(), g_matrix_stack->style.epoch_recall.back(), secs)};
}

Outcome unseen_style() {
  if (!g_matrix_stack) {
    Outcome o = style_matrix();
    if (!g_matrix_stack) return {false, "matrix stack unavailable: " + o.detail};
  }
  const Stack& s = *g_matrix_stack;
  const StackConfig cfg = default_stack();
  const auto all = synth::preset_styles("holdout5");
  const auto bases = synth::generate_base_images(cfg.bases, cfg.size, cfg.size, cfg.data_seed);
  const auto ds5 = synth::build_dataset(bases, all);
  const int held = 4;
  std::mt19937_64 rng(110);
  const std::vector<int> ns{1, 5, 25};
  std::vector<double> means;
  std::string detail;
  std::vector<const ImageD*> expected;
  for (size_t i : s.test_items) expected.push_back(&ds5.at(held, i));
  for (int n : ns) {
    double total = 0;
    for (int rep = 0; rep < 10; ++rep) {
      std::vector<size_t> pick(s.train_items);
      std::shuffle(pick.begin(), pick.end(), rng);
      pick.resize(static_cast<size_t>(n));
      std::vector<const ImageD*> exemplars;
      for (size_t i : pick) exemplars.push_back(&ds5.at(held, i));
      const auto target = style::average_latent(train::embed_images(*s.style_encoder, exemplars));
      double sum = 0;
      for (int q = 0; q < held; ++q) {
        std::vector<const ImageD*> inputs;
        for (size_t i : s.test_items) inputs.push_back(&ds5.at(q, i));
        sum += train::transfer_psnr(*s.mapping, *s.encoder, s.style.latents[static_cast<size_t>(q)], target, inputs,
                                    expected);
      }
      total += sum / held;
    }
    means.push_back(total / 10.0);
    detail += fmt("n=%d %.3f dB, ", n, means.back());
  }
  const bool pass = means[0] <= means[1] && means[1] <= means[2];
  return {pass, detail + "mean over 10 repeats; nondecreasing required"};
}

// --- 11. throughput --------------------------------------------------------

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

double render_ms(const Image& img, const CurveSet& cs, int workers, int frames) {
  std::vector<double> t;
  for (int f = 0; f < frames; ++f) {
    const auto t0 = Clock::now();
    const auto luts = build_lut_set<float>(cs, 8, img.height, img.width);
    const Image out = enhance(img, luts, true, workers);
    t.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    if (out.data.size() != img.data.size()) return -1;
  }
  return median(t);
}

Outcome throughput() {
  std::mt19937_64 rng(111);
  const auto cs = testutil::random_curves(rng, CurveLayout::uniform(), 0.2);
  const std::vector<std::pair<int, int>> sizes{{480, 270}, {960, 540}, {1920, 1080}, {2560, 1440}, {3840, 2160}};
  std::vector<double> px, ms;
  for (const auto& [w, h] : sizes) {
    const auto img = testutil::random_image<float>(rng, h, w);
    render_ms(img, cs, 1, 1);
    px.push_back(static_cast<double>(w) * h);
    ms.push_back(render_ms(img, cs, 1, 5));
  }
  const double n = static_cast<double>(px.size());
  const double mx = std::accumulate(px.begin(), px.end(), 0.0) / n, my = std::accumulate(ms.begin(), ms.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < px.size(); ++i) {
    sxy += (px[i] - mx) * (ms[i] - my);
    sxx += (px[i] - mx) * (px[i] - mx);
    syy += (ms[i] - my) * (ms[i] - my);
  }
  const double r2 = sxy * sxy / (sxx * syy);
  const auto big = testutil::random_image<float>(rng, 2160, 3840);
  const auto luts = build_lut_set<float>(cs, 8, 2160, 3840);
  const bool same = enhance(big, luts, true, 1) == enhance(big, luts, true, 4);
  const double uhd = ms.back();
  return {uhd <= 250.0 && r2 >= 0.99 && same,
          fmt("3840x2160 %.1f ms single-threaded (<= 250, %.1f FPS); R^2 %.4f over 5 sizes (>= 0.99); "
              "4-thread render %s serial",
              uhd, 1000.0 / uhd, r2, same ? "bit-identical to" : "DIFFERS from")};
}

// --- 12. persistence -------------------------------------------------------

Outcome persistence() {
  std::mt19937_64 rng(112);
  const fs::path dir = fs::temp_directory_path() / fs::path("starenh_acceptance_" + std::to_string(rng()));
  fs::create_directories(dir);
  const StackConfig cfg = default_stack();
  nn::ModelBundle bundle;
  for (auto w : {nn::fixup_init(cfg.style, 1), nn::fixup_init(cfg.mapping, 2), nn::fixup_init(cfg.encoder, 3)}) {
    gradcheck::randomize(w, rng, 0.5);
    bundle.put(std::move(w));
  }
  std::vector<double> lv(64);
  for (double& v : lv) v = std::normal_distribution<double>()(rng);
  bundle.styles["s"] = style::average_latent(std::vector<style::Embedding>{lv}, "x");
  const std::string wpath = (dir / "model.bin").string();
  nn::save_bundle(wpath, bundle);
  const auto back = nn::load_bundle(wpath);
  bool weights_ok = back.models.size() == bundle.models.size() && back.styles == bundle.styles;
  for (size_t i = 0; weights_ok && i < bundle.models.size(); ++i) weights_ok = back.models[i] == bundle.models[i];
  weights_ok = weights_ok && nn::encode_bundle(back) == nn::encode_bundle(bundle);

  bool curves_ok = true;
  for (int t = 0; t < 20; ++t) {
    CurveLayout layout = CurveLayout::uniform(2 + t, 2 + t % 9);
    const auto cs = testutil::random_curves(rng, layout, 1.0);
    SliderSettings sl;
    for (double& b : sl.beta) b = std::uniform_real_distribution<double>(0, 2)(rng);
    const std::string cpath = (dir / "curves.json").string();
    save_curveset(cpath, cs, sl);
    const auto doc = load_curveset(cpath);
    curves_ok = curves_ok && doc.curves == cs && doc.sliders && *doc.sliders == sl;
  }

  bool png_ok = true;
  for (int t = 0; t < 5; ++t) {
    Image img(7 + t * 13, 11 + t * 9, 16);
    std::uniform_int_distribution<int> code(0, 65535);
    for (float& v : img.data) v = static_cast<float>(code(rng) / 65535.0);
    const std::string png = encode_image(img, ImageFormat::kPng);
    const std::string ppath = (dir / "in.png").string(), opath = (dir / "out.png").string();
    {
      std::ofstream(ppath, std::ios::binary) << png;
    }
    const Image in = read_image(ppath);
    write_image(opath, app::render(in, CurveSet::zeros(CurveLayout::uniform()), 8));
    std::ifstream f(opath, std::ios::binary);
    const std::string out((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    png_ok = png_ok && in.bit_depth == 16 && out == png;
  }
  fs::remove_all(dir);
  return {weights_ok && curves_ok && png_ok,
          fmt("weights bundle round trip %s; CurveSet JSON round trip %s; 16-bit PNG zero-curve file round trip %s",
              weights_ok ? "exact" : "MISMATCH", curves_ok ? "exact" : "MISMATCH", png_ok ? "bit-exact" : "MISMATCH")};
}

// --- secondary: slider path ------------------------------------------------

Outcome slider_latency() {
  std::mt19937_64 rng(113);
  const StackConfig cfg = default_stack();
  nn::ModelBundle b;
  auto mw = nn::fixup_init(cfg.mapping, 1);
  gradcheck::randomize(mw, rng, 0.05);
  auto ew = nn::fixup_init(cfg.encoder, 2);
  for (auto& [name, t] : ew.tensors)
    if (name.rfind("head.", 0) == 0)
      for (double& v : t.values()) v = std::normal_distribution<double>(0, 0.01)(rng);
  b.put(mw);
  b.put(ew);
  app::Service svc(std::make_shared<Pipeline>(b));
  std::vector<double> lv(64);
  for (double& v : lv) v = std::normal_distribution<double>()(rng);
  svc.registry().put("a", style::average_latent(std::vector<style::Embedding>{lv}));
  for (double& v : lv) v = std::normal_distribution<double>()(rng);
  svc.registry().put("b", style::average_latent(std::vector<style::Embedding>{lv}));
  const auto img = testutil::random_image<float>(rng, 2160, 3840);
  const auto r = svc.enhance(img, "a", "b", true);
  const long before = svc.pipeline().inference_count();
  std::vector<double> t;
  for (int i = 0; i < 20; ++i) {
    SliderSettings s;
    for (double& v : s.beta) v = std::uniform_real_distribution<double>(0, 2)(rng);
    const auto t0 = Clock::now();
    const Image p = svc.sliders(r.session, s, {});
    t.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    if (p.width != 1280 || p.height != 720) return {false, "preview is not 1280x720"};
  }
  const long extra = svc.pipeline().inference_count() - before;
  const double ms = median(t);
  return {ms <= 100.0 && extra == 0,
          fmt("1280x720 slider render median %.1f ms (<= 100); %ld encoder inferences across 20 slider calls", ms,
              extra)};
}

struct Criterion {
  std::string name;
  bool primary;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"interpolation", true, interpolation_suite},
      {"enhancer-oracle", true, enhancer_oracle},
      {"slider-homogeneity", true, slider_homogeneity},
      {"dual-adain", true, dual_adain_algebra},
      {"style-math", true, style_math},
      {"gradient-checks", true, gradient_checks},
      {"init-invariant", true, init_invariant},
      {"desk-scale-learning", true, desk_scale},
      {"style-matrix", true, style_matrix},
      {"unseen-style", true, unseen_style},
      {"throughput", true, throughput},
      {"persistence", true, persistence},
      {"slider-latency", false, slider_latency},
  };

  CLI::App cli{"Runs the acceptance criteria and prints one PASS/FAIL line each."};
  std::vector<std::string> only;
  bool list = false;
  cli.add_option("--only", only, "Run only these criteria")->delimiter(',');
  cli.add_flag("--list", list, "List criterion names and exit");
  CLI11_PARSE(cli, argc, argv);
  if (list) {
    for (const auto& c : criteria) std::printf("%s%s\n", c.name.c_str(), c.primary ? "" : " (secondary)");
    return 0;
  }
  for (const auto& o : only)
    if (std::none_of(criteria.begin(), criteria.end(), [&](const Criterion& c) { return c.name == o; })) {
      std::fprintf(stderr, "unknown criterion '%s' (see --list)\n", o.c_str());
      return 2;
    }

  int failed = 0, run = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.name) == only.end()) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    ++run;
    if (!o.pass) ++failed;
    std::printf("[%s] %-20s %s%s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.name.c_str(), c.primary ? "" : "(secondary) ",
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", run - failed, run);
  return failed == 0 ? 0 : 1;
}
