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

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "starenh/app.hpp"
#include "starenh/curveset_io.hpp"
#include "starenh/http.hpp"
#include "starenh/image_io.hpp"
#include "starenh/nn/weights_io.hpp"
#include "starenh/parallel.hpp"
#include "starenh/pipeline.hpp"
#include "starenh/synth.hpp"
#include "starenh/training.hpp"

using namespace starenh;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kModelEnv = "STARENH_MODEL";

std::pair<int, int> parse_size(const std::string& s) {
  int w = 0, h = 0;
  char x = 0;
  std::istringstream in(s);
  if (!(in >> w >> x >> h) || (x != 'x' && x != 'X') || w < 1 || h < 1 || !in.eof())
    throw CLI::ValidationError("size", "expected WIDTHxHEIGHT, got '" + s + "'");
  return {w, h};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  json doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded()) throw_invalid(path + " is not valid JSON");
  return doc;
}

train::TrainConfig common_train_config(const json* overrides, int epochs, int batch, double lr, uint64_t seed) {
  train::TrainConfig c = overrides ? train::train_config_from_json(*overrides) : train::TrainConfig{};
  if (epochs >= 0) c.epochs = epochs;
  if (batch > 0) c.batch_size = batch;
  if (lr > 0) c.lr = lr;
  c.seed = seed;
  c.validate();
  return c;
}

void log_step(const train::StepLog& s, long every) {
  if (every > 0 && s.step % every == 0)
    std::printf("step %6ld  lr %.3g  loss %.5f\n", s.step, s.lr, s.loss);
}

style::StyleLatent resolve_style(const nn::ModelBundle& bundle, const std::string& name) {
  if (const auto it = bundle.styles.find(name); it != bundle.styles.end()) return it->second;
  if (fs::is_regular_file(name)) return style::load_latent(name);
  throw Error(ErrorKind::kNotFound, "style '" + name + "' is neither in the model nor a latent file");
}

std::vector<const ImageD*> style_items(const synth::StyleDataset& ds, int q, const std::vector<size_t>& items) {
  std::vector<const ImageD*> out;
  for (size_t i : items)
    if (ds.has(q, i)) out.push_back(&ds.at(q, i));
  return out;
}

// --- subcommands -----------------------------------------------------------

struct SynthArgs {
  std::string out;
  int count = 200;
  std::string size = "64x64";
  std::string preset = "gamma2";
  std::string styles_file;
  uint64_t seed = 1;
};

int run_synth(const SynthArgs& a) {
  const auto [w, h] = parse_size(a.size);
  std::vector<synth::NamedStyle> styles;
  if (!a.styles_file.empty()) {
    const json doc = read_json(a.styles_file);
    require(doc.is_object(), "styles file must map ids to style specs");
    for (const auto& [id, spec] : doc.items()) styles.push_back({id, synth::spec_from_json(spec)});
  } else {
    styles = synth::preset_styles(a.preset);
  }
  const auto bases = synth::generate_base_images(a.count, h, w, a.seed);
  synth::save_dataset(a.out, bases, styles);
  std::printf("wrote %d bases x %zu styles (%dx%d) to %s\n", a.count, styles.size(), w, h, a.out.c_str());
  return 0;
}

struct TrainArgs {
  std::string data;
  std::string model_in;
  std::string out;
  std::string config;
  std::string log_csv;
  std::string matrix_csv;
  int epochs = -1;
  int batch = 0;
  double lr = 0;
  uint64_t seed = 1;
  int test_count = 0;
  int input_size = 32;
  std::vector<int> widths{16, 32, 64};
  int stem = 16;
  int blocks = 1;
  int hidden = 128;
  int hidden_layers = 2;
  int color_knots = 17;
  int coord_knots = 9;
  long log_every = 50;
};

int run_train_style(const TrainArgs& a) {
  const auto ds = synth::load_dataset(a.data);
  const json cfg = a.config.empty() ? json() : read_json(a.config);
  const auto tc = common_train_config(a.config.empty() ? nullptr : &cfg, a.epochs, a.batch, a.lr, a.seed);
  const auto [train_items, test_items] = train::split_items(ds.items(), static_cast<size_t>(a.test_count));
  nn::StyleEncoderConfig model{nn::TrunkConfig{a.input_size, a.stem, a.widths, a.blocks}, ds.styles(), 30.0};
  const auto r = train::train_style_encoder(ds, train_items, model, tc, [&](const auto& s) { log_step(s, a.log_every); });
  for (size_t e = 0; e < r.epoch_loss.size(); ++e)
    std::printf("epoch %3zu  loss %.5f  recall@1 %.4f\n", e + 1, r.epoch_loss[e], r.epoch_recall[e]);

  nn::ModelBundle bundle = a.model_in.empty() ? nn::ModelBundle{} : nn::load_bundle(a.model_in);
  bundle.put(r.weights);
  for (int q = 0; q < ds.styles(); ++q) bundle.styles[ds.ids[static_cast<size_t>(q)]] = r.latents[static_cast<size_t>(q)];

  if (!test_items.empty()) {
    const nn::StyleEncoder enc(r.weights);
    std::vector<style::Embedding> emb;
    std::vector<int> labels;
    for (int q = 0; q < ds.styles(); ++q)
      for (auto& f : train::embed_images(enc, style_items(ds, q, test_items))) {
        emb.push_back(std::move(f));
        labels.push_back(q);
      }
    const auto rep = style::recall_at_1(emb, labels, r.latents);
    for (int q = 0; q < ds.styles(); ++q)
      std::printf("held-out recall@1 %-12s %.4f (%d images)\n", ds.ids[static_cast<size_t>(q)].c_str(),
                  rep.recall[static_cast<size_t>(q)], rep.count[static_cast<size_t>(q)]);
  }
  if (!a.log_csv.empty()) train::write_steps_csv(a.log_csv, r.steps);
  nn::save_bundle(a.out, bundle);
  std::printf("saved %s\n", a.out.c_str());
  return 0;
}

int run_train_enhancer(const TrainArgs& a) {
  if (a.model_in.empty()) throw Error(ErrorKind::kNotFound, "--model with a trained style encoder is required");
  const auto ds = synth::load_dataset(a.data);
  nn::ModelBundle bundle = nn::load_bundle(a.model_in);
  const nn::StyleEncoder senc(bundle.require_model(nn::kStyleEncoderKind));
  const json cfg = a.config.empty() ? json() : read_json(a.config);
  const auto tc = common_train_config(a.config.empty() ? nullptr : &cfg, a.epochs, a.batch, a.lr, a.seed);
  const auto [train_items, test_items] = train::split_items(ds.items(), static_cast<size_t>(a.test_count));

  std::vector<std::vector<style::Embedding>> pools;
  std::vector<style::StyleLatent> latents;
  for (int q = 0; q < ds.styles(); ++q) {
    pools.push_back(train::embed_images(senc, style_items(ds, q, train_items)));
    latents.push_back(style::average_latent(pools.back(), "train:" + ds.ids[static_cast<size_t>(q)]));
  }
  const nn::MappingConfig mc{senc.config().embedding_dim(), a.hidden, a.hidden_layers, a.widths};
  const nn::CurveEncoderConfig ec{nn::TrunkConfig{a.input_size, a.stem, a.widths, a.blocks},
                                  CurveLayout::uniform(a.color_knots, a.coord_knots)};
  const auto r = train::train_enhancer(ds, train_items, pools, mc, ec, tc, [&](const auto& s) { log_step(s, a.log_every); });
  std::printf("step-0 loss %.6f (identity loss %.6f), %ld missing pairs skipped\n", r.step0_loss, r.identity_loss,
              r.skipped_pairs);

  bundle.put(r.mapping);
  bundle.put(r.encoder);
  for (int q = 0; q < ds.styles(); ++q) bundle.styles[ds.ids[static_cast<size_t>(q)]] = latents[static_cast<size_t>(q)];

  if (!test_items.empty()) {
    const nn::MappingNetwork mapping(r.mapping);
    const nn::CurveEncoder encoder(r.encoder);
    const auto m = train::style_matrix_eval(mapping, encoder, latents, ds, test_items, tc.depth);
    std::printf("held-out PSNR (rows = source, columns = target)\n%12s", "");
    for (const auto& id : ds.ids) std::printf(" %10s", id.c_str());
    std::printf("\n");
    for (size_t i = 0; i < m.size(); ++i) {
      std::printf("%12s", ds.ids[i].c_str());
      for (double v : m[i]) std::printf(" %10.2f", v);
      std::printf("\n");
    }
    if (!a.matrix_csv.empty()) train::write_matrix_csv(a.matrix_csv, ds.ids, m);
  }
  if (!a.log_csv.empty()) train::write_steps_csv(a.log_csv, r.steps);
  nn::save_bundle(a.out, bundle);
  std::printf("saved %s\n", a.out.c_str());
  return 0;
}

struct EmbedArgs {
  std::string model;
  std::string out;
  std::string register_id;
  std::vector<std::string> images;
};

int run_embed(const EmbedArgs& a) {
  nn::ModelBundle bundle = nn::load_bundle(a.model);
  const Pipeline p(bundle);
  if (!p.can_embed()) throw Error(ErrorKind::kNotFound, "model has no style encoder");
  std::vector<style::Embedding> emb;
  for (const auto& path : a.images) emb.push_back(p.embed(read_image(path)));
  const auto latent = style::average_latent(emb, "embed:" + std::to_string(emb.size()));
  style::save_latent(a.out, latent);
  if (!a.register_id.empty()) {
    bundle.styles[a.register_id] = latent;
    nn::save_bundle(a.model, bundle);
  }
  std::printf("embedded %zu images -> %s\n", emb.size(), a.out.c_str());
  return 0;
}

struct EnhanceArgs {
  std::string model;
  std::string in;
  std::string out;
  std::string source;
  std::string target;
  std::string sliders;
  std::string curves_out;
  int depth = kDefaultDepth;
  int workers = 1;
};

int run_enhance(const EnhanceArgs& a) {
  const nn::ModelBundle bundle = nn::load_bundle(a.model);
  const Pipeline p(bundle);
  const Image img = read_image(a.in);
  const CurveSet curves =
      p.predict(img, p.codes(resolve_style(bundle, a.source)), p.codes(resolve_style(bundle, a.target)));
  SliderSettings sliders;
  std::vector<app::KnotOverride> overrides;
  if (!a.sliders.empty()) {
    const json doc = read_json(a.sliders);
    require(doc.is_object(), "sliders file must hold a JSON object");
    if (doc.contains("sliders") || doc.contains("knots")) {
      if (doc.contains("sliders")) sliders = sliders_from_json(doc["sliders"]);
      if (doc.contains("knots")) overrides = app::overrides_from_json(doc["knots"]);
    } else {
      sliders = sliders_from_json(doc);
    }
  }
  const CurveSet adjusted = app::adjusted_curves(curves, sliders, overrides);
  write_image(a.out, app::render(img, adjusted, a.depth, a.workers));
  if (!a.curves_out.empty()) save_curveset(a.curves_out, curves, sliders);
  return 0;
}

struct BenchArgs {
  std::string size = "3840x2160";
  int frames = 5;
  int workers = 1;
  int depth = kDefaultDepth;
  uint64_t seed = 1;
};

int run_bench(const BenchArgs& a) {
  const auto [w, h] = parse_size(a.size);
  std::mt19937_64 rng(a.seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Image img(h, w);
  for (float& v : img.data) v = u(rng);
  std::normal_distribution<double> n(0.0, 0.1);
  std::vector<double> knots(static_cast<size_t>(CurveLayout::uniform().total()));
  for (double& v : knots) v = n(rng);
  const CurveSet curves = CurveSet::from_vector(knots, CurveLayout::uniform());

  using clock = std::chrono::steady_clock;
  double best = 1e300, total = 0;
  for (int f = 0; f < a.frames; ++f) {
    const auto t0 = clock::now();
    const auto luts = build_lut_set<float>(curves, a.depth, h, w);
    const Image out = enhance(img, luts, true, a.workers);
    const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
    if (out.data.empty()) return 1;
    best = std::min(best, ms);
    total += ms;
  }
  const double mean = total / a.frames;
  std::printf("size %dx%d  workers %d  frames %d\n", w, h, a.workers, a.frames);
  std::printf("ms/frame %.2f (best %.2f)  FPS %.2f\n", mean, best, 1000.0 / mean);
  return 0;
}

struct ServeArgs {
  std::string model;
  std::string host = app::kDefaultHost;
  int port = app::kDefaultPort;
  std::string preview = "1280x720";
  int sessions = 32;
  int workers = 1;
  int depth = kDefaultDepth;
  std::vector<std::string> styles;
};

int run_serve(const ServeArgs& a) {
  const nn::ModelBundle bundle = nn::load_bundle(a.model);
  app::ServiceConfig cfg;
  std::tie(cfg.preview_max_width, cfg.preview_max_height) = parse_size(a.preview);
  cfg.max_sessions = static_cast<size_t>(a.sessions);
  cfg.workers = a.workers;
  cfg.depth = a.depth;
  app::Service service(std::make_shared<Pipeline>(bundle), cfg);
  for (const auto& [id, latent] : bundle.styles) service.registry().put(id, latent);
  for (const auto& spec : a.styles) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw_invalid("--style expects ID=latent.json, got '" + spec + "'");
    service.registry().put(spec.substr(0, eq), style::load_latent(spec.substr(eq + 1)));
  }
  std::printf("serving on http://%s:%d (%zu styles)\n", a.host.c_str(), a.port, service.registry().size());
  std::fflush(stdout);
  if (!app::serve(service, a.host, a.port)) throw Error(ErrorKind::kIo, "cannot listen on " + a.host + ":" + std::to_string(a.port));
  return 0;
}

void add_train_options(CLI::App* cmd, TrainArgs& a, bool enhancer) {
  cmd->add_option("--data", a.data, "Dataset directory written by `synth`")->required()->check(CLI::ExistingDirectory);
  cmd->add_option("--out", a.out, "Output model bundle")->required();
  auto* m = cmd->add_option("--model", a.model_in,
                            enhancer ? "Bundle with the trained style encoder" : "Existing bundle to extend");
  m->envname(kModelEnv);
  if (enhancer) m->required();
  cmd->add_option("--config", a.config, "TrainConfig JSON (flags below override it)")->check(CLI::ExistingFile);
  cmd->add_option("--epochs", a.epochs, "Epochs");
  cmd->add_option("--batch", a.batch, "Batch size");
  cmd->add_option("--lr", a.lr, "Base learning rate");
  cmd->add_option("--seed", a.seed, "Random seed")->capture_default_str();
  cmd->add_option("--test-count", a.test_count, "Bases held out for evaluation (last N)")->capture_default_str();
  cmd->add_option("--input-size", a.input_size, "Network input size K")->capture_default_str();
  cmd->add_option("--widths", a.widths, "Stage widths")->delimiter(',')->capture_default_str();
  cmd->add_option("--stem", a.stem, "Stem width")->capture_default_str();
  cmd->add_option("--blocks", a.blocks, "Residual blocks per stage")->capture_default_str();
  if (enhancer) {
    cmd->add_option("--hidden", a.hidden, "Mapping network hidden width")->capture_default_str();
    cmd->add_option("--hidden-layers", a.hidden_layers, "Mapping network hidden layers")->capture_default_str();
    cmd->add_option("--color-knots", a.color_knots, "Knots per colour curve")->capture_default_str();
    cmd->add_option("--coord-knots", a.coord_knots, "Knots per coordinate curve")->capture_default_str();
    cmd->add_option("--matrix-csv", a.matrix_csv, "Write the held-out PSNR matrix");
  }
  cmd->add_option("--log-csv", a.log_csv, "Write per-step loss and learning rate");
  cmd->add_option("--log-every", a.log_every, "Print every N steps (0 = silent)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Style-aware curve enhancement: datasets, training, rendering and an HTTP service.\n"
               "Commands that load a model read --model or the STARENH_MODEL environment variable."};
  cli.name("starenh");
  cli.require_subcommand(1);
  cli.failure_message(CLI::FailureMessage::help);
  int code = 0;

  SynthArgs synth_args;
  auto* synth_cmd = cli.add_subcommand("synth", "Generate a synthetic paired style dataset");
  synth_cmd->add_option("--out", synth_args.out, "Output directory")->required();
  synth_cmd->add_option("--count", synth_args.count, "Number of base images")->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--size", synth_args.size, "Image size WIDTHxHEIGHT")->capture_default_str();
  synth_cmd->add_option("--preset", synth_args.preset, "Style preset")
      ->capture_default_str()
      ->check(CLI::IsMember({"gamma2", "matrix4", "holdout5"}));
  synth_cmd->add_option("--styles", synth_args.styles_file, "JSON object of id -> style spec (overrides --preset)")
      ->check(CLI::ExistingFile);
  synth_cmd->add_option("--seed", synth_args.seed, "Random seed")->capture_default_str();
  synth_cmd->callback([&] { code = run_synth(synth_args); });

  TrainArgs style_args;
  auto* style_cmd = cli.add_subcommand("train-style", "Train the style encoder and store per-style latents");
  add_train_options(style_cmd, style_args, false);
  style_cmd->callback([&] { code = run_train_style(style_args); });

  TrainArgs enh_args;
  enh_args.widths = {16, 32, 64, 96};
  auto* enh_cmd = cli.add_subcommand("train-enhancer", "Train the mapping network and curve encoder");
  add_train_options(enh_cmd, enh_args, true);
  enh_cmd->callback([&] { code = run_train_enhancer(enh_args); });

  EmbedArgs embed_args;
  auto* embed_cmd = cli.add_subcommand("embed", "Average image embeddings into a style latent file");
  embed_cmd->add_option("--model", embed_args.model, "Model bundle")->required()->envname(kModelEnv);
  embed_cmd->add_option("--out", embed_args.out, "Output latent JSON")->required();
  embed_cmd->add_option("--register", embed_args.register_id, "Also store the latent in the bundle under this id");
  embed_cmd->add_option("images", embed_args.images, "Input images")->required()->check(CLI::ExistingFile);
  embed_cmd->callback([&] { code = run_embed(embed_args); });

  EnhanceArgs enhance_args;
  auto* enhance_cmd = cli.add_subcommand("enhance", "Predict curves for an image and render it");
  enhance_cmd->add_option("--model", enhance_args.model, "Model bundle")->required()->envname(kModelEnv);
  enhance_cmd->add_option("--in", enhance_args.in, "Input image (PNG or PPM)")->required()->check(CLI::ExistingFile);
  enhance_cmd->add_option("--out", enhance_args.out, "Output image (.png or .ppm)")->required();
  enhance_cmd->add_option("--source", enhance_args.source, "Source style id or latent file")->required();
  enhance_cmd->add_option("--target", enhance_args.target, "Target style id or latent file")->required();
  enhance_cmd->add_option("--sliders", enhance_args.sliders, "Slider JSON (curve name -> beta, optional knots)")
      ->check(CLI::ExistingFile);
  enhance_cmd->add_option("--curves-out", enhance_args.curves_out, "Write the predicted curves as JSON");
  enhance_cmd->add_option("--depth", enhance_args.depth, "Colour index bits")->capture_default_str()->check(CLI::Range(1, 16));
  enhance_cmd->add_option("--workers", enhance_args.workers, "Render threads")->capture_default_str()->check(CLI::PositiveNumber);
  enhance_cmd->callback([&] { code = run_enhance(enhance_args); });

  BenchArgs bench_args;
  auto* bench_cmd = cli.add_subcommand("bench", "Measure LUT render throughput");
  bench_cmd->add_option("--size", bench_args.size, "Frame size WIDTHxHEIGHT")->capture_default_str();
  bench_cmd->add_option("--frames", bench_args.frames, "Frames to time")->capture_default_str()->check(CLI::PositiveNumber);
  bench_cmd->add_option("--workers", bench_args.workers, "Render threads")->capture_default_str()->check(CLI::PositiveNumber);
  bench_cmd->add_option("--depth", bench_args.depth, "Colour index bits")->capture_default_str()->check(CLI::Range(1, 16));
  bench_cmd->add_option("--seed", bench_args.seed, "Random seed")->capture_default_str();
  bench_cmd->callback([&] { code = run_bench(bench_args); });

  ServeArgs serve_args;
  auto* serve_cmd = cli.add_subcommand("serve", "Start the HTTP service");
  serve_cmd->add_option("--model", serve_args.model, "Model bundle")->required()->envname(kModelEnv);
  serve_cmd->add_option("--host", serve_args.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", serve_args.port, "Port")->capture_default_str()->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--preview", serve_args.preview, "Largest preview WIDTHxHEIGHT")->capture_default_str();
  serve_cmd->add_option("--sessions", serve_args.sessions, "Sessions kept in memory")->capture_default_str()->check(CLI::PositiveNumber);
  serve_cmd->add_option("--workers", serve_args.workers, "Render threads per request")->capture_default_str()->check(CLI::PositiveNumber);
  serve_cmd->add_option("--depth", serve_args.depth, "Colour index bits")->capture_default_str()->check(CLI::Range(1, 16));
  serve_cmd->add_option("--style", serve_args.styles, "Extra style ID=latent.json (repeatable)");
  serve_cmd->callback([&] { code = run_serve(serve_args); });

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return cli.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return code;
}
