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

#include "starenh/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "starenh/colorspace.hpp"
#include "starenh/nn/optim.hpp"

namespace starenh::train {

using nlohmann::json;
using nn::Tensor;
using nn::Var;

void TrainConfig::validate() const {
  require(epochs >= 0, "epochs must be nonnegative");
  require(batch_size >= 1, "batch size must be positive");
  require(std::isfinite(lr) && std::isfinite(lr_min) && lr > lr_min && lr_min >= 0,
          "learning rates must satisfy lr > lr_min >= 0");
  require(head_multiplier > 0, "head multiplier must be positive");
  require(subset_min >= 1 && subset_max >= 0 && (subset_max == 0 || subset_max >= subset_min),
          "invalid latent subset range");
  require(depth >= 1 && depth <= 16, "depth must lie in [1, 16]");
}

json to_json(const TrainConfig& c) {
  return json{{"epochs", c.epochs},         {"batch_size", c.batch_size},
              {"lr", c.lr},                 {"lr_min", c.lr_min},
              {"seed", c.seed},             {"head_multiplier", c.head_multiplier},
              {"subset_min", c.subset_min}, {"subset_max", c.subset_max},
              {"depth", c.depth}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  try {
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.lr = j.value("lr", c.lr);
    c.lr_min = j.value("lr_min", c.lr_min);
    c.seed = j.value("seed", c.seed);
    c.head_multiplier = j.value("head_multiplier", c.head_multiplier);
    c.subset_min = j.value("subset_min", c.subset_min);
    c.subset_max = j.value("subset_max", c.subset_max);
    c.depth = j.value("depth", c.depth);
  } catch (const json::exception& e) {
    throw_invalid(std::string("malformed training config: ") + e.what());
  }
  c.validate();
  return c;
}

double cosine_lr(long t, long total, double lr0, double lr_min) {
  require(total >= 0 && t >= 0, "cosine_lr needs 0 <= t");
  require(t <= total, "cosine_lr step " + std::to_string(t) + " exceeds total " + std::to_string(total));
  if (total == 0) return lr0;
  if (t == total) return lr_min;
  return lr_min + 0.5 * (lr0 - lr_min) * (1.0 + std::cos(M_PI * static_cast<double>(t) / static_cast<double>(total)));
}

namespace {

template <class T>
double psnr_impl(const BasicImage<T>& a, const BasicImage<T>& b) {
  require(a.same_size(b), "psnr: image sizes differ");
  double se = 0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    const double d = std::clamp(static_cast<double>(a.data[i]), 0.0, 1.0) - std::clamp(static_cast<double>(b.data[i]), 0.0, 1.0);
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.data.size());
  if (mse == 0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

void append(Tensor& dst, size_t slot, const Tensor& src) {
  std::copy(src.values().begin(), src.values().end(), dst.data() + slot * src.size());
}

Tensor stack(const std::vector<const Tensor*>& parts) {
  std::vector<int> shape = parts.front()->shape();
  shape[0] = static_cast<int>(parts.size());
  Tensor out(shape);
  for (size_t i = 0; i < parts.size(); ++i) append(out, i, *parts[i]);
  return out;
}

Tensor image_block(const ImageD& img) {
  Tensor t({1, 3, img.height, img.width});
  std::copy(img.data.begin(), img.data.end(), t.data());
  return t;
}

style::StyleLatent subset_latent(const std::vector<style::Embedding>& pool, int lo, int hi, std::mt19937_64& rng) {
  const int n = static_cast<int>(pool.size());
  const int top = hi == 0 ? n : std::min(hi, n);
  const int bottom = std::min(lo, top);
  const int k = std::uniform_int_distribution<int>(bottom, top)(rng);
  std::vector<size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  for (int i = 0; i < k; ++i) std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(i) + std::uniform_int_distribution<size_t>(0, pool.size() - 1 - static_cast<size_t>(i))(rng)]);
  std::vector<style::Embedding> chosen;
  for (int i = 0; i < k; ++i) chosen.push_back(pool[idx[static_cast<size_t>(i)]]);
  return style::average_latent(chosen, "subset");
}

long steps_for(size_t samples, int batch, int epochs) {
  return static_cast<long>(epochs) * static_cast<long>((samples + static_cast<size_t>(batch) - 1) / static_cast<size_t>(batch));
}

CurveSet predict_curves(const nn::CurveEncoder& encoder, const ImageD& image, const nn::StyleCodes& a,
                        const nn::StyleCodes& b) {
  const Var x = nn::constant(nn::image_tensor(image, encoder.config().trunk.input_size));
  const nn::CodeVars ca = nn::CodeVars::stack({&a}), cb = nn::CodeVars::stack({&b});
  return CurveSet::from_vector(encoder.forward(x, &ca, &cb)->value.values(), encoder.config().layout);
}

}  // namespace

double psnr(const ImageD& a, const ImageD& b) { return psnr_impl(a, b); }
double psnr(const Image& a, const Image& b) { return psnr_impl(a, b); }

std::pair<std::vector<size_t>, std::vector<size_t>> split_items(size_t items, size_t test_count) {
  require(test_count < items, "held-out split leaves no training items");
  std::vector<size_t> train(items - test_count), test(test_count);
  std::iota(train.begin(), train.end(), size_t{0});
  std::iota(test.begin(), test.end(), items - test_count);
  return {train, test};
}

std::vector<style::Embedding> embed_images(const nn::StyleEncoder& encoder, const std::vector<const ImageD*>& images) {
  const int k = encoder.config().trunk.input_size;
  std::vector<style::Embedding> out;
  constexpr size_t kChunk = 32;
  for (size_t start = 0; start < images.size(); start += kChunk) {
    const size_t end = std::min(images.size(), start + kChunk);
    std::vector<Tensor> parts;
    for (size_t i = start; i < end; ++i) parts.push_back(nn::image_tensor(*images[i], k));
    std::vector<const Tensor*> ptrs;
    for (const auto& p : parts) ptrs.push_back(&p);
    const Tensor e = encoder.embed(nn::constant(stack(ptrs)))->value;
    const int dim = e.dim(1);
    for (size_t r = 0; r < end - start; ++r)
      out.emplace_back(e.data() + r * static_cast<size_t>(dim), e.data() + (r + 1) * static_cast<size_t>(dim));
  }
  return out;
}

StyleTrainResult train_style_encoder(const synth::StyleDataset& data, const std::vector<size_t>& train_items,
                                     const nn::StyleEncoderConfig& model, const TrainConfig& config,
                                     const StepCallback& on_step) {
  config.validate();
  const int q = data.styles();
  require(q >= 2, "style training needs at least two styles");
  std::vector<std::pair<int, size_t>> samples;
  for (int s = 0; s < q; ++s) {
    int count = 0;
    for (size_t i : train_items)
      if (data.has(s, i)) {
        samples.emplace_back(s, i);
        ++count;
      }
    require(count >= 2, "style '" + data.ids[static_cast<size_t>(s)] + "' has fewer than two training images");
  }

  nn::StyleEncoderConfig cfg = model;
  cfg.num_styles = q;
  nn::StyleEncoder enc(cfg, config.seed);
  const int k = cfg.trunk.input_size;
  std::vector<Tensor> inputs;
  for (const auto& [s, i] : samples) inputs.push_back(nn::image_tensor(data.at(s, i), k));

  nn::Adam opt;
  std::vector<Var> body;
  for (const auto& [name, p] : enc.named_parameters())
    if (p != enc.classifier()) body.push_back(p);
  opt.add_group(body, 1.0);
  opt.add_group({enc.classifier()}, config.head_multiplier);

  std::mt19937_64 rng(config.seed ^ 0x5157ULL);
  StyleTrainResult result;
  const long total = steps_for(samples.size(), config.batch_size, config.epochs);
  long step = 0;
  std::vector<size_t> order(samples.size());
  std::iota(order.begin(), order.end(), size_t{0});

  auto refresh = [&]() {
    result.pools.assign(static_cast<size_t>(q), {});
    std::vector<const ImageD*> imgs;
    for (const auto& [s, i] : samples) imgs.push_back(&data.at(s, i));
    const auto emb = embed_images(enc, imgs);
    std::vector<int> labels;
    for (size_t n = 0; n < samples.size(); ++n) {
      result.pools[static_cast<size_t>(samples[n].first)].push_back(emb[n]);
      labels.push_back(samples[n].first);
    }
    result.latents.clear();
    for (int s = 0; s < q; ++s)
      result.latents.push_back(style::average_latent(result.pools[static_cast<size_t>(s)], data.ids[static_cast<size_t>(s)]));
    const auto rep = style::recall_at_1(emb, labels, result.latents);
    return std::accumulate(rep.recall.begin(), rep.recall.end(), 0.0) / q;
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0;
    long batches = 0;
    for (size_t start = 0; start < order.size(); start += static_cast<size_t>(config.batch_size)) {
      const size_t end = std::min(order.size(), start + static_cast<size_t>(config.batch_size));
      std::vector<const Tensor*> parts;
      std::vector<int> labels;
      for (size_t n = start; n < end; ++n) {
        parts.push_back(&inputs[order[n]]);
        labels.push_back(samples[order[n]].first);
      }
      const double lr = cosine_lr(step, total, config.lr, config.lr_min);
      const Var loss = enc.loss(nn::constant(stack(parts)), labels);
      nn::backward(loss);
      opt.step(lr);
      const StepLog log{step, lr, loss->value[0]};
      result.steps.push_back(log);
      if (on_step) on_step(log);
      loss_sum += log.loss;
      ++batches;
      ++step;
    }
    result.epoch_loss.push_back(loss_sum / static_cast<double>(batches));
    result.epoch_recall.push_back(refresh());
  }
  if (config.epochs == 0) refresh();
  result.weights = enc.weights();
  return result;
}

EnhancerTrainResult train_enhancer(const synth::StyleDataset& data, const std::vector<size_t>& train_items,
                                   const std::vector<std::vector<style::Embedding>>& pools,
                                   const nn::MappingConfig& mapping, const nn::CurveEncoderConfig& encoder,
                                   const TrainConfig& config, const StepCallback& on_step) {
  config.validate();
  const int q = data.styles();
  require(q >= 1 && !train_items.empty(), "enhancer training needs styles and training items");
  require(pools.size() == static_cast<size_t>(q), "one embedding pool per style is required");
  for (int s = 0; s < q; ++s)
    require(!pools[static_cast<size_t>(s)].empty(), "style '" + data.ids[static_cast<size_t>(s)] + "' has no embeddings");
  require(static_cast<int>(pools.front().front().size()) == mapping.latent_dim,
          "embedding width does not match the mapping network's latent size");
  require(mapping.code_channels == encoder.trunk.widths,
          "mapping code channels must equal the curve encoder's stage widths");

  int height = 0, width = 0;
  bool any = false;
  for (int s = 0; s < q; ++s)
    for (size_t i : train_items)
      if (data.has(s, i)) {
        const ImageD& img = data.at(s, i);
        if (!any) {
          height = img.height;
          width = img.width;
          any = true;
        }
        require(img.height == height && img.width == width, "training images must share one size");
      }
  require(any, "no training pairs are available");

  nn::MappingNetwork map(mapping, config.seed);
  nn::CurveEncoder enc(encoder, config.seed + 1);
  nn::Adam opt;
  opt.add_group(map.parameters(), 1.0);
  opt.add_group(enc.parameters(), 1.0);

  const int k = encoder.trunk.input_size;
  std::map<std::pair<int, size_t>, Tensor> small, full;
  auto small_of = [&](int s, size_t i) -> const Tensor& {
    auto it = small.find({s, i});
    if (it == small.end()) it = small.emplace(std::pair{s, i}, nn::image_tensor(data.at(s, i), k)).first;
    return it->second;
  };
  auto full_of = [&](int s, size_t i) -> const Tensor& {
    auto it = full.find({s, i});
    if (it == full.end()) it = full.emplace(std::pair{s, i}, image_block(data.at(s, i))).first;
    return it->second;
  };

  std::mt19937_64 rng(config.seed ^ 0xE4A7ULL);
  std::uniform_int_distribution<size_t> pick_item(0, train_items.size() - 1);
  std::uniform_int_distribution<int> pick_style(0, q - 1);
  const long total = steps_for(train_items.size(), config.batch_size, config.epochs);
  EnhancerTrainResult result;
  const size_t plane = static_cast<size_t>(height) * static_cast<size_t>(width);

  for (long step = 0; step < total; ++step) {
    std::vector<const Tensor*> xs, xf, ys;
    std::vector<double> la, lb;
    while (xs.size() < static_cast<size_t>(config.batch_size)) {
      const size_t item = train_items[pick_item(rng)];
      const int a = pick_style(rng), b = pick_style(rng);
      if (!data.has(a, item) || !data.has(b, item)) {
        ++result.skipped_pairs;
        require(result.skipped_pairs < 1000L * config.batch_size * (step + 1), "too few aligned pairs to sample from");
        continue;
      }
      xs.push_back(&small_of(a, item));
      xf.push_back(&full_of(a, item));
      ys.push_back(&full_of(b, item));
      const auto ta = subset_latent(pools[static_cast<size_t>(a)], config.subset_min, config.subset_max, rng);
      const auto tb = subset_latent(pools[static_cast<size_t>(b)], config.subset_min, config.subset_max, rng);
      la.insert(la.end(), ta.values.begin(), ta.values.end());
      lb.insert(lb.end(), tb.values.begin(), tb.values.end());
    }
    const int bsz = static_cast<int>(xs.size());
    const Tensor input_full = stack(xf), target = stack(ys);
    if (step == 0)
      result.identity_loss = colorspace::lab_l1_loss(input_full.span(), target.span(), plane);

    const double lr = cosine_lr(step, total, config.lr, config.lr_min);
    const nn::CodeVars ca = map.forward(nn::constant(Tensor({bsz, mapping.latent_dim}, la)));
    const nn::CodeVars cb = map.forward(nn::constant(Tensor({bsz, mapping.latent_dim}, lb)));
    const Var u = enc.forward(nn::constant(stack(xs)), &ca, &cb);
    const Var out = nn::render_enhance(nn::constant(input_full), u, encoder.layout, config.depth);
    const Var loss = nn::lab_l1(out, nn::constant(target));
    nn::backward(loss);
    opt.step(lr);
    const StepLog log{step, lr, loss->value[0]};
    if (step == 0) result.step0_loss = log.loss;
    result.steps.push_back(log);
    if (on_step) on_step(log);
  }
  result.mapping = map.weights();
  result.encoder = enc.weights();
  return result;
}

double transfer_psnr(const nn::MappingNetwork& mapping, const nn::CurveEncoder& encoder,
                     const style::StyleLatent& source, const style::StyleLatent& target,
                     const std::vector<const ImageD*>& inputs, const std::vector<const ImageD*>& expected, int depth) {
  require(inputs.size() == expected.size() && !inputs.empty(), "transfer_psnr needs matching, nonempty image lists");
  const nn::StyleCodes a = mapping.codes(source), b = mapping.codes(target);
  double total = 0;
  for (size_t i = 0; i < inputs.size(); ++i) {
    const CurveSet curves = predict_curves(encoder, *inputs[i], a, b);
    total += psnr(enhance<double>(*inputs[i], curves, depth, true, 1), *expected[i]);
  }
  return total / static_cast<double>(inputs.size());
}

std::vector<std::vector<double>> style_matrix_eval(const nn::MappingNetwork& mapping, const nn::CurveEncoder& encoder,
                                                   const std::vector<style::StyleLatent>& latents,
                                                   const synth::StyleDataset& data,
                                                   const std::vector<size_t>& test_items, int depth) {
  const int q = data.styles();
  require(latents.size() == static_cast<size_t>(q), "one latent per style is required");
  std::vector<std::vector<double>> table(static_cast<size_t>(q), std::vector<double>(static_cast<size_t>(q)));
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) {
      std::vector<const ImageD*> in, out;
      for (size_t i : test_items)
        if (data.has(a, i) && data.has(b, i)) {
          in.push_back(&data.at(a, i));
          out.push_back(&data.at(b, i));
        }
      require(!in.empty(), "no held-out pairs for " + data.ids[static_cast<size_t>(a)] + " -> " +
                               data.ids[static_cast<size_t>(b)]);
      table[static_cast<size_t>(a)][static_cast<size_t>(b)] =
          transfer_psnr(mapping, encoder, latents[static_cast<size_t>(a)], latents[static_cast<size_t>(b)], in, out, depth);
    }
  return table;
}

void write_steps_csv(const std::string& path, const std::vector<StepLog>& steps) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + path);
  f.precision(10);
  f << "step,lr,loss\n";
  for (const auto& s : steps) f << s.step << ',' << s.lr << ',' << s.loss << '\n';
}

void write_matrix_csv(const std::string& path, const std::vector<std::string>& ids,
                      const std::vector<std::vector<double>>& matrix) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot write " + path);
  f.precision(6);
  f << "source\\target";
  for (const auto& id : ids) f << ',' << id;
  f << '\n';
  for (size_t a = 0; a < matrix.size(); ++a) {
    f << ids[a];
    for (double v : matrix[a]) f << ',' << v;
    f << '\n';
  }
}

}  // namespace starenh::train
