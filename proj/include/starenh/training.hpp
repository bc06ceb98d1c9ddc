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
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "starenh/nn/models.hpp"
#include "starenh/synth.hpp"

namespace starenh::train {

inline constexpr double kPsnrCap = 99.0;

struct TrainConfig {
  int epochs = 10;
  int batch_size = 16;
  double lr = 1e-3;
  double lr_min = 0.0;
  std::uint64_t seed = 0;
  /// Learning-rate multiplier for the classifier's final layer.
  double head_multiplier = 10.0;
  /// Latent augmentation subset size range; 0 as the maximum means the
  /// whole embedding pool.
  int subset_min = 2;
  int subset_max = 0;
  int depth = kDefaultDepth;

  void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

/// lr_min + (lr0 - lr_min)(1 + cos(pi t / T)) / 2 for 0 <= t <= T.
double cosine_lr(long t, long total, double lr0, double lr_min);

/// 10 log10(1 / MSE) on [0,1]-clamped copies, capped at kPsnrCap.
double psnr(const ImageD& a, const ImageD& b);
double psnr(const Image& a, const Image& b);

struct StepLog {
  long step = 0;
  double lr = 0;
  double loss = 0;
};

using StepCallback = std::function<void(const StepLog&)>;

struct StyleTrainResult {
  nn::ModelWeights weights;
  std::vector<double> epoch_loss;
  std::vector<double> epoch_recall;  ///< mean train Recall@1 after each epoch
  std::vector<StepLog> steps;
  /// Train-split embeddings per style and their centres.
  std::vector<std::vector<style::Embedding>> pools;
  std::vector<style::StyleLatent> latents;
};

/// Embeds images with a trained encoder (bilinear downsample to its K).
std::vector<style::Embedding> embed_images(const nn::StyleEncoder& encoder, const std::vector<const ImageD*>& images);

StyleTrainResult train_style_encoder(const synth::StyleDataset& data, const std::vector<size_t>& train_items,
                                     const nn::StyleEncoderConfig& model, const TrainConfig& config,
                                     const StepCallback& on_step = {});

struct EnhancerTrainResult {
  nn::ModelWeights mapping;
  nn::ModelWeights encoder;
  std::vector<StepLog> steps;
  double step0_loss = 0;
  /// lab_l1_loss(input_a, target_b) on the first batch, computed directly.
  double identity_loss = 0;
  long skipped_pairs = 0;
};

/// `pools[q]` holds style-q embeddings for latent augmentation.
EnhancerTrainResult train_enhancer(const synth::StyleDataset& data, const std::vector<size_t>& train_items,
                                   const std::vector<std::vector<style::Embedding>>& pools,
                                   const nn::MappingConfig& mapping, const nn::CurveEncoderConfig& encoder,
                                   const TrainConfig& config, const StepCallback& on_step = {});

/// Mean PSNR of mapping images of style a to style b with the given latents.
double transfer_psnr(const nn::MappingNetwork& mapping, const nn::CurveEncoder& encoder,
                     const style::StyleLatent& source, const style::StyleLatent& target,
                     const std::vector<const ImageD*>& inputs, const std::vector<const ImageD*>& expected,
                     int depth = kDefaultDepth);

/// |Q| x |Q| table of mean held-out PSNR, rows = source, columns = target.
std::vector<std::vector<double>> style_matrix_eval(const nn::MappingNetwork& mapping, const nn::CurveEncoder& encoder,
                                                   const std::vector<style::StyleLatent>& latents,
                                                   const synth::StyleDataset& data,
                                                   const std::vector<size_t>& test_items, int depth = kDefaultDepth);

void write_steps_csv(const std::string& path, const std::vector<StepLog>& steps);
void write_matrix_csv(const std::string& path, const std::vector<std::string>& ids,
                      const std::vector<std::vector<double>>& matrix);

/// Deterministic split: the last `test_count` items are held out.
std::pair<std::vector<size_t>, std::vector<size_t>> split_items(size_t items, size_t test_count);

}  // namespace starenh::train
