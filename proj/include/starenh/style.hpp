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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace starenh::style {

inline constexpr double kDefaultScale = 30.0;
inline constexpr double kDegenerateNorm = 1e-8;

using Embedding = std::vector<double>;

/// Unit-norm centroid of a style's embeddings.
struct StyleLatent {
  std::vector<double> values;
  std::string provenance;

  int dimension() const { return static_cast<int>(values.size()); }
  /// Throws unless ||values|| = 1 within `tolerance`.
  void validate(double tolerance = 1e-6) const;

  friend bool operator==(const StyleLatent&, const StyleLatent&) = default;
};

/// Bias-free last layer of the style classifier: one weight row per style.
struct ClassifierHead {
  std::vector<std::vector<double>> weights;
  double scale = kDefaultScale;

  int num_styles() const { return static_cast<int>(weights.size()); }
};

double cosine(std::span<const double> a, std::span<const double> b);

/// Normalized-softmax cross entropy: -log softmax(s * cos(f, w_q))_p.
double classify_loss(std::span<const double> f, const ClassifierHead& head, int label);

/// d classify_loss / d f.
std::vector<double> classify_loss_gradient(std::span<const double> f, const ClassifierHead& head,
                                           int label);

/// Mean of L2-normalized embeddings, normalized again.
StyleLatent average_latent(std::span<const Embedding> embeddings, std::string provenance = {});

/// Nearest centre by cosine similarity; ties go to the lowest style index.
int nearest_center(std::span<const double> embedding, std::span<const StyleLatent> centers);

/// Per-style Recall@1. `labels[i]` indexes `centers`; styles without
/// samples report recall 0 with count 0.
struct RecallReport {
  std::vector<double> recall;
  std::vector<int> count;
};
RecallReport recall_at_1(std::span<const Embedding> embeddings, std::span<const int> labels,
                         std::span<const StyleLatent> centers);

nlohmann::json latent_to_json(const StyleLatent& latent);
StyleLatent latent_from_json(const nlohmann::json& doc);
void save_latent(const std::string& path, const StyleLatent& latent);
StyleLatent load_latent(const std::string& path);

}  // namespace starenh::style
