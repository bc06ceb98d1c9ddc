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

#include "starenh/style.hpp"

#include <cmath>
#include <fstream>

#include "starenh/error.hpp"

namespace starenh::style {

using nlohmann::json;

namespace {

constexpr int kLatentFormatVersion = 1;

double norm(std::span<const double> v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void check_head(const ClassifierHead& head, size_t dim) {
  require(head.num_styles() >= 2, "classifier head needs at least two styles");
  require(head.scale > 0, "classifier scale must be positive");
  for (const auto& w : head.weights) {
    require(w.size() == dim, "classifier weight dimension mismatch");
    require(norm(w) > 0, "classifier weight has zero norm");
  }
}

}  // namespace

void StyleLatent::validate(double tolerance) const {
  require(values.size() >= 2, "style latent dimension must be at least 2");
  for (double v : values) require(std::isfinite(v), "style latent is not finite");
  require(std::abs(norm(values) - 1.0) <= tolerance, "style latent is not unit norm");
}

double cosine(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "cosine: dimension mismatch");
  const double na = norm(a), nb = norm(b);
  require(na > 0 && nb > 0, "cosine of a zero vector");
  return dot(a, b) / (na * nb);
}

double classify_loss(std::span<const double> f, const ClassifierHead& head, int label) {
  check_head(head, f.size());
  require(label >= 0 && label < head.num_styles(), "style label not in the classifier");
  require(norm(f) > 0, "embedding has zero norm");
  std::vector<double> logits(head.weights.size());
  double top = -INFINITY;
  for (size_t q = 0; q < logits.size(); ++q) {
    logits[q] = head.scale * cosine(f, head.weights[q]);
    top = std::max(top, logits[q]);
  }
  double sum = 0;
  for (double z : logits) sum += std::exp(z - top);
  return top + std::log(sum) - logits[static_cast<size_t>(label)];
}

std::vector<double> classify_loss_gradient(std::span<const double> f, const ClassifierHead& head,
                                           int label) {
  check_head(head, f.size());
  require(label >= 0 && label < head.num_styles(), "style label not in the classifier");
  const double nf = norm(f);
  require(nf > 0, "embedding has zero norm");
  const size_t nq = head.weights.size();
  std::vector<double> cos(nq), prob(nq);
  double top = -INFINITY;
  for (size_t q = 0; q < nq; ++q) {
    cos[q] = cosine(f, head.weights[q]);
    top = std::max(top, head.scale * cos[q]);
  }
  double sum = 0;
  for (size_t q = 0; q < nq; ++q) sum += (prob[q] = std::exp(head.scale * cos[q] - top));
  std::vector<double> grad(f.size(), 0.0);
  for (size_t q = 0; q < nq; ++q) {
    const double coeff = head.scale * (prob[q] / sum - (static_cast<int>(q) == label ? 1.0 : 0.0));
    const double nw = norm(head.weights[q]);
    // d cos / d f = w / (|f||w|) - cos * f / |f|^2
    for (size_t e = 0; e < f.size(); ++e)
      grad[e] += coeff * (head.weights[q][e] / (nf * nw) - cos[q] * f[e] / (nf * nf));
  }
  return grad;
}

StyleLatent average_latent(std::span<const Embedding> embeddings, std::string provenance) {
  require(!embeddings.empty(), "average_latent needs at least one embedding");
  const size_t dim = embeddings.front().size();
  std::vector<double> avg(dim, 0.0);
  for (const auto& f : embeddings) {
    require(f.size() == dim, "embedding dimension mismatch");
    const double n = norm(f);
    require(n > 0, "embedding has zero norm");
    for (size_t e = 0; e < dim; ++e) avg[e] += f[e] / n;
  }
  for (double& v : avg) v /= static_cast<double>(embeddings.size());
  const double n = norm(avg);
  if (!(n >= kDegenerateNorm))
    throw Error(ErrorKind::kDegenerate, "embeddings average to (almost) zero; no style centroid");
  for (double& v : avg) v /= n;
  return {std::move(avg), std::move(provenance)};
}

int nearest_center(std::span<const double> embedding, std::span<const StyleLatent> centers) {
  require(!centers.empty(), "no style centres");
  int best = 0;
  double best_cos = -INFINITY;
  for (size_t q = 0; q < centers.size(); ++q) {
    const double c = cosine(embedding, centers[q].values);
    if (c > best_cos) {
      best_cos = c;
      best = static_cast<int>(q);
    }
  }
  return best;
}

RecallReport recall_at_1(std::span<const Embedding> embeddings, std::span<const int> labels,
                         std::span<const StyleLatent> centers) {
  require(embeddings.size() == labels.size(), "embeddings and labels differ in length");
  RecallReport report;
  report.recall.assign(centers.size(), 0.0);
  report.count.assign(centers.size(), 0);
  for (size_t i = 0; i < embeddings.size(); ++i) {
    const int label = labels[i];
    require(label >= 0 && static_cast<size_t>(label) < centers.size(),
            "no style centre for label " + std::to_string(label));
    ++report.count[static_cast<size_t>(label)];
    if (nearest_center(embeddings[i], centers) == label) report.recall[static_cast<size_t>(label)] += 1.0;
  }
  for (size_t q = 0; q < centers.size(); ++q)
    if (report.count[q] > 0) report.recall[q] /= report.count[q];
  return report;
}

json latent_to_json(const StyleLatent& latent) {
  return json{{"version", kLatentFormatVersion},
              {"dimension", latent.dimension()},
              {"values", latent.values},
              {"provenance", latent.provenance}};
}

StyleLatent latent_from_json(const json& doc) {
  try {
    require(doc.value("version", 0) == kLatentFormatVersion, "unsupported style latent version");
    StyleLatent latent{doc.at("values").get<std::vector<double>>(), doc.value("provenance", "")};
    require(doc.at("dimension").get<int>() == latent.dimension(), "style latent dimension mismatch");
    latent.validate();
    return latent;
  } catch (const json::exception& e) {
    throw_invalid(std::string("malformed style latent JSON: ") + e.what());
  }
}

void save_latent(const std::string& path, const StyleLatent& latent) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << latent_to_json(latent).dump(2) << '\n';
}

StyleLatent load_latent(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path);
  try {
    return latent_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw_invalid("malformed style latent JSON in " + path + ": " + e.what());
  }
}

}  // namespace starenh::style
