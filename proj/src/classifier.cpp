// Copyright 2026 The ZSC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "zsc/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "zsc/error.hpp"
#include "zsc/parallel.hpp"

namespace zsc {
namespace {

void require_attached(const Taxonomy& tax, std::size_t dim) {
  if (!tax.embeddings_attached()) {
    throw Error(ErrorCode::kEmbeddingsNotAttached, "taxonomy has no prompt embeddings");
  }
  if (*tax.embedding_dim() != dim) {
    throw Error(ErrorCode::kDimensionMismatch,
                "embedding dimension " + std::to_string(dim) + " vs taxonomy dimension " +
                    std::to_string(*tax.embedding_dim()));
  }
}

}  // namespace

void ClassificationConfig::validate(std::size_t class_count) const {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::kInvalidArgument, "scale must be positive");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold must lie in [0,1]");
  }
  if (top_k == 0 || top_k > class_count) {
    throw Error(ErrorCode::kKOutOfRange, "top_k=" + std::to_string(top_k) + " with " +
                                             std::to_string(class_count) + " classes");
  }
}

std::vector<double> similarity_logits(std::span<const float> v, const Taxonomy& tax) {
  require_attached(tax, v.size());
  const std::size_t dim = v.size();
  const double v_norm = l2_norm(v);
  if (!(v_norm > kZeroNormEpsilon)) throw Error(ErrorCode::kZeroVector, "zero query embedding");
  const auto matrix = tax.prompt_matrix();
  const auto norms = tax.prompt_norms();
  std::vector<double> logits(tax.size());
  for (std::size_t c = 0; c < tax.size(); ++c) {
    const double d = dot(v, matrix.subspan(c * dim, dim));
    logits[c] = std::clamp(d / (v_norm * norms[c]), -1.0, 1.0);
  }
  return logits;
}

ProbVector classify_embedding(std::span<const float> v, const Taxonomy& tax,
                              const ClassificationConfig& cfg) {
  return softmax_scaled(similarity_logits(v, tax), cfg.scale);
}

DecisionRecord decide(std::span<const double> p, const Taxonomy& tax,
                      const ClassificationConfig& cfg, std::string id, DecisionMode mode) {
  if (p.size() != tax.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "probability vector of length " + std::to_string(p.size()) + " for " +
                    std::to_string(tax.size()) + " classes",
                id);
  }
  DecisionRecord r;
  r.id = std::move(id);
  r.mode = mode;
  r.threshold = cfg.threshold;
  for (const auto& s : top_k(p, std::min(cfg.top_k, p.size()))) {
    r.top.push_back({tax[s.index].raw_name, s.prob});
  }
  r.accepted = r.top.front().prob >= cfg.threshold;
  return r;
}

CorpusResult classify_corpus(std::span<const ManifestEntry> manifest,
                             const EmbeddingStore& image_store, const Taxonomy& tax,
                             const ClassificationConfig& cfg, const CorpusOptions& options) {
  cfg.validate(tax.size());
  require_attached(tax, image_store.dim());

  CorpusResult result;
  std::vector<std::size_t> present;
  std::vector<std::span<const float>> rows;
  present.reserve(manifest.size());
  rows.reserve(manifest.size());
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    auto row = image_store.find(manifest[i].id);
    if (!row) {
      if (!options.skip_missing) {
        throw Error(ErrorCode::kMissingEmbedding,
                    "no image embedding for id '" + manifest[i].id + "'", manifest[i].id);
      }
      result.skipped.push_back(manifest[i].id);
      continue;
    }
    present.push_back(i);
    rows.push_back(*row);
  }

  result.decisions.resize(present.size());
  parallel_for(present.size(), options.workers, options.batch_size,
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t k = begin; k < end; ++k) {
                   const auto p = classify_embedding(rows[k], tax, cfg);
                   result.decisions[k] = decide(p, tax, cfg, manifest[present[k]].id);
                 }
               });
  return result;
}

}  // namespace zsc
