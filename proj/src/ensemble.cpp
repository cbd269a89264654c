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

#include "zsc/ensemble.hpp"

#include <algorithm>
#include <optional>

#include "zsc/error.hpp"
#include "zsc/parallel.hpp"

namespace zsc {

void EnsembleConfig::validate() const {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(w_image)) throw Error(ErrorCode::kWeightOutOfRange, "w_image must lie in [0,1]");
  if (!in_unit(gate)) throw Error(ErrorCode::kInvalidArgument, "gate must lie in [0,1]");
  if (!in_unit(text_sim_threshold)) {
    throw Error(ErrorCode::kInvalidArgument, "text_sim_threshold must lie in [0,1]");
  }
}

ProbVector text_distribution(std::span<const float> text_emb, const Taxonomy& tax, double scale) {
  return softmax_scaled(similarity_logits(text_emb, tax), scale);
}

ProbVector fuse_weighted(std::span<const double> p_img, std::span<const double> p_txt,
                         const EnsembleConfig& cfg) {
  return convex_blend(p_img, p_txt, cfg.w_image);
}

Fusion fuse_conditional(std::span<const double> p_img, std::span<const double> p_txt,
                        const EnsembleConfig& cfg) {
  if (p_img.size() != p_txt.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "image and text distributions differ in length");
  }
  if (p_img[argmax(p_img)] >= cfg.gate) {
    return {ProbVector(p_img.begin(), p_img.end()), false};
  }
  return {fuse_weighted(p_img, p_txt, cfg), true};
}

bool text_gate(std::span<const float> text_emb, const Taxonomy& tax, const EnsembleConfig& cfg) {
  const auto logits = similarity_logits(text_emb, tax);
  return *std::max_element(logits.begin(), logits.end()) >= cfg.text_sim_threshold;
}

EnsembleResult ensemble_corpus(std::span<const ManifestEntry> manifest,
                               const EmbeddingStore& image_store,
                               const EmbeddingStore& text_store, const Taxonomy& tax,
                               const ClassificationConfig& ccfg, const EnsembleConfig& ecfg,
                               const CorpusOptions& options) {
  ccfg.validate(tax.size());
  ecfg.validate();
  if (text_store.dim() != image_store.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "image and text embeddings differ in dimension");
  }

  struct Item {
    std::size_t index;
    std::span<const float> image;
    std::optional<std::span<const float>> text;
  };
  EnsembleResult result;
  std::vector<Item> items;
  items.reserve(manifest.size());
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    auto image = image_store.find(manifest[i].id);
    if (!image) {
      if (!options.skip_missing) {
        throw Error(ErrorCode::kMissingEmbedding,
                    "no image embedding for id '" + manifest[i].id + "'", manifest[i].id);
      }
      result.skipped.push_back(manifest[i].id);
      continue;
    }
    items.push_back({i, *image, text_store.find(manifest[i].id)});
  }

  const DecisionMode fused_mode = ecfg.mode == FusionMode::kWeighted
                                      ? DecisionMode::kWeighted
                                      : DecisionMode::kConditional;
  result.decisions.resize(items.size());
  parallel_for(items.size(), options.workers, options.batch_size,
               [&](std::size_t begin, std::size_t end) {
                 for (std::size_t k = begin; k < end; ++k) {
                   const Item& item = items[k];
                   const std::string& id = manifest[item.index].id;
                   const auto p_img = classify_embedding(item.image, tax, ccfg);
                   if (!item.text || !text_gate(*item.text, tax, ecfg)) {
                     result.decisions[k] = decide(p_img, tax, ccfg, id, DecisionMode::kImage);
                     continue;
                   }
                   const auto p_txt = text_distribution(*item.text, tax, ccfg.scale);
                   Fusion fused = ecfg.mode == FusionMode::kWeighted
                                      ? Fusion{fuse_weighted(p_img, p_txt, ecfg), true}
                                      : fuse_conditional(p_img, p_txt, ecfg);
                   auto record = decide(fused.probs, tax, ccfg, id, fused_mode);
                   record.used_text = fused.used_text;
                   result.decisions[k] = std::move(record);
                 }
               });
  for (const auto& d : result.decisions) {
    if (d.mode == DecisionMode::kImage) ++result.image_only_fallbacks;
    if (d.used_text.value_or(false)) ++result.used_text;
  }
  return result;
}

}  // namespace zsc
