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

#pragma once

#include <cstddef>
#include <span>

#include "zsc/classifier.hpp"
#include "zsc/embedding_io.hpp"
#include "zsc/numeric.hpp"
#include "zsc/taxonomy.hpp"

namespace zsc {

enum class FusionMode { kWeighted, kConditional };

struct EnsembleConfig {
  double w_image = 0.8;             // image share of the blend
  double gate = 0.6;                // conditional mode: image alone when max >= gate
  double text_sim_threshold = 0.0;  // captions below this best cosine are ignored
  FusionMode mode = FusionMode::kWeighted;

  void validate() const;
};

struct Fusion {
  ProbVector probs;
  bool used_text = false;
};

// Same pipeline as classify_embedding, applied to a caption embedding.
ProbVector text_distribution(std::span<const float> text_emb, const Taxonomy& tax, double scale);

ProbVector fuse_weighted(std::span<const double> p_img, std::span<const double> p_txt,
                         const EnsembleConfig& cfg);

Fusion fuse_conditional(std::span<const double> p_img, std::span<const double> p_txt,
                        const EnsembleConfig& cfg);

// True when the caption's best cosine against any prompt reaches
// cfg.text_sim_threshold.
bool text_gate(std::span<const float> text_emb, const Taxonomy& tax, const EnsembleConfig& cfg);

struct EnsembleResult {
  std::vector<DecisionRecord> decisions;  // manifest order
  std::vector<std::string> skipped;       // ids without an image embedding
  std::size_t image_only_fallbacks = 0;   // no caption embedding, or gated out
  std::size_t used_text = 0;
};

// Items without a caption embedding, or whose caption fails text_gate, are
// decided on the image alone and recorded with mode "image".
EnsembleResult ensemble_corpus(std::span<const ManifestEntry> manifest,
                               const EmbeddingStore& image_store,
                               const EmbeddingStore& text_store, const Taxonomy& tax,
                               const ClassificationConfig& ccfg, const EnsembleConfig& ecfg,
                               const CorpusOptions& options = {});

}  // namespace zsc
