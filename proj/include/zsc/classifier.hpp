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
#include <string>
#include <vector>

#include "zsc/embedding_io.hpp"
#include "zsc/numeric.hpp"
#include "zsc/taxonomy.hpp"

namespace zsc {

struct ClassificationConfig {
  double scale = 100.0;     // softmax temperature applied to cosine logits
  double threshold = 0.5;   // accept when the top probability is >= this
  std::size_t top_k = 5;

  // Throws InvalidArgument / KOutOfRange.
  void validate(std::size_t class_count) const;
};

struct CorpusOptions {
  std::size_t workers = 1;      // 0 = hardware concurrency
  std::size_t batch_size = 256; // items per scheduling chunk
  bool skip_missing = false;    // otherwise a missing embedding is fatal
};

struct CorpusResult {
  std::vector<DecisionRecord> decisions;  // manifest order
  std::vector<std::string> skipped;       // ids without an embedding
};

// Clamped cosine similarity of v against every prompt embedding.
std::vector<double> similarity_logits(std::span<const float> v, const Taxonomy& tax);

ProbVector classify_embedding(std::span<const float> v, const Taxonomy& tax,
                              const ClassificationConfig& cfg);

DecisionRecord decide(std::span<const double> p, const Taxonomy& tax,
                      const ClassificationConfig& cfg, std::string id,
                      DecisionMode mode = DecisionMode::kImage);

CorpusResult classify_corpus(std::span<const ManifestEntry> manifest,
                             const EmbeddingStore& image_store, const Taxonomy& tax,
                             const ClassificationConfig& cfg,
                             const CorpusOptions& options = {});

}  // namespace zsc
