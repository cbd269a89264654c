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

// Planted-label corpora for tests, benchmarks and demos. A `planted_fraction`
// of items are noisy copies of their class prompt embedding; the rest are
// random directions that match no class.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "zsc/embedding_io.hpp"
#include "zsc/taxonomy.hpp"

namespace zsc {

struct SyntheticSpec {
  std::size_t items = 1000;
  std::size_t dim = 64;
  std::size_t classes = 20;
  double planted_fraction = 0.6;
  // Gaussian noise added to a planted item, as a multiple of a unit-norm
  // random vector, before renormalization.
  double image_noise = 2.0;
  double text_noise = 2.0;
  // Share of items that carry a caption (and hence a text embedding).
  double caption_fraction = 1.0;
  std::uint64_t seed = 1;
  // Raw class names; "class 000".. when empty. Overrides `classes`.
  std::vector<std::string> labels;
};

struct SyntheticCorpus {
  Taxonomy taxonomy;  // prompt embeddings attached
  EmbeddingStore label_store{1};
  std::vector<ManifestEntry> manifest;
  EmbeddingStore images{1};
  EmbeddingStore texts{1};
  std::vector<std::optional<std::size_t>> planted;  // per manifest entry
};

SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec);

}  // namespace zsc
