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

#include "zsc/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "zsc/error.hpp"
#include "zsc/numeric.hpp"

namespace zsc {
namespace {

std::vector<float> gaussian(std::mt19937_64& rng, std::size_t dim, double scale) {
  std::normal_distribution<double> normal(0.0, scale / std::sqrt(static_cast<double>(dim)));
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(normal(rng));
  return v;
}

std::vector<float> noisy_copy(std::mt19937_64& rng, std::span<const float> center, double noise) {
  auto v = gaussian(rng, center.size(), noise);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += center[i];
  return l2_normalize(std::span<const float>(v));
}

std::string padded(const char* prefix, std::size_t n, int width) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, width, n);
  return buf;
}

}  // namespace

SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec) {
  if (spec.dim == 0) throw Error(ErrorCode::kInvalidArgument, "synthetic dim must be positive");
  std::vector<std::string> labels = spec.labels;
  if (labels.empty()) {
    for (std::size_t c = 0; c < spec.classes; ++c) labels.push_back(padded("class ", c, 3));
  }
  if (labels.empty()) throw Error(ErrorCode::kInvalidArgument, "synthetic corpus needs classes");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_class(0, labels.size() - 1);

  SyntheticCorpus corpus;
  corpus.taxonomy = Taxonomy("synthetic", labels);
  corpus.label_store = EmbeddingStore(spec.dim);
  for (const auto& label : labels) {
    auto v = gaussian(rng, spec.dim, 1.0);
    corpus.label_store.add(label, l2_normalize(std::span<const float>(v)));
  }
  corpus.taxonomy = attach_prompt_embeddings(corpus.taxonomy, corpus.label_store);

  corpus.images = EmbeddingStore(spec.dim);
  corpus.texts = EmbeddingStore(spec.dim);
  const auto planted_count =
      static_cast<std::size_t>(std::llround(spec.planted_fraction * static_cast<double>(spec.items)));
  for (std::size_t i = 0; i < spec.items; ++i) {
    ManifestEntry e;
    e.id = padded("item_", i, 6);
    e.image_path = "images/" + e.id + ".jpg";
    std::optional<std::size_t> cls;
    if (i < planted_count) cls = pick_class(rng);

    if (cls) {
      corpus.images.add(e.id, noisy_copy(rng, corpus.label_store.row(*cls), spec.image_noise));
    } else {
      auto v = gaussian(rng, spec.dim, 1.0);
      corpus.images.add(e.id, l2_normalize(std::span<const float>(v)));
    }

    if (unit(rng) < spec.caption_fraction) {
      if (cls) {
        e.text = "my photo of the " + labels[*cls];
        corpus.texts.add(e.id, noisy_copy(rng, corpus.label_store.row(*cls), spec.text_noise));
      } else {
        e.text = "having a great day";
        auto v = gaussian(rng, spec.dim, 1.0);
        corpus.texts.add(e.id, l2_normalize(std::span<const float>(v)));
      }
    }
    corpus.planted.push_back(cls);
    corpus.manifest.push_back(std::move(e));
  }
  return corpus;
}

}  // namespace zsc
