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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zsc/embedding_io.hpp"

namespace zsc {

// How raw class names become text prompts. `kNatural` is the "A photo of
// ..." rewrite, `kRaw` passes the name through, `kPattern` substitutes the
// name for every "{label}" in a user pattern.
class PromptTemplate {
 public:
  enum class Kind { kNatural, kRaw, kPattern };

  static PromptTemplate natural() { return PromptTemplate(Kind::kNatural, {}); }
  static PromptTemplate raw() { return PromptTemplate(Kind::kRaw, {}); }
  // Throws InvalidArgument when the pattern has no "{label}".
  static PromptTemplate pattern(std::string pattern);
  // "natural", "raw", or a pattern containing "{label}".
  static PromptTemplate parse(std::string_view spec);

  Kind kind() const noexcept { return kind_; }
  const std::string& pattern_text() const noexcept { return pattern_; }

 private:
  PromptTemplate(Kind kind, std::string pattern) : kind_(kind), pattern_(std::move(pattern)) {}

  Kind kind_;
  std::string pattern_;
};

std::string prompt_expand(std::string_view raw_name,
                          const PromptTemplate& tmpl = PromptTemplate::natural());

// "cathedral/outdoor" -> "outdoor cathedral", "/b/bakery/shop" -> "bakery
// shop", underscores become spaces. Names already in prefix form pass
// through trimmed.
std::string canonicalize_label(std::string_view line);

struct LabelClass {
  std::size_t id = 0;
  std::string raw_name;
  std::string prompt;
  std::vector<float> prompt_embedding;  // empty until attached
};

// Ordered class list; the order is the probability-vector axis.
class Taxonomy {
 public:
  Taxonomy() = default;
  Taxonomy(std::string name, std::vector<std::string> raw_names,
           const PromptTemplate& tmpl = PromptTemplate::natural());

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return classes_.size(); }
  const LabelClass& operator[](std::size_t id) const { return classes_[id]; }
  std::span<const LabelClass> classes() const noexcept { return classes_; }
  std::optional<std::size_t> find(std::string_view raw_name) const;

  std::optional<std::size_t> embedding_dim() const noexcept { return dim_; }
  bool embeddings_attached() const noexcept { return dim_.has_value(); }

  // Row-major size() x dim matrix of prompt embeddings and their norms.
  std::span<const float> prompt_matrix() const noexcept { return matrix_; }
  std::span<const double> prompt_norms() const noexcept { return norms_; }

  // Re-expands every prompt. Throws InvalidArgument once embeddings are
  // attached, since they were computed from the old prompts.
  void apply_template(const PromptTemplate& tmpl);

 private:
  friend Taxonomy attach_prompt_embeddings(const Taxonomy& tax, const EmbeddingStore& store);

  std::string name_;
  std::vector<LabelClass> classes_;
  std::optional<std::size_t> dim_;
  std::vector<float> matrix_;
  std::vector<double> norms_;
};

// One raw label per line (UTF-8), canonicalized; blank lines ignored.
// Throws IoError, EmptyFile, DuplicateLabel.
Taxonomy load_taxonomy(const std::filesystem::path& path,
                       const PromptTemplate& tmpl = PromptTemplate::natural());
void save_taxonomy(const Taxonomy& tax, const std::filesystem::path& path);

// Looks each class up by raw name, then by prompt. Throws
// MissingEmbedding(raw_name), DimensionMismatch, NotUnitNorm.
Taxonomy attach_prompt_embeddings(const Taxonomy& tax, const EmbeddingStore& store);

// Tab-separated "id raw_name prompt" with a header row.
void write_prompt_dump(const Taxonomy& tax, const std::filesystem::path& path);

}  // namespace zsc
