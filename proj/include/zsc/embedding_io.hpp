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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace zsc {

// ---------------------------------------------------------------------------
// Embedding store

// Ordered id -> unit-norm float vector mapping with a fixed dimension. Rows
// are stored contiguously in insertion order.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

  // Throws DimensionMismatch, NonFinite, NotUnitNorm(id) or DuplicateId(id).
  void add(std::string id, std::span<const float> values);

  bool contains(std::string_view id) const;
  std::optional<std::span<const float>> find(std::string_view id) const;
  const std::string& id(std::size_t row) const { return ids_[row]; }
  std::span<const float> row(std::size_t row) const;

 private:
  std::size_t dim_;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Binary layout, little-endian throughout:
//   "ZSE1" | u16 version (1) | u32 dim | u64 count |
//   count x [u16 id byte length | id bytes | dim x f32]
inline constexpr std::uint16_t kEmbeddingFormatVersion = 1;

struct ReadEmbeddingOptions {
  // Rescale records to unit norm instead of rejecting them.
  bool renormalize = false;
};

EmbeddingStore read_embeddings(const std::filesystem::path& path,
                               const ReadEmbeddingOptions& options = {});
void write_embeddings(const EmbeddingStore& store,
                      const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Manifest

enum class Split { kTrain, kVal, kTest, kUnsplit };

std::string_view to_string(Split split);
std::optional<Split> parse_split(std::string_view text);

struct ManifestEntry {
  std::string id;
  std::string image_path;
  std::string text;
  Split split = Split::kUnsplit;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(std::span<const ManifestEntry> entries,
                    const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Decisions

enum class DecisionMode { kImage, kWeighted, kConditional };

std::string_view to_string(DecisionMode mode);
std::optional<DecisionMode> parse_decision_mode(std::string_view text);

struct LabelProb {
  std::string label;
  double prob = 0.0;

  friend bool operator==(const LabelProb&, const LabelProb&) = default;
};

struct DecisionRecord {
  std::string id;
  DecisionMode mode = DecisionMode::kImage;
  double threshold = 0.0;
  std::vector<LabelProb> top;
  bool accepted = false;
  // Set for fused decisions: whether the caption distribution was blended in.
  std::optional<bool> used_text;

  double max_prob() const { return top.empty() ? 0.0 : top.front().prob; }
  const std::string& predicted_label() const { return top.front().label; }

  friend bool operator==(const DecisionRecord&, const DecisionRecord&) = default;
};

// Throws InvariantViolation(id) unless top is non-empty and descending and
// accepted == (top[0].prob >= threshold).
void validate_decision(const DecisionRecord& record);

// One JSON object per line; probabilities written with 6 decimal digits.
std::string format_decision(const DecisionRecord& record);
DecisionRecord parse_decision(std::string_view line, std::size_t line_number = 0);

void append_decisions(std::span<const DecisionRecord> records,
                      const std::filesystem::path& path);
// Truncates `path` first.
void write_decisions(std::span<const DecisionRecord> records,
                     const std::filesystem::path& path);
std::vector<DecisionRecord> read_decisions(const std::filesystem::path& path);

}  // namespace zsc
