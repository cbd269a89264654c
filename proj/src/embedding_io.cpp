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

#include "zsc/embedding_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "internal/lines.hpp"
#include "zsc/error.hpp"
#include "zsc/numeric.hpp"

namespace zsc {
namespace {

using internal::ordered_json;

constexpr std::array<char, 4> kMagic = {'Z', 'S', 'E', '1'};

template <typename T>
void put_le(std::string& buf, T value) {
  using U = std::make_unsigned_t<T>;
  auto u = static_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    buf.push_back(static_cast<char>((u >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(const unsigned char* p) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<T>(p[i]) << (8 * i));
  }
  return value;
}

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw Error(ErrorCode::kIoError, "cannot open " + path.string(), path.string());
  }

  // False when fewer than n bytes remain.
  bool read(void* dst, std::size_t n) {
    in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (in_.bad()) throw Error(ErrorCode::kIoError, "read failed on " + path_.string(), path_.string());
    return static_cast<std::size_t>(in_.gcount()) == n;
  }

  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

 private:
  std::filesystem::path path_;
  std::ifstream in_;
};

double round6(double p) { return std::round(p * 1e6) / 1e6; }

// Rounds the top list to 6 decimals without breaking the acceptance
// relation or the descending order.
std::vector<double> rounded_probs(const DecisionRecord& r) {
  std::vector<double> out;
  out.reserve(r.top.size());
  for (const auto& lp : r.top) out.push_back(round6(lp.prob));
  if (!out.empty()) {
    if (r.accepted && out[0] < r.threshold) out[0] = std::ceil(r.top[0].prob * 1e6) / 1e6;
    if (!r.accepted && out[0] >= r.threshold) {
      out[0] = std::floor(r.top[0].prob * 1e6) / 1e6;
      if (out[0] >= r.threshold) out[0] = std::nextafter(r.threshold, 0.0);
    }
    for (std::size_t i = 1; i < out.size(); ++i) out[i] = std::min(out[i], out[i - 1]);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// EmbeddingStore

EmbeddingStore::EmbeddingStore(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "embedding dimension must be positive");
}

void EmbeddingStore::add(std::string id, std::span<const float> values) {
  if (values.size() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "record '" + id + "' has dimension " + std::to_string(values.size()) +
                    ", store expects " + std::to_string(dim_),
                id);
  }
  if (!all_finite(values)) throw Error(ErrorCode::kNonFinite, "record '" + id + "' is not finite", id);
  if (!is_unit_norm(values)) {
    throw Error(ErrorCode::kNotUnitNorm,
                "record '" + id + "' has norm " + std::to_string(l2_norm(values)), id);
  }
  if (index_.contains(id)) throw Error(ErrorCode::kDuplicateId, "duplicate id '" + id + "'", id);
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  data_.insert(data_.end(), values.begin(), values.end());
}

bool EmbeddingStore::contains(std::string_view id) const {
  return index_.contains(std::string(id));
}

std::optional<std::span<const float>> EmbeddingStore::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return row(it->second);
}

std::span<const float> EmbeddingStore::row(std::size_t r) const {
  return std::span<const float>(data_).subspan(r * dim_, dim_);
}

// ---------------------------------------------------------------------------
// Binary embedding files

EmbeddingStore read_embeddings(const std::filesystem::path& path,
                               const ReadEmbeddingOptions& options) {
  Reader reader(path);
  std::array<char, 4> magic{};
  if (!reader.read(magic.data(), magic.size()) || magic != kMagic) {
    throw Error(ErrorCode::kBadMagic, path.string() + " is not a ZSE1 embedding file",
                path.string());
  }
  unsigned char header[14];
  if (!reader.read(header, sizeof(header))) {
    throw Error(ErrorCode::kIoError, path.string() + ": truncated header", path.string());
  }
  const auto version = get_le<std::uint16_t>(header);
  if (version != kEmbeddingFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                path.string() + ": version " + std::to_string(version), path.string());
  }
  const auto dim = get_le<std::uint32_t>(header + 2);
  const auto count = get_le<std::uint64_t>(header + 6);
  if (dim == 0) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + ": dimension 0", path.string());
  }

  EmbeddingStore store(dim);
  std::vector<unsigned char> payload(static_cast<std::size_t>(dim) * 4);
  std::vector<float> values(dim);
  std::string id;
  auto short_file = [&](std::uint64_t got) {
    return Error(ErrorCode::kCountMismatch,
                 path.string() + ": header declares " + std::to_string(count) +
                     " records, found " + std::to_string(got),
                 path.string());
  };
  for (std::uint64_t r = 0; r < count; ++r) {
    unsigned char len_bytes[2];
    if (!reader.read(len_bytes, 2)) throw short_file(r);
    id.resize(get_le<std::uint16_t>(len_bytes));
    if (!reader.read(id.data(), id.size())) throw short_file(r);
    if (!reader.read(payload.data(), payload.size())) throw short_file(r);
    for (std::size_t i = 0; i < dim; ++i) {
      values[i] = std::bit_cast<float>(get_le<std::uint32_t>(payload.data() + 4 * i));
    }
    if (options.renormalize && all_finite(std::span<const float>(values)) &&
        !is_unit_norm(values)) {
      auto fixed = l2_normalize(std::span<const float>(values));
      store.add(id, fixed);
    } else {
      store.add(id, values);
    }
  }
  if (!reader.at_end()) {
    throw Error(ErrorCode::kCountMismatch,
                path.string() + ": trailing bytes after " + std::to_string(count) + " records",
                path.string());
  }
  return store;
}

void write_embeddings(const EmbeddingStore& store, const std::filesystem::path& path) {
  std::string buf(kMagic.begin(), kMagic.end());
  put_le<std::uint16_t>(buf, kEmbeddingFormatVersion);
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(store.dim()));
  put_le<std::uint64_t>(buf, store.size());

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open " + path.string(), path.string());
  for (std::size_t r = 0; r < store.size(); ++r) {
    const std::string& id = store.id(r);
    if (id.size() > 0xFFFF) {
      throw Error(ErrorCode::kInvalidArgument, "id longer than 65535 bytes", id);
    }
    put_le<std::uint16_t>(buf, static_cast<std::uint16_t>(id.size()));
    buf.append(id);
    for (float v : store.row(r)) put_le<std::uint32_t>(buf, std::bit_cast<std::uint32_t>(v));
    if (buf.size() > (1u << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failed on " + path.string(), path.string());
}

// ---------------------------------------------------------------------------
// Manifest

std::string_view to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
    case Split::kUnsplit: return "unsplit";
  }
  return "unsplit";
}

std::optional<Split> parse_split(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "val") return Split::kVal;
  if (text == "test") return Split::kTest;
  if (text == "unsplit") return Split::kUnsplit;
  return std::nullopt;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  const auto lines = internal::read_lines(path);
  std::vector<ManifestEntry> entries;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (internal::is_blank(lines[i])) continue;
    const auto j = internal::parse_object(lines[i], line_no);
    ManifestEntry e;
    e.id = internal::required_field<std::string>(j, "id", line_no);
    e.image_path = internal::required_field<std::string>(j, "image_path", line_no);
    if (j.contains("text")) e.text = internal::required_field<std::string>(j, "text", line_no);
    if (j.contains("split")) {
      auto split = parse_split(internal::required_field<std::string>(j, "split", line_no));
      if (!split) {
        throw Error(ErrorCode::kMalformedLine,
                    "line " + std::to_string(line_no) + " has an unknown split", e.id, line_no);
      }
      e.split = *split;
    }
    if (e.id.empty() || e.image_path.empty()) {
      throw Error(ErrorCode::kMalformedLine,
                  "line " + std::to_string(line_no) + " has an empty id or image_path", e.id,
                  line_no);
    }
    if (!seen.insert(e.id).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "duplicate id '" + e.id + "' on line " + std::to_string(line_no), e.id,
                  line_no);
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_manifest(std::span<const ManifestEntry> entries, const std::filesystem::path& path) {
  std::vector<std::string> lines;
  lines.reserve(entries.size());
  for (const auto& e : entries) {
    ordered_json j;
    j["id"] = e.id;
    j["image_path"] = e.image_path;
    j["text"] = e.text;
    j["split"] = std::string(to_string(e.split));
    lines.push_back(j.dump());
  }
  internal::write_lines(path, lines, /*append=*/false);
}

// ---------------------------------------------------------------------------
// Decisions

std::string_view to_string(DecisionMode mode) {
  switch (mode) {
    case DecisionMode::kImage: return "image";
    case DecisionMode::kWeighted: return "weighted";
    case DecisionMode::kConditional: return "conditional";
  }
  return "image";
}

std::optional<DecisionMode> parse_decision_mode(std::string_view text) {
  if (text == "image") return DecisionMode::kImage;
  if (text == "weighted") return DecisionMode::kWeighted;
  if (text == "conditional") return DecisionMode::kConditional;
  return std::nullopt;
}

void validate_decision(const DecisionRecord& r) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kInvariantViolation, "decision '" + r.id + "': " + why, r.id);
  };
  if (r.top.empty()) fail("empty top list");
  for (std::size_t i = 1; i < r.top.size(); ++i) {
    if (r.top[i].prob > r.top[i - 1].prob) fail("top probabilities not descending");
  }
  if (!(r.threshold >= 0.0 && r.threshold <= 1.0)) fail("threshold outside [0,1]");
  if (r.accepted != (r.top[0].prob >= r.threshold)) {
    fail("accepted flag disagrees with top probability " + std::to_string(r.top[0].prob) +
         " and threshold " + std::to_string(r.threshold));
  }
}

std::string format_decision(const DecisionRecord& r) {
  const auto probs = rounded_probs(r);
  ordered_json j;
  j["id"] = r.id;
  j["mode"] = std::string(to_string(r.mode));
  j["threshold"] = r.threshold;
  auto top = ordered_json::array();
  for (std::size_t i = 0; i < r.top.size(); ++i) {
    top.push_back(ordered_json{{"label", r.top[i].label}, {"prob", probs[i]}});
  }
  j["top"] = std::move(top);
  j["accepted"] = r.accepted;
  if (r.used_text) j["used_text"] = *r.used_text;
  return j.dump();
}

DecisionRecord parse_decision(std::string_view line, std::size_t line_no) {
  const auto j = internal::parse_object(line, line_no);
  DecisionRecord r;
  r.id = internal::required_field<std::string>(j, "id", line_no);
  auto mode = parse_decision_mode(internal::required_field<std::string>(j, "mode", line_no));
  if (!mode) {
    throw Error(ErrorCode::kMalformedLine,
                "line " + std::to_string(line_no) + " has an unknown mode", r.id, line_no);
  }
  r.mode = *mode;
  r.threshold = internal::required_field<double>(j, "threshold", line_no);
  const auto top = internal::required_field<ordered_json>(j, "top", line_no);
  if (!top.is_array()) {
    throw Error(ErrorCode::kMalformedLine,
                "line " + std::to_string(line_no) + ": 'top' is not an array", r.id, line_no);
  }
  for (const auto& entry : top) {
    if (!entry.is_object()) {
      throw Error(ErrorCode::kMalformedLine,
                  "line " + std::to_string(line_no) + ": bad 'top' entry", r.id, line_no);
    }
    r.top.push_back({internal::required_field<std::string>(entry, "label", line_no),
                     internal::required_field<double>(entry, "prob", line_no)});
  }
  r.accepted = internal::required_field<bool>(j, "accepted", line_no);
  if (j.contains("used_text")) r.used_text = internal::required_field<bool>(j, "used_text", line_no);
  validate_decision(r);
  return r;
}

void append_decisions(std::span<const DecisionRecord> records,
                      const std::filesystem::path& path) {
  std::vector<std::string> lines;
  lines.reserve(records.size());
  for (const auto& r : records) {
    validate_decision(r);
    lines.push_back(format_decision(r));
  }
  internal::write_lines(path, lines, /*append=*/true);
}

void write_decisions(std::span<const DecisionRecord> records,
                     const std::filesystem::path& path) {
  internal::write_lines(path, {}, /*append=*/false);
  append_decisions(records, path);
}

std::vector<DecisionRecord> read_decisions(const std::filesystem::path& path) {
  const auto lines = internal::read_lines(path);
  std::vector<DecisionRecord> out;
  out.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (internal::is_blank(lines[i])) continue;
    out.push_back(parse_decision(lines[i], i + 1));
  }
  return out;
}

}  // namespace zsc
