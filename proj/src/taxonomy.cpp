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

#include "zsc/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "internal/lines.hpp"
#include "zsc/error.hpp"
#include "zsc/numeric.hpp"

namespace zsc {
namespace {

constexpr std::string_view kPlaceholder = "{label}";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string_view article_for(std::string_view word) {
  if (word.empty()) return "a";
  switch (std::tolower(static_cast<unsigned char>(word.front()))) {
    case 'a': case 'e': case 'i': case 'o': case 'u': return "an";
    default: return "a";
  }
}

std::string natural_prompt(std::string_view name) {
  for (std::string_view side : {std::string_view("outdoor"), std::string_view("indoor")}) {
    if (name.size() > side.size() + 1 && name.starts_with(side) && name[side.size()] == ' ') {
      const auto rest = trim(name.substr(side.size() + 1));
      if (!rest.empty()) {
        return "A photo of the " + std::string(side) + " of " + std::string(article_for(rest)) +
               " " + std::string(rest);
      }
    }
  }
  return "A photo of " + std::string(article_for(name)) + " " + std::string(name);
}

}  // namespace

PromptTemplate PromptTemplate::pattern(std::string pattern) {
  if (pattern.find(kPlaceholder) == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "prompt pattern lacks {label}: " + pattern);
  }
  return PromptTemplate(Kind::kPattern, std::move(pattern));
}

PromptTemplate PromptTemplate::parse(std::string_view spec) {
  if (spec == "natural") return natural();
  if (spec == "raw") return raw();
  return pattern(std::string(spec));
}

std::string prompt_expand(std::string_view raw_name, const PromptTemplate& tmpl) {
  if (trim(raw_name).empty()) throw Error(ErrorCode::kEmptyLabel, "empty label");
  switch (tmpl.kind()) {
    case PromptTemplate::Kind::kRaw:
      return std::string(raw_name);
    case PromptTemplate::Kind::kNatural:
      return natural_prompt(raw_name);
    case PromptTemplate::Kind::kPattern: {
      std::string out = tmpl.pattern_text();
      for (auto pos = out.find(kPlaceholder); pos != std::string::npos;
           pos = out.find(kPlaceholder, pos + raw_name.size())) {
        out.replace(pos, kPlaceholder.size(), raw_name);
      }
      return out;
    }
  }
  return std::string(raw_name);
}

std::string canonicalize_label(std::string_view line) {
  std::string s(trim(line));
  // Places category paths look like "/c/cathedral/outdoor".
  if (s.size() > 3 && s[0] == '/' && s[2] == '/') s.erase(0, 3);
  if (!s.empty() && s.front() == '/') s.erase(0, 1);
  std::replace(s.begin(), s.end(), '_', ' ');

  std::string prefix;
  for (std::string_view side : {std::string_view("outdoor"), std::string_view("indoor")}) {
    const std::string suffix = "/" + std::string(side);
    if (s.size() > suffix.size() && s.ends_with(suffix)) {
      s.erase(s.size() - suffix.size());
      prefix = std::string(side) + " ";
      break;
    }
  }
  std::replace(s.begin(), s.end(), '/', ' ');
  return prefix + std::string(trim(s));
}

Taxonomy::Taxonomy(std::string name, std::vector<std::string> raw_names,
                   const PromptTemplate& tmpl)
    : name_(std::move(name)) {
  std::unordered_set<std::string> seen;
  classes_.reserve(raw_names.size());
  for (auto& raw : raw_names) {
    if (!seen.insert(raw).second) {
      throw Error(ErrorCode::kDuplicateLabel, "duplicate label '" + raw + "'", raw);
    }
    LabelClass c;
    c.id = classes_.size();
    c.prompt = prompt_expand(raw, tmpl);
    c.raw_name = std::move(raw);
    classes_.push_back(std::move(c));
  }
}

std::optional<std::size_t> Taxonomy::find(std::string_view raw_name) const {
  for (const auto& c : classes_) {
    if (c.raw_name == raw_name) return c.id;
  }
  return std::nullopt;
}

void Taxonomy::apply_template(const PromptTemplate& tmpl) {
  if (embeddings_attached()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot re-template after embeddings attached");
  }
  for (auto& c : classes_) c.prompt = prompt_expand(c.raw_name, tmpl);
}

Taxonomy load_taxonomy(const std::filesystem::path& path, const PromptTemplate& tmpl) {
  const auto lines = internal::read_lines(path);
  std::vector<std::string> names;
  for (const auto& line : lines) {
    if (internal::is_blank(line)) continue;
    names.push_back(canonicalize_label(line));
  }
  if (names.empty()) {
    throw Error(ErrorCode::kEmptyFile, path.string() + " contains no labels", path.string());
  }
  return Taxonomy(path.stem().string(), std::move(names), tmpl);
}

void save_taxonomy(const Taxonomy& tax, const std::filesystem::path& path) {
  std::vector<std::string> lines;
  for (const auto& c : tax.classes()) lines.push_back(c.raw_name);
  internal::write_lines(path, lines, /*append=*/false);
}

Taxonomy attach_prompt_embeddings(const Taxonomy& tax, const EmbeddingStore& store) {
  if (tax.embedding_dim() && *tax.embedding_dim() != store.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "taxonomy dimension " + std::to_string(*tax.embedding_dim()) +
                    " vs store dimension " + std::to_string(store.dim()));
  }
  Taxonomy out = tax;
  out.matrix_.clear();
  out.norms_.clear();
  out.matrix_.reserve(tax.size() * store.dim());
  for (auto& c : out.classes_) {
    auto vec = store.find(c.raw_name);
    if (!vec) vec = store.find(c.prompt);
    if (!vec) {
      throw Error(ErrorCode::kMissingEmbedding, "no embedding for label '" + c.raw_name + "'",
                  c.raw_name);
    }
    if (!is_unit_norm(*vec)) {
      throw Error(ErrorCode::kNotUnitNorm, "label '" + c.raw_name + "' is not unit norm",
                  c.raw_name);
    }
    c.prompt_embedding.assign(vec->begin(), vec->end());
    out.matrix_.insert(out.matrix_.end(), vec->begin(), vec->end());
    out.norms_.push_back(l2_norm(*vec));
  }
  out.dim_ = store.dim();
  return out;
}

void write_prompt_dump(const Taxonomy& tax, const std::filesystem::path& path) {
  std::vector<std::string> lines{"id\traw_name\tprompt"};
  for (const auto& c : tax.classes()) {
    lines.push_back(std::to_string(c.id) + "\t" + c.raw_name + "\t" + c.prompt);
  }
  internal::write_lines(path, lines, /*append=*/false);
}

}  // namespace zsc
