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

#include <gtest/gtest.h>

#include "support/test_support.hpp"
#include "zsc/error.hpp"

namespace zsc {
namespace {

using testing::TempDir;

EmbeddingStore basis_store(const std::vector<std::string>& keys, std::size_t dim) {
  EmbeddingStore store(dim);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    std::vector<float> v(dim, 0.0f);
    v[i % dim] = 1.0f;
    store.add(keys[i], v);
  }
  return store;
}

TEST(PromptExpand, GoldenExamples) {
  EXPECT_EQ(prompt_expand("outdoor cathedral"), "A photo of the outdoor of a cathedral");
  EXPECT_EQ(prompt_expand("outdoor apartment building"),
            "A photo of the outdoor of an apartment building");
  EXPECT_EQ(prompt_expand("bakery shop"), "A photo of a bakery shop");
}

TEST(PromptExpand, ArticlesAndIndoor) {
  EXPECT_EQ(prompt_expand("indoor museum"), "A photo of the indoor of a museum");
  EXPECT_EQ(prompt_expand("igloo"), "A photo of an igloo");
  EXPECT_EQ(prompt_expand("Ocean"), "A photo of an Ocean");
  EXPECT_EQ(prompt_expand("outdoor"), "A photo of an outdoor");
  EXPECT_EQ(prompt_expand("outdoorsy cafe"), "A photo of an outdoorsy cafe");
}

TEST(PromptExpand, RawIsIdentity) {
  for (const char* s : {"outdoor cathedral", "bar", "A b c"}) {
    EXPECT_EQ(prompt_expand(s, PromptTemplate::raw()), s);
  }
}

TEST(PromptExpand, Pattern) {
  const auto t = PromptTemplate::parse("a {label}, seen in New York: {label}");
  EXPECT_EQ(prompt_expand("bridge", t), "a bridge, seen in New York: bridge");
  EXPECT_THROW(PromptTemplate::parse("no placeholder"), Error);
}

TEST(PromptExpand, EmptyLabel) {
  try {
    prompt_expand("  ");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyLabel);
  }
}

TEST(Canonicalize, PlacesForms) {
  EXPECT_EQ(canonicalize_label("cathedral/outdoor"), "outdoor cathedral");
  EXPECT_EQ(canonicalize_label("/c/cathedral/outdoor"), "outdoor cathedral");
  EXPECT_EQ(canonicalize_label("apartment_building/outdoor"), "outdoor apartment building");
  EXPECT_EQ(canonicalize_label("bakery/shop"), "bakery shop");
  EXPECT_EQ(canonicalize_label("museum/indoor"), "indoor museum");
  EXPECT_EQ(canonicalize_label("  outdoor cathedral \r"), "outdoor cathedral");
}

TEST(LoadTaxonomy, TwoLabels) {
  TempDir dir;
  testing::spit(dir / "t.txt", "skyscraper\nbridge\n");
  const auto tax = load_taxonomy(dir / "t.txt");
  ASSERT_EQ(tax.size(), 2u);
  EXPECT_EQ(tax[0].raw_name, "skyscraper");
  EXPECT_EQ(tax[1].id, 1u);
  EXPECT_EQ(tax[1].prompt, "A photo of a bridge");
  EXPECT_FALSE(tax.embeddings_attached());
}

TEST(LoadTaxonomy, Errors) {
  TempDir dir;
  testing::spit(dir / "dup.txt", "bar\nskyscraper\nbar\n");
  testing::spit(dir / "empty.txt", "\n  \n");
  auto code_of = [](const std::filesystem::path& p) {
    try {
      load_taxonomy(p);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  EXPECT_EQ(code_of(dir / "dup.txt"), ErrorCode::kDuplicateLabel);
  EXPECT_EQ(code_of(dir / "empty.txt"), ErrorCode::kEmptyFile);
  EXPECT_EQ(code_of(dir / "missing.txt"), ErrorCode::kIoError);
}

TEST(LoadTaxonomy, Places205) {
  const auto tax = load_taxonomy(testing::fixture_path("places205.txt"));
  EXPECT_EQ(tax.size(), 205u);
  const auto cathedral = tax.find("outdoor cathedral");
  ASSERT_TRUE(cathedral);
  EXPECT_EQ(tax[*cathedral].prompt, "A photo of the outdoor of a cathedral");
  const auto bakery = tax.find("bakery shop");
  ASSERT_TRUE(bakery);
  EXPECT_EQ(tax[*bakery].prompt, "A photo of a bakery shop");
  EXPECT_EQ(tax[*tax.find("outdoor apartment building")].prompt,
            "A photo of the outdoor of an apartment building");
}

TEST(LoadTaxonomy, SaveReloadPreservesOrder) {
  TempDir dir;
  const auto tax = load_taxonomy(testing::fixture_path("places205.txt"));
  save_taxonomy(tax, dir / "saved.txt");
  const auto again = load_taxonomy(dir / "saved.txt");
  ASSERT_EQ(again.size(), tax.size());
  for (std::size_t i = 0; i < tax.size(); ++i) {
    EXPECT_EQ(again[i].raw_name, tax[i].raw_name);
    EXPECT_EQ(again[i].prompt, tax[i].prompt);
  }
}

TEST(AttachEmbeddings, ByRawNameOrPrompt) {
  const Taxonomy tax("t", {"skyscraper", "bridge"});
  const auto attached =
      attach_prompt_embeddings(tax, basis_store({"skyscraper", "A photo of a bridge"}, 4));
  EXPECT_EQ(attached.embedding_dim(), 4u);
  EXPECT_EQ(attached[1].prompt_embedding, (std::vector<float>{0, 1, 0, 0}));
  EXPECT_EQ(attached.prompt_matrix().size(), 8u);
  EXPECT_FALSE(tax.embeddings_attached());
}

TEST(AttachEmbeddings, MissingLabel) {
  const Taxonomy tax("t", {"skyscraper", "bridge"});
  try {
    attach_prompt_embeddings(tax, basis_store({"skyscraper"}, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingEmbedding);
    EXPECT_EQ(e.subject(), "bridge");
  }
}

TEST(AttachEmbeddings, MixedDimensions) {
  EmbeddingStore store(4);
  store.add("skyscraper", std::vector<float>{1, 0, 0, 0});
  try {
    store.add("bridge", std::vector<float>{1, 0, 0, 0, 0, 0, 0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
  const Taxonomy tax("t", {"skyscraper"});
  const auto attached = attach_prompt_embeddings(tax, store);
  try {
    attach_prompt_embeddings(attached, basis_store({"skyscraper"}, 8));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimensionMismatch);
  }
}

TEST(AttachEmbeddings, TemplateFrozenAfterAttach) {
  const Taxonomy tax("t", {"bridge"});
  auto attached = attach_prompt_embeddings(tax, basis_store({"bridge"}, 2));
  EXPECT_THROW(attached.apply_template(PromptTemplate::raw()), Error);
}

TEST(PromptDump, TabSeparated) {
  TempDir dir;
  const Taxonomy tax("t", {"outdoor cathedral", "bar"});
  write_prompt_dump(tax, dir / "p.tsv");
  EXPECT_EQ(testing::slurp(dir / "p.tsv"),
            "id\traw_name\tprompt\n0\toutdoor cathedral\tA photo of the outdoor of a cathedral\n"
            "1\tbar\tA photo of a bar\n");
}

}  // namespace
}  // namespace zsc
