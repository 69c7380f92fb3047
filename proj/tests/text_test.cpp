// Copyright 2026 The scilist Authors
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

#include "scilist/text.hpp"

#include <string>
#include <vector>

#include "gtest/gtest.h"

namespace scilist::text {
namespace {

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  for (auto& t : tokenize(s)) out.push_back(t.folded);
  return out;
}

TEST(FoldCase, AsciiAndLatin) {
  EXPECT_EQ(fold_case("Evolutionary BIOLOGIST"), "evolutionary biologist");
  EXPECT_EQ(fold_case("ÉCOLOGISTE"), "écologiste");
  EXPECT_EQ(fold_case("ПСИХОЛОГ"), "психолог");
}

TEST(FoldCase, PreservesByteLength) {
  for (std::string s : {"Ünïcödé Ωmega", "ŁÓDŹ", "Ёж", "\xff\xfe broken"}) {
    EXPECT_EQ(fold_case(s).size(), s.size()) << s;
  }
}

TEST(Tokenize, BoundariesAndHyphens) {
  EXPECT_EQ(words("I am an evolutionary biologist."),
            (std::vector<std::string>{"i", "am", "an", "evolutionary", "biologist"}));
  EXPECT_EQ(words("post-doc @ MIT"), (std::vector<std::string>{"post", "doc", "mit"}));
  EXPECT_EQ(words("café—naïve"), (std::vector<std::string>{"café", "naïve"}));
  EXPECT_TRUE(words("").empty());
  EXPECT_TRUE(words(" ,;!? ").empty());
}

TEST(Tokenize, OffsetsPointIntoSource) {
  const std::string s = "  Ökologe, x2";
  auto toks = tokenize(s);
  ASSERT_EQ(toks.size(), 2u);
  EXPECT_EQ(s.substr(toks[0].begin, toks[0].end - toks[0].begin), "Ökologe");
  EXPECT_EQ(s.substr(toks[1].begin, toks[1].end - toks[1].begin), "x2");
}

TEST(PhraseIndex, LongestFirstSelection) {
  PhraseIndex<int> idx;
  idx.add("biologist", 1);
  idx.add("evolutionary biologist", 2);
  auto hits = idx.find("An Evolutionary   Biologist and a biologist");
  ASSERT_EQ(hits.size(), 2u);
  EXPECT_EQ(hits[0].payload, 2);
  EXPECT_EQ(hits[1].payload, 1);
}

TEST(PhraseIndex, HyphenGapIsLiteral) {
  PhraseIndex<int> idx;
  idx.add("post-doc", 1);
  idx.add("grad student", 2);
  EXPECT_EQ(idx.find("a post-doc here").size(), 1u);
  EXPECT_TRUE(idx.find("a post doc here").empty());
  EXPECT_TRUE(idx.find("a post--doc here").empty());
  // Whitespace gaps also accept hyphen separators.
  EXPECT_EQ(idx.find("grad-student").size(), 1u);
  EXPECT_EQ(idx.find("grad \t student").size(), 1u);
  EXPECT_TRUE(idx.find("grad, student").empty());
}

TEST(PhraseIndex, EmptyPhraseRejected) {
  PhraseIndex<int> idx;
  EXPECT_FALSE(idx.add("  --  ", 1));
  EXPECT_EQ(idx.size(), 0u);
  EXPECT_TRUE(idx.find("anything").empty());
}

}  // namespace
}  // namespace scilist::text
