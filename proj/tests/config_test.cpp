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

#include "scilist/config.hpp"

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "support/temp_dir.hpp"

namespace scilist {
namespace {

const std::filesystem::path kDemo = std::filesystem::path(SCILIST_CONFIG_DIR) / "demo.ini";
const std::set<Stage> kAll(std::begin(kStages), std::end(kStages));

bool mentions(const std::vector<std::string>& v, const std::string& needle) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

TEST(PipelineConfig, ShippedDemoConfigIsValid) {
  const auto c = PipelineConfig::from_ini(kDemo);
  EXPECT_TRUE(c.violations(kAll).empty());
  EXPECT_EQ(c.real("network.damping"), 0.85);
  EXPECT_EQ(c.integer("communities.trials"), 10);
  EXPECT_FALSE(c.boolean("urls.dedupe"));
  EXPECT_TRUE(std::filesystem::exists(c.path("lexicon.path")));
}

TEST(PipelineConfig, EverySettingIsDocumentedInTheDemoConfig) {
  const auto c = PipelineConfig::from_ini(kDemo);
  std::ifstream in(kDemo);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  for (const auto& s : settings()) {
    EXPECT_NE(text.find("--" + s.flag), std::string::npos) << s.key;
  }
}

TEST(PipelineConfig, RelativePathsResolveAgainstTheFile) {
  testing::TempDir dir;
  std::filesystem::create_directories(dir.path() / "sub");
  std::ofstream(dir.path() / "sub" / "lex.tsv") << "x\n";
  std::ofstream(dir.path() / "sub" / "c.ini") << "[lexicon]\npath = lex.tsv\n";
  const auto c = PipelineConfig::from_ini(dir.path() / "sub" / "c.ini");
  EXPECT_EQ(c.path("lexicon.path"), (dir.path() / "sub" / "lex.tsv").lexically_normal());
}

TEST(PipelineConfig, UnknownKeysAreRejected) {
  testing::TempDir dir;
  std::ofstream(dir.path() / "c.ini") << "[network]\ndamping = 0.85\ndampening = 0.9\n[extra]\nx = 1\n";
  try {
    PipelineConfig::from_ini(dir.path() / "c.ini");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.violations().size(), 2u);
    EXPECT_TRUE(mentions(e.violations(), "network.dampening"));
    EXPECT_TRUE(mentions(e.violations(), "extra.x"));
  }
}

TEST(PipelineConfig, ValidationListsEveryViolation) {
  auto c = PipelineConfig::from_ini(kDemo);
  c.set("network.damping", "1.0");
  c.set("urls.bins", "0");
  c.set("classify.confidence", "abc");
  c.set("network.kcore", "sideways");
  c.set("urls.dedupe", "maybe");
  c.set("lexicon.path", "/no/such/lexicon.tsv");
  c.set("source.rest", "/no/such/rest.json");
  c.set("run.workers", "0");
  const auto v = c.violations(kAll);
  EXPECT_TRUE(mentions(v, "network.damping"));
  EXPECT_TRUE(mentions(v, "urls.bins"));
  EXPECT_TRUE(mentions(v, "classify.confidence"));
  EXPECT_TRUE(mentions(v, "network.kcore"));
  EXPECT_TRUE(mentions(v, "urls.dedupe"));
  EXPECT_TRUE(mentions(v, "lexicon.path"));
  EXPECT_TRUE(mentions(v, "source.rest"));
  EXPECT_TRUE(mentions(v, "exactly one of"));
  EXPECT_TRUE(mentions(v, "run.workers"));
  EXPECT_EQ(v.size(), 9u);
  try {
    c.validate(kAll);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.violations(), v);
  }
}

TEST(PipelineConfig, MissingRequiredSettingsAreNamedWithTheirFlags) {
  PipelineConfig c;
  const auto v = c.violations({Stage::Networks});
  EXPECT_TRUE(mentions(v, "'network.damping' (--damping)"));
  EXPECT_TRUE(mentions(v, "'output.dir' (--out)"));
  EXPECT_FALSE(mentions(v, "lexicon.path"));
  EXPECT_FALSE(mentions(v, "run.workers"));
}

TEST(PipelineConfig, ValidationIsScopedToTheStagesRun) {
  auto c = PipelineConfig::from_ini(kDemo);
  c.set("urls.bins", "0");
  EXPECT_TRUE(c.violations({Stage::Networks}).empty());
  EXPECT_FALSE(c.violations({Stage::Urls}).empty());
}

TEST(PipelineConfig, OpenAndClosedRangeBounds) {
  auto c = PipelineConfig::from_ini(kDemo);
  c.set("classify.confidence", "100");
  c.set("network.damping", "0.999");
  EXPECT_TRUE(c.violations(kAll).empty());
  c.set("network.damping", "0");
  EXPECT_EQ(c.violations(kAll).size(), 1u);
}

TEST(PipelineConfig, ResolverFixtureRequiresMap) {
  auto c = PipelineConfig::from_ini(kDemo);
  c.set("urls.resolver_fixture", "");
  EXPECT_TRUE(mentions(c.violations({Stage::Urls}), "urls.resolver_fixture"));
  c.set("urls.resolver", "none");
  EXPECT_TRUE(c.violations({Stage::Urls}).empty());
}

TEST(PipelineConfig, CanonicalFormTracksSettingsButNotOutputDir) {
  auto a = PipelineConfig::from_ini(kDemo);
  auto b = a;
  b.set("output.dir", "/elsewhere");
  EXPECT_EQ(a.canonical(), b.canonical());
  for (const auto& s : settings()) {
    if (s.key == "output.dir") continue;
    auto c = a;
    c.set(s.key, "changed-value");
    EXPECT_NE(a.canonical(), c.canonical()) << s.key;
  }
}

TEST(PipelineConfig, Parsers) {
  EXPECT_EQ(PipelineConfig::parse_int("42"), 42);
  EXPECT_FALSE(PipelineConfig::parse_int("4.2"));
  EXPECT_FALSE(PipelineConfig::parse_int(""));
  EXPECT_EQ(PipelineConfig::parse_real("1e-9"), 1e-9);
  EXPECT_FALSE(PipelineConfig::parse_real("inf"));
  EXPECT_FALSE(PipelineConfig::parse_real("0.5x"));
  EXPECT_EQ(PipelineConfig::parse_bool("on"), true);
  EXPECT_EQ(PipelineConfig::parse_bool("0"), false);
  EXPECT_FALSE(PipelineConfig::parse_bool("2"));
}

}  // namespace
}  // namespace scilist
