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

#include "scilist/sampler.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "support/fixture_gen.hpp"
#include "support/temp_dir.hpp"

namespace scilist {
namespace {

using testing::small_lexicon;

AttributeRecord record(std::string id, std::int64_t listed, std::vector<std::string> words) {
  AttributeRecord r{std::move(id), listed, {}};
  double w = 1.0;
  for (auto& word : words) {
    r.attributes.push_back({word, w});
    w /= 2;
  }
  return r;
}

TEST(SelectSeeds, PaperCriteria) {
  const auto lex = small_lexicon();
  EXPECT_EQ(select_seeds({record("a", 12, {"science", "economist", "news"})}, lex),
            (std::vector<std::string>{"a"}));
  EXPECT_TRUE(select_seeds({record("b", 5, {"science", "physicist"})}, lex).empty());
  EXPECT_TRUE(select_seeds({record("c", 20, {"science", "music"})}, lex).empty());
  EXPECT_TRUE(select_seeds({}, lex).empty());
}

TEST(SelectSeeds, TopAttributesCapAndOrdering) {
  const auto lex = small_lexicon();
  std::vector<std::string> words = {"science"};
  for (int i = 0; i < 10; ++i) words.push_back("w" + std::to_string(i));
  words.push_back("economist");  // 12th attribute
  const auto r = record("z", 8, words);
  EXPECT_TRUE(select_seeds({r}, lex, 8, 10).empty());
  EXPECT_EQ(select_seeds({r}, lex, 8, 12).size(), 1u);
  EXPECT_EQ(select_seeds({record("y", 9, {"Science", "ECONOMISTS"}), record("x", 9, {"science", "physicist"})}, lex),
            (std::vector<std::string>{"x", "y"}));
}

TEST(AttributeRecords, ParseJsonLinesSortsByWeight) {
  std::istringstream in(
      R"({"user_id":"u1","listed_count":12,"attributes":[{"word":"news","weight":0.1},{"word":"science","weight":0.9}]})"
      "\n\n"
      R"({"user_id":"u2","listed_count":3,"attributes":[]})"
      "\n");
  auto recs = read_attribute_records(in);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].attributes[0].word, "science");
  std::istringstream bad(R"({"user_id":"u1","listed_count":1,"attributes":[{"word":"x","weight":0}]})");
  EXPECT_THROW(read_attribute_records(bad), DataError);
  std::istringstream garbage("{not json");
  EXPECT_THROW(read_attribute_records(garbage), DataError);
}

FixtureData traced_fixture() {
  FixtureData d;
  auto u = [](std::string id, std::string name, std::string bio = "") {
    UserProfile p;
    p.user_id = id;
    p.screen_name = id;
    p.display_name = name;
    p.description = bio;
    return p;
  };
  d.users = {u("u1", "Seed One", "Economist at LSE"), u("u2", "Ann Lee", "I love science news"),
             u("u3", "Bo Ray", ""), u("u4", "cooluser42", "economist"), u("u5", "Far Away")};
  d.lists = {{"Lecon", "economists", "", true, {"u1", "u2", "u3", "u4"}},
             {"Lfriends", "my friends", "", true, {"u2", "u5"}}};
  return d;
}

TEST(Snowball, HandTracedExample) {
  FixtureSource src(traced_fixture());
  auto r = snowball({"u1"}, src, small_lexicon());
  EXPECT_EQ(r.visited, (std::set<std::string>{"u1", "u2", "u3"}));
  EXPECT_EQ(r.scientist_lists, (std::set<std::string>{"Lecon"}));
  EXPECT_EQ(r.candidates, (std::set<std::string>{"u1", "u2", "u3"}));
  EXPECT_TRUE(r.complete);
  ASSERT_EQ(r.frontier_log.size(), 3u);
  EXPECT_EQ(r.frontier_log[0], (FrontierEntry{0, "u1", ""}));
  EXPECT_EQ(r.frontier_log[1], (FrontierEntry{1, "u2", "Lecon"}));
  EXPECT_EQ(r.frontier_log[2], (FrontierEntry{1, "u3", "Lecon"}));
}

TEST(Snowball, SeedWithoutScientistListsDoesNotExpand) {
  FixtureSource src(traced_fixture());
  auto r = snowball({"u5"}, src, small_lexicon());
  EXPECT_EQ(r.visited, (std::set<std::string>{"u5"}));
  EXPECT_TRUE(r.candidates.empty());
}

TEST(Snowball, EmptySeedsIsAnError) {
  FixtureSource src(traced_fixture());
  EXPECT_THROW(snowball({}, src, small_lexicon()), Error);
}

TEST(Snowball, UnknownAndPrivateSeedsAreLoggedNotFatal) {
  FixtureData d = traced_fixture();
  d.users[4].is_public = false;
  FixtureSource src(d);
  auto r = snowball({"ghost", "u5", "u1"}, src, small_lexicon());
  EXPECT_TRUE(r.visited.count("u2"));
  EXPECT_TRUE(std::count(r.events.begin(), r.events.end(),
                         SampleEvent{"memberships", "ghost", FetchStatus::NotFound}));
  EXPECT_TRUE(std::count(r.events.begin(), r.events.end(),
                         SampleEvent{"memberships", "u5", FetchStatus::Skipped}));
}

TEST(Snowball, DescriptionMatchingIsOptIn) {
  FixtureData d = traced_fixture();
  d.lists[1].description = "Physicists I like";
  FixtureSource src(d);
  SnowballOptions opts;
  EXPECT_FALSE(snowball({"u2"}, src, small_lexicon(), opts).scientist_lists.count("Lfriends"));
  opts.match_descriptions = true;
  EXPECT_TRUE(snowball({"u2"}, src, small_lexicon(), opts).scientist_lists.count("Lfriends"));
}

TEST(FilterSelfIdentified, ProfileTitlesOnly) {
  FixtureSource src(traced_fixture());
  const auto lex = small_lexicon();
  auto r = snowball({"u1"}, src, lex);
  // u1 "Economist at LSE" kept; u2 "I love science news" and u3 (empty) dropped.
  EXPECT_EQ(filter_self_identified(r, src, lex), (std::set<std::string>{"u1"}));
}

TEST(Snowball, MatchesClosureOracleOnRandomFixtures) {
  const auto lex = small_lexicon();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto g = testing::random_fixture(seed, 300, 80);
    FixtureSource src(g.data);
    std::vector<std::string> seeds = {"u0", "u7", "u42"};
    auto r = snowball(seeds, src, lex);
    auto o = testing::closure_oracle(g, seeds);
    EXPECT_EQ(r.visited, o.visited) << "seed " << seed;
    EXPECT_EQ(r.candidates, o.candidates) << "seed " << seed;
    EXPECT_EQ(r.scientist_lists, o.lists) << "seed " << seed;
  }
}

TEST(Snowball, Invariants) {
  const auto lex = small_lexicon();
  for (std::uint64_t seed = 20; seed < 26; ++seed) {
    auto g = testing::random_fixture(seed, 250, 70);
    FixtureSource src(g.data);
    std::vector<std::string> seeds = {"u1", "u2", "u3", "u4"};
    auto r = snowball(seeds, src, lex);
    r.self_identified = filter_self_identified(r, src, lex);

    std::set<std::string> logged;
    for (const auto& f : r.frontier_log) EXPECT_TRUE(logged.insert(f.user_id).second);
    EXPECT_EQ(logged, r.visited);
    EXPECT_TRUE(std::includes(r.visited.begin(), r.visited.end(), r.candidates.begin(),
                              r.candidates.end()));
    EXPECT_TRUE(std::includes(r.candidates.begin(), r.candidates.end(),
                              r.self_identified.begin(), r.self_identified.end()));
    for (const auto& c : r.candidates) {
      EXPECT_TRUE(name_has_space(src.fetch_profile(c)->display_name));
    }

    std::mt19937_64 rng(seed);
    auto shuffled = seeds;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto r2 = snowball(shuffled, src, lex);
    EXPECT_EQ(r2.visited, r.visited);
    EXPECT_EQ(r2.candidates, r.candidates);

    auto more = seeds;
    more.push_back("u99");
    auto r3 = snowball(more, src, lex);
    EXPECT_TRUE(std::includes(r3.visited.begin(), r3.visited.end(), r.visited.begin(),
                              r.visited.end()));
  }
}

TEST(Snowball, ParallelWorkersGiveIdenticalResult) {
  const auto lex = small_lexicon();
  auto g = testing::random_fixture(77, 500, 150);
  FixtureSource src(g.data);
  SnowballOptions seq;
  SnowballOptions par;
  par.workers = 4;
  EXPECT_EQ(snowball({"u5", "u6"}, src, lex, seq), snowball({"u5", "u6"}, src, lex, par));
}

TEST(Snowball, CheckpointResumeReproducesFullCrawl) {
  const auto lex = small_lexicon();
  auto g = testing::random_fixture(5, 400, 120);
  FixtureSource src(g.data);
  std::string seed;
  SampleResult full;
  for (const auto& u : g.data.users) {
    full = snowball({u.user_id}, src, lex);
    seed = u.user_id;
    if (full.frontier_log.back().step > 2) break;
  }
  ASSERT_GT(full.frontier_log.back().step, 2u);

  testing::TempDir dir;
  SnowballOptions opts;
  opts.checkpoint = dir.path() / "ckpt.json";
  opts.checkpoint_every = 10;
  opts.max_dequeues = 2;
  auto partial = snowball({seed}, src, lex, opts);
  EXPECT_FALSE(partial.complete);
  EXPECT_LT(partial.visited.size(), full.visited.size());

  opts.max_dequeues.reset();
  opts.resume = true;
  auto resumed = snowball({seed}, src, lex, opts);
  EXPECT_EQ(resumed, full);
}

TEST(SampleResultJson, RoundTrip) {
  FixtureSource src(traced_fixture());
  auto r = snowball({"u1", "ghost"}, src, small_lexicon());
  EXPECT_EQ(sample_result_from_json(nlohmann::json::parse(to_json(r).dump())), r);
}

}  // namespace
}  // namespace scilist
