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

#include "scilist/source.hpp"

#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "gtest/gtest.h"
#include "support/fixture_gen.hpp"
#include "support/temp_dir.hpp"

namespace scilist {
namespace {

UserProfile user(std::string id, std::string name, bool is_public = true) {
  UserProfile u;
  u.user_id = id;
  u.screen_name = id;
  u.display_name = std::move(name);
  u.is_public = is_public;
  return u;
}

Status tweet(const std::string& author, int i) {
  Status s;
  s.status_id = author + "-s" + std::to_string(i);
  s.author_id = author;
  s.text = "status " + std::to_string(i);
  return s;
}

FixtureData basic() {
  FixtureData d;
  d.users = {user("u1", "Ann Lee"), user("u2", "Bo Ray"), user("u3", "Cy Dee"),
             user("p1", "Private Person", false)};
  d.lists = {{"L2", "economists", "", true, {"u1", "u3"}},
             {"L1", "friends", "", true, {"u1", "u2"}},
             {"L3", "secret", "", false, {"u1"}},
             {"L4", "empty", "", true, {}},
             {"L5", "hidden economists", "", false, {"u2"}}};
  d.follows = {{"u1", "u2"}, {"u3", "u2"}, {"u2", "u1"}};
  for (int i = 0; i < 5; ++i) d.statuses["u1"].push_back(tweet("u1", i));
  return d;
}

TEST(FixtureSource, MembershipsSortedByListIdAndPublicOnly) {
  FixtureSource src(basic());
  auto lists = src.fetch_memberships("u1");
  ASSERT_TRUE(lists.ok());
  ASSERT_EQ(lists->size(), 2u);
  EXPECT_EQ((*lists)[0].list_id, "L1");
  EXPECT_EQ((*lists)[1].list_id, "L2");
  // u2 is in one private and one public list.
  auto u2 = src.fetch_memberships("u2");
  ASSERT_EQ(u2->size(), 1u);
  EXPECT_EQ((*u2)[0].list_id, "L1");
}

TEST(FixtureSource, ErrorSignals) {
  FixtureSource src(basic());
  EXPECT_EQ(src.fetch_memberships("uX").status(), FetchStatus::NotFound);
  EXPECT_EQ(src.fetch_memberships("p1").status(), FetchStatus::Skipped);
  EXPECT_EQ(src.fetch_members("L3").status(), FetchStatus::Skipped);
  EXPECT_EQ(src.fetch_members("nope").status(), FetchStatus::NotFound);
  EXPECT_EQ(src.fetch_profile("p1").status(), FetchStatus::Skipped);
  EXPECT_EQ(src.fetch_user_bundle("p1").status(), FetchStatus::Skipped);
  EXPECT_THROW(src.fetch_profile("uX").value(), Error);
}

TEST(FixtureSource, MembersReadback) {
  FixtureSource src(basic());
  EXPECT_EQ(*src.fetch_members("L2"), (std::vector<std::string>{"u1", "u3"}));
  EXPECT_TRUE(src.fetch_members("L4")->empty());
}

TEST(FixtureSource, PaginationStitchesPagesInOrder) {
  FixtureData d;
  ListRecord big{"BIG", "physicists", "", true, {}};
  for (int i = 0; i < 250; ++i) {
    d.users.push_back(user("m" + std::to_string(i), "M " + std::to_string(i)));
    big.member_ids.push_back("m" + std::to_string(i));
  }
  d.lists.push_back(big);
  FixtureSource src(std::move(d), {.page_size = 100});
  const auto before = src.calls();
  auto members = src.fetch_members("BIG");
  EXPECT_EQ(*members, big.member_ids);
  EXPECT_EQ(src.calls() - before, 3u);
}

TEST(FixtureSource, BundleTruncatesToMostRecent) {
  FixtureData d = basic();
  for (int i = 0; i < 4000; ++i) d.statuses["u2"].push_back(tweet("u2", i));
  FixtureSource src(std::move(d));
  auto b1 = src.fetch_user_bundle("u1");
  EXPECT_EQ(b1->statuses.size(), 5u);
  auto b2 = src.fetch_user_bundle("u2");
  ASSERT_EQ(b2->statuses.size(), 3200u);
  EXPECT_EQ(b2->statuses.front().status_id, "u2-s0");
  EXPECT_EQ(b2->statuses.back().status_id, "u2-s3199");
  EXPECT_EQ(b2->followers, (std::vector<std::string>{"u1", "u3"}));
  EXPECT_EQ(b2->followings, (std::vector<std::string>{"u1"}));
  EXPECT_EQ(src.fetch_user_bundle("u1", 2)->statuses.size(), 2u);
}

TEST(FixtureSource, RejectsInvalidFixtures) {
  FixtureData dup = basic();
  dup.users.push_back(user("u1", "Again"));
  EXPECT_THROW(FixtureSource{dup}, DataError);

  FixtureData dup_member = basic();
  dup_member.lists[0].member_ids.push_back("u1");
  EXPECT_THROW(FixtureSource{dup_member}, DataError);

  FixtureData bad_rt = basic();
  bad_rt.statuses["u1"][0].kind = StatusKind::Retweet;
  EXPECT_THROW(FixtureSource{bad_rt}, DataError);

  FixtureData neg = basic();
  neg.users[0].listed_count = -1;
  EXPECT_THROW(FixtureSource{neg}, DataError);
}

TEST(FixtureSource, SaveLoadAndReplayAreByteIdentical) {
  testing::TempDir dir;
  auto g = testing::random_fixture(3, 60, 15);
  g.data.statuses["u0"] = {tweet("u0", 1)};
  Status rt = tweet("u0", 2);
  rt.kind = StatusKind::Retweet;
  rt.original = OriginalStatus{"u1", "x", {"http://nature.com/a"}};
  g.data.statuses["u0"].push_back(rt);
  save_fixture(g.data, dir.path());

  auto run = [&] {
    FixtureSource src(dir.path());
    nlohmann::json out = nlohmann::json::array();
    for (const auto& u : g.data.users) {
      auto m = src.fetch_memberships(u.user_id);
      out.push_back(m ? nlohmann::json(*m) : nlohmann::json(to_string(m.status())));
      auto b = src.fetch_user_bundle(u.user_id);
      out.push_back(b ? nlohmann::json(*b) : nlohmann::json(to_string(b.status())));
    }
    return out.dump();
  };
  EXPECT_EQ(run(), run());
  EXPECT_EQ(load_fixture(dir.path()).statuses.at("u0")[1], rt);
}

TEST(FixtureSource, PrivacyNeverLeaks) {
  auto g = testing::random_fixture(11, 200, 60);
  FixtureSource src(g.data);
  for (const auto& u : g.data.users) {
    if (auto lists = src.fetch_memberships(u.user_id)) {
      for (const auto& l : *lists) EXPECT_TRUE(l.is_public);
    }
    if (auto p = src.fetch_profile(u.user_id)) {
      EXPECT_TRUE(p->is_public);
    }
  }
}

TEST(RateLimiter, SlidingWindowNeverExceedsBudget) {
  VirtualClock clock;
  RateLimiter limiter(clock, {{Endpoint::Members, {60, 5}}});
  for (int i = 0; i < 23; ++i) {
    limiter.acquire(Endpoint::Members);
    if (i % 4 == 0) clock.advance(7.5);
  }
  const auto h = limiter.history(Endpoint::Members);
  ASSERT_EQ(h.size(), 23u);
  for (std::size_t i = 0; i < h.size(); ++i) {
    std::size_t in_window = 0;
    for (double t : h) in_window += (t >= h[i] && t < h[i] + 60.0);
    EXPECT_LE(in_window, 5u) << "window starting at " << h[i];
  }
  // Blocking shows up as virtual latency only.
  EXPECT_GT(clock.now(), 60.0 * 3);
}

TEST(RateLimiter, UnconfiguredEndpointIsFree) {
  VirtualClock clock;
  RateLimiter limiter(clock, {{Endpoint::Members, {60, 1}}});
  for (int i = 0; i < 100; ++i) limiter.acquire(Endpoint::Users);
  EXPECT_EQ(clock.now(), 0.0);
  EXPECT_THROW(RateLimiter(clock, {{Endpoint::Users, {0, 1}}}), Error);
}

TEST(RateLimiter, ConcurrentCallersShareOneBudget) {
  VirtualClock clock;
  RateLimiter limiter(clock, {{Endpoint::Members, {900, 15}}});
  FixtureData d = basic();
  FixtureSource src(d, {.page_size = 1, .limiter = &limiter});
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 20; ++i) EXPECT_TRUE(src.fetch_members("L2").ok());
    });
  }
  for (auto& t : threads) t.join();
  auto h = limiter.history(Endpoint::Members);
  ASSERT_EQ(h.size(), 4u * 20u * 2u);
  std::sort(h.begin(), h.end());
  for (std::size_t i = 0; i + 15 < h.size(); ++i) EXPECT_GE(h[i + 15] - h[i], 900.0);
}

}  // namespace
}  // namespace scilist
