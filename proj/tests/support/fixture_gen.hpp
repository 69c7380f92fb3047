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

#pragma once

// Test-only: random platform fixtures whose list names carry a ground-truth
// "contains a title" flag, and a brute-force closure oracle for the
// snowball crawl that never touches the sampler or the tagger.

#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "scilist/lexicon.hpp"
#include "scilist/source.hpp"

namespace scilist::testing {

inline TitleLexicon small_lexicon() {
  return compile_lexicon({{"economists", "19-3011", OesGroup::Social},
                          {"physicists", "19-2012", OesGroup::Physical},
                          {"marine biologists", "19-1023", OesGroup::Life}},
                         {{"historians", std::nullopt, OesGroup::Social}});
}

// Surface forms that the small lexicon recognizes.
inline const std::vector<std::string>& title_words() {
  static const std::vector<std::string> w = {"Economists", "physicist", "Marine Biologists",
                                             "biologist", "HISTORIANS", "Scientists"};
  return w;
}

// Words that never form a title, alone or next to each other.
inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> w = {"my", "favorite", "news", "friends", "cool",
                                             "people", "list", "tech", "2014", "follow"};
  return w;
}

struct GeneratedFixture {
  FixtureData data;
  std::map<std::string, bool> list_is_scientific;  // ground truth by construction
};

inline GeneratedFixture random_fixture(std::uint64_t seed, std::size_t n_users,
                                       std::size_t n_lists) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  auto chance = [&](int pct) { return static_cast<int>(rng() % 100) < pct; };
  GeneratedFixture g;
  for (std::size_t i = 0; i < n_users; ++i) {
    UserProfile u;
    u.user_id = "u" + std::to_string(i);
    u.screen_name = "user" + std::to_string(i);
    u.display_name = chance(80) ? "First" + std::to_string(i) + " Last" : "handle" + std::to_string(i);
    if (chance(5)) u.display_name = "  padded" + std::to_string(i) + "  ";
    u.is_public = !chance(8);
    u.listed_count = static_cast<std::int64_t>(pick(40));
    g.data.users.push_back(std::move(u));
  }
  for (std::size_t j = 0; j < n_lists; ++j) {
    ListRecord l;
    l.list_id = "L" + std::to_string(j);
    const bool sci = chance(45);
    std::string name = filler_words()[pick(filler_words().size())];
    if (sci) name += " " + title_words()[pick(title_words().size())];
    if (chance(50)) name += " " + filler_words()[pick(filler_words().size())];
    l.name = name;
    l.description = chance(30) ? "all about " + title_words()[pick(title_words().size())] : "";
    l.is_public = !chance(10);
    const std::size_t k = pick(std::min<std::size_t>(30, n_users) + 1);
    std::set<std::string> used;
    for (std::size_t m = 0; m < k; ++m) {
      std::string id = chance(3) ? "ghost" + std::to_string(pick(50))
                                 : "u" + std::to_string(pick(n_users));
      if (used.insert(id).second) l.member_ids.push_back(id);
    }
    g.list_is_scientific[l.list_id] = sci && l.is_public;
    g.data.lists.push_back(std::move(l));
  }
  return g;
}

struct ClosureOracle {
  std::set<std::string> visited;
  std::set<std::string> candidates;
  std::set<std::string> lists;
};

// Fixed point of: v in V, v public => every scientific public list holding v
// contributes its existing, public, space-named members to V.
inline ClosureOracle closure_oracle(const GeneratedFixture& g, const std::vector<std::string>& seeds) {
  std::map<std::string, const UserProfile*> users;
  for (const auto& u : g.data.users) users[u.user_id] = &u;
  auto eligible = [&](const std::string& id) {
    const auto it = users.find(id);
    if (it == users.end() || !it->second->is_public) return false;
    const std::string& n = it->second->display_name;
    const auto b = n.find_first_not_of(' ');
    const auto e = n.find_last_not_of(' ');
    return b != std::string::npos && n.substr(b, e - b + 1).find(' ') != std::string::npos;
  };
  ClosureOracle o;
  o.visited.insert(seeds.begin(), seeds.end());
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& l : g.data.lists) {
      if (!g.list_is_scientific.at(l.list_id)) continue;
      bool touched = false;
      for (const auto& m : l.member_ids) {
        const auto it = users.find(m);
        if (o.visited.count(m) && it != users.end() && it->second->is_public) touched = true;
      }
      if (!touched) continue;
      if (o.lists.insert(l.list_id).second) changed = true;
      for (const auto& m : l.member_ids) {
        if (!eligible(m)) continue;
        o.candidates.insert(m);
        if (o.visited.insert(m).second) changed = true;
      }
    }
  }
  return o;
}

}  // namespace scilist::testing
