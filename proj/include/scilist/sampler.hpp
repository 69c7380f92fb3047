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

// Seed selection from list-derived attribute records, list-based snowball
// sampling, and the profile-title post-filter.

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "scilist/error.hpp"
#include "scilist/lexicon.hpp"
#include "scilist/parallel.hpp"
#include "scilist/source.hpp"
#include "scilist/text.hpp"

namespace scilist {

struct Attribute {
  std::string word;
  double weight;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct AttributeRecord {
  std::string user_id;
  std::int64_t listed_count = 0;
  std::vector<Attribute> attributes;  // descending weight
};

// One JSON object per line:
//   {"user_id":"u1","listed_count":12,"attributes":[{"word":"science","weight":0.9},...]}
// Attributes are re-sorted by descending weight (stable); nonpositive
// weights are rejected.
inline AttributeRecord parse_attribute_record(const nlohmann::json& j) {
  AttributeRecord r;
  r.user_id = j.at("user_id").get<std::string>();
  r.listed_count = j.at("listed_count").get<std::int64_t>();
  for (const auto& a : j.at("attributes")) {
    Attribute attr{a.at("word").get<std::string>(), a.at("weight").get<double>()};
    if (!(attr.weight > 0)) {
      throw DataError("attribute '" + attr.word + "' of " + r.user_id + " has nonpositive weight");
    }
    r.attributes.push_back(std::move(attr));
  }
  std::stable_sort(r.attributes.begin(), r.attributes.end(),
                   [](const Attribute& a, const Attribute& b) { return a.weight > b.weight; });
  return r;
}

inline std::vector<AttributeRecord> read_attribute_records(std::istream& in) {
  std::vector<AttributeRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(parse_attribute_record(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("attribute record line " + std::to_string(lineno) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError("attribute record line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

inline constexpr std::int64_t kDefaultMinListed = 8;

// Users listed at least `min_listed` times whose leading `top_attrs`
// attributes contain the word "science" and at least one lexicon variant.
inline std::vector<std::string> select_seeds(const std::vector<AttributeRecord>& records,
                                             const TitleLexicon& lexicon,
                                             std::int64_t min_listed = kDefaultMinListed,
                                             std::size_t top_attrs = 10) {
  std::set<std::string> chosen;
  for (const auto& r : records) {
    if (r.listed_count < min_listed) continue;
    bool science = false;
    bool title = false;
    const std::size_t n = std::min(top_attrs, r.attributes.size());
    for (std::size_t i = 0; i < n; ++i) {
      const std::string w = text::fold_case(text::trim(r.attributes[i].word));
      science = science || w == "science";
      title = title || lexicon.find_variant(w) != nullptr;
    }
    if (science && title) chosen.insert(r.user_id);
  }
  return {chosen.begin(), chosen.end()};
}

// ---------------------------------------------------------------------------
// Snowball sampling

struct FrontierEntry {
  std::size_t step;         // BFS depth; seeds are 0
  std::string user_id;
  std::string origin_list;  // empty for seeds

  friend bool operator==(const FrontierEntry&, const FrontierEntry&) = default;
};

struct SampleEvent {
  std::string op;  // "memberships", "members", "profile"
  std::string id;
  FetchStatus status;

  friend bool operator==(const SampleEvent&, const SampleEvent&) = default;
};

struct SampleResult {
  std::set<std::string> visited;
  std::set<std::string> scientist_lists;
  std::set<std::string> candidates;
  std::set<std::string> self_identified;
  std::vector<FrontierEntry> frontier_log;
  std::vector<SampleEvent> events;
  bool complete = true;

  friend bool operator==(const SampleResult&, const SampleResult&) = default;
};

struct SnowballOptions {
  bool match_descriptions = false;  // also accept lists whose description has a title
  std::size_t workers = 1;
  // Persist progress every `checkpoint_every` dequeues (at level boundaries).
  std::optional<std::filesystem::path> checkpoint;
  std::size_t checkpoint_every = 0;
  bool resume = false;  // continue from `checkpoint` if it exists
  // Stop after the level during which this many users have been dequeued.
  std::optional<std::size_t> max_dequeues;
};

// Display names must contain an ASCII space after trimming.
inline bool name_has_space(const std::string& display_name) {
  return text::trim(display_name).find(' ') != std::string_view::npos;
}

inline bool is_scientist_list(const ListRecord& l, const TitleLexicon& lexicon,
                              bool match_descriptions) {
  if (!match_titles(l.name, lexicon).empty()) return true;
  return match_descriptions && !match_titles(l.description, lexicon).empty();
}

inline nlohmann::json to_json(const SampleResult& r) {
  nlohmann::json log = nlohmann::json::array();
  for (const auto& f : r.frontier_log) {
    log.push_back({{"step", f.step}, {"user_id", f.user_id}, {"origin_list", f.origin_list}});
  }
  nlohmann::json events = nlohmann::json::array();
  for (const auto& e : r.events) {
    events.push_back({{"op", e.op}, {"id", e.id}, {"status", to_string(e.status)}});
  }
  return {{"format", "scilist-sample"},
          {"version", 1},
          {"complete", r.complete},
          {"visited", r.visited},
          {"scientist_lists", r.scientist_lists},
          {"candidates", r.candidates},
          {"self_identified", r.self_identified},
          {"frontier_log", log},
          {"events", events}};
}

inline SampleResult sample_result_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "scilist-sample") throw DataError("not a sample result");
  SampleResult r;
  r.complete = j.at("complete").get<bool>();
  r.visited = j.at("visited").get<std::set<std::string>>();
  r.scientist_lists = j.at("scientist_lists").get<std::set<std::string>>();
  r.candidates = j.at("candidates").get<std::set<std::string>>();
  r.self_identified = j.at("self_identified").get<std::set<std::string>>();
  for (const auto& f : j.at("frontier_log")) {
    r.frontier_log.push_back({f.at("step").get<std::size_t>(), f.at("user_id").get<std::string>(),
                              f.at("origin_list").get<std::string>()});
  }
  for (const auto& e : j.at("events")) {
    const std::string s = e.at("status").get<std::string>();
    const FetchStatus st = s == "not_found" ? FetchStatus::NotFound
                           : s == "skipped" ? FetchStatus::Skipped
                                            : FetchStatus::Ok;
    r.events.push_back({e.at("op").get<std::string>(), e.at("id").get<std::string>(), st});
  }
  return r;
}

namespace sampler_detail {

struct Checkpoint {
  SampleResult result;
  std::vector<std::string> level;
  std::size_t depth = 0;
  std::size_t dequeued = 0;
};

inline void save_checkpoint(const Checkpoint& c, const std::filesystem::path& p) {
  nlohmann::json j = {{"result", to_json(c.result)},
                      {"level", c.level},
                      {"depth", c.depth},
                      {"dequeued", c.dequeued}};
  const auto tmp = std::filesystem::path(p.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint " + tmp.string());
    out << j.dump() << '\n';
  }
  std::filesystem::rename(tmp, p);
}

inline Checkpoint load_checkpoint(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open checkpoint " + p.string());
  const auto j = nlohmann::json::parse(in);
  Checkpoint c;
  c.result = sample_result_from_json(j.at("result"));
  c.level = j.at("level").get<std::vector<std::string>>();
  c.depth = j.at("depth").get<std::size_t>();
  c.dequeued = j.at("dequeued").get<std::size_t>();
  return c;
}

}  // namespace sampler_detail

// Breadth-first search over the user/list bipartite structure. Each level
// is fetched (optionally in parallel) and then merged in queue order, which
// yields exactly the FIFO order of a sequential crawl: members are enqueued
// in list order, lists in membership order, users in queue order.
inline SampleResult snowball(const std::vector<std::string>& seeds, Source& source,
                             const TitleLexicon& lexicon, const SnowballOptions& opts = {}) {
  using sampler_detail::Checkpoint;
  if (seeds.empty()) throw Error("snowball needs at least one seed");

  Checkpoint state;
  if (opts.resume && opts.checkpoint && std::filesystem::exists(*opts.checkpoint)) {
    state = sampler_detail::load_checkpoint(*opts.checkpoint);
  } else {
    for (const auto& s : seeds) {
      if (state.result.visited.insert(s).second) {
        state.level.push_back(s);
        state.result.frontier_log.push_back({0, s, ""});
      }
    }
  }
  SampleResult& result = state.result;
  std::size_t since_checkpoint = 0;

  while (!state.level.empty()) {
    const auto& level = state.level;
    std::vector<Fetched<std::vector<ListRecord>>> memberships(
        level.size(), Fetched<std::vector<ListRecord>>::not_found());
    parallel_for(level.size(), opts.workers,
                 [&](std::size_t i) { memberships[i] = source.fetch_memberships(level[i]); });

    std::vector<const ListRecord*> new_lists;
    std::set<std::string> seen_this_level;
    for (std::size_t i = 0; i < level.size(); ++i) {
      if (!memberships[i]) {
        result.events.push_back({"memberships", level[i], memberships[i].status()});
        continue;
      }
      for (const ListRecord& l : *memberships[i]) {
        if (result.scientist_lists.count(l.list_id) || !seen_this_level.insert(l.list_id).second) {
          continue;
        }
        if (is_scientist_list(l, lexicon, opts.match_descriptions)) new_lists.push_back(&l);
      }
    }

    std::vector<Fetched<std::vector<std::string>>> members(
        new_lists.size(), Fetched<std::vector<std::string>>::not_found());
    parallel_for(new_lists.size(), opts.workers, [&](std::size_t i) {
      members[i] = source.fetch_members(new_lists[i]->list_id);
    });

    std::vector<std::string> to_profile;
    {
      std::set<std::string> pending;
      for (const auto& m : members) {
        if (!m) continue;
        for (const auto& id : *m) {
          if (pending.insert(id).second) to_profile.push_back(id);
        }
      }
    }
    std::vector<Fetched<UserProfile>> profiles(to_profile.size(),
                                               Fetched<UserProfile>::not_found());
    parallel_for(to_profile.size(), opts.workers,
                 [&](std::size_t i) { profiles[i] = source.fetch_profile(to_profile[i]); });
    std::map<std::string, bool> spaced;
    for (std::size_t i = 0; i < to_profile.size(); ++i) {
      if (profiles[i]) {
        spaced[to_profile[i]] = name_has_space(profiles[i]->display_name);
      } else {
        spaced[to_profile[i]] = false;
        result.events.push_back({"profile", to_profile[i], profiles[i].status()});
      }
    }

    std::vector<std::string> next;
    for (std::size_t i = 0; i < new_lists.size(); ++i) {
      const std::string& list_id = new_lists[i]->list_id;
      if (!members[i]) {
        result.events.push_back({"members", list_id, members[i].status()});
        continue;
      }
      result.scientist_lists.insert(list_id);
      for (const auto& id : *members[i]) {
        if (!spaced.at(id)) continue;
        result.candidates.insert(id);
        if (result.visited.insert(id).second) {
          next.push_back(id);
          result.frontier_log.push_back({state.depth + 1, id, list_id});
        }
      }
    }

    state.dequeued += level.size();
    since_checkpoint += level.size();
    state.level = std::move(next);
    ++state.depth;

    const bool stop = opts.max_dequeues && state.dequeued >= *opts.max_dequeues &&
                      !state.level.empty();
    if (opts.checkpoint &&
        (stop || (opts.checkpoint_every > 0 && since_checkpoint >= opts.checkpoint_every))) {
      sampler_detail::save_checkpoint(state, *opts.checkpoint);
      since_checkpoint = 0;
    }
    if (stop) {
      result.complete = false;
      return result;
    }
  }
  result.complete = true;
  if (opts.checkpoint) sampler_detail::save_checkpoint(state, *opts.checkpoint);
  return result;
}

// Candidates whose own profile description contains a scientist title.
inline std::set<std::string> filter_self_identified(const SampleResult& result, Source& source,
                                                    const TitleLexicon& lexicon,
                                                    std::size_t workers = 1) {
  const std::vector<std::string> ids(result.candidates.begin(), result.candidates.end());
  std::vector<char> keep(ids.size(), 0);
  parallel_for(ids.size(), workers, [&](std::size_t i) {
    const auto p = source.fetch_profile(ids[i]);
    keep[i] = p && !match_titles(p->description, lexicon).empty();
  });
  std::set<std::string> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (keep[i]) out.insert(ids[i]);
  }
  return out;
}

}  // namespace scilist
