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

// Access to the social platform: lists, memberships, profiles, follow edges
// and statuses. `Source` is the interface the pipeline talks to;
// `FixtureSource` replays a directory of JSON files.

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "scilist/error.hpp"

namespace scilist {

struct UserProfile {
  std::string user_id;
  std::string screen_name;
  std::string display_name;
  std::string description;
  std::optional<std::string> profile_image_url;
  bool is_public = true;
  std::int64_t listed_count = 0;

  friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

struct ListRecord {
  std::string list_id;
  std::string name;
  std::string description;
  bool is_public = true;
  std::vector<std::string> member_ids;

  friend bool operator==(const ListRecord&, const ListRecord&) = default;
};

enum class StatusKind { Tweet, Retweet, Reply };

struct OriginalStatus {
  std::string author_id;
  std::string status_id;
  std::vector<std::string> urls;

  friend bool operator==(const OriginalStatus&, const OriginalStatus&) = default;
};

struct Status {
  std::string status_id;
  std::string author_id;
  StatusKind kind = StatusKind::Tweet;
  std::string text;
  std::vector<std::string> urls;
  std::optional<OriginalStatus> original;  // present iff kind == Retweet

  friend bool operator==(const Status&, const Status&) = default;
};

struct UserBundle {
  UserProfile profile;
  std::vector<std::string> followers;
  std::vector<std::string> followings;
  std::vector<Status> statuses;  // newest first

  friend bool operator==(const UserBundle&, const UserBundle&) = default;
};

inline constexpr std::size_t kDefaultMaxStatuses = 3200;

// ---------------------------------------------------------------------------
// Fetch outcomes

enum class FetchStatus {
  Ok,
  NotFound,  // entity does not exist
  Skipped,   // entity exists but is private; callers continue without it
};

inline std::string_view to_string(FetchStatus s) {
  switch (s) {
    case FetchStatus::Ok: return "ok";
    case FetchStatus::NotFound: return "not_found";
    case FetchStatus::Skipped: return "skipped";
  }
  return "?";
}

template <class T>
class Fetched {
 public:
  Fetched(T value) : status_(FetchStatus::Ok), value_(std::move(value)) {}  // NOLINT
  static Fetched not_found() { return Fetched(FetchStatus::NotFound); }
  static Fetched skipped() { return Fetched(FetchStatus::Skipped); }

  FetchStatus status() const { return status_; }
  bool ok() const { return status_ == FetchStatus::Ok; }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    if (!value_) throw Error("fetch result is " + std::string(to_string(status_)));
    return *value_;
  }
  T&& value() && {
    if (!value_) throw Error("fetch result is " + std::string(to_string(status_)));
    return std::move(*value_);
  }
  const T& operator*() const& { return value(); }
  const T* operator->() const { return &value(); }

  friend bool operator==(const Fetched&, const Fetched&) = default;

 private:
  explicit Fetched(FetchStatus s) : status_(s) {}
  FetchStatus status_;
  std::optional<T> value_;
};

// ---------------------------------------------------------------------------
// Clocks and rate limiting

class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() const = 0;  // seconds
  virtual void sleep_until(double t) = 0;
};

class SteadyClock final : public Clock {
 public:
  double now() const override {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
  void sleep_until(double t) override {
    const double dt = t - now();
    if (dt > 0) std::this_thread::sleep_for(std::chrono::duration<double>(dt));
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Time only moves when someone sleeps; tests never block.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(double start = 0.0) : now_(start) {}
  double now() const override {
    std::lock_guard lock(mu_);
    return now_;
  }
  void sleep_until(double t) override {
    std::lock_guard lock(mu_);
    now_ = std::max(now_, t);
  }
  void advance(double dt) {
    std::lock_guard lock(mu_);
    now_ += dt;
  }

 private:
  mutable std::mutex mu_;
  double now_;
};

enum class Endpoint { Memberships, Members, Users, Followers, Followings, Statuses };

inline std::string_view to_string(Endpoint e) {
  switch (e) {
    case Endpoint::Memberships: return "memberships";
    case Endpoint::Members: return "members";
    case Endpoint::Users: return "users";
    case Endpoint::Followers: return "followers";
    case Endpoint::Followings: return "followings";
    case Endpoint::Statuses: return "statuses";
  }
  return "?";
}

struct RateBudget {
  std::int64_t window_seconds = 900;
  std::int64_t max_calls_per_window = 15;
};

// Sliding-window limiter: within any half-open window of `window_seconds`
// at most `max_calls_per_window` calls are admitted per endpoint. A call
// over budget blocks on the clock until the oldest call leaves the window.
class RateLimiter {
 public:
  RateLimiter(Clock& clock, std::map<Endpoint, RateBudget> budgets) : clock_(clock) {
    for (auto& [e, b] : budgets) {
      if (b.window_seconds <= 0 || b.max_calls_per_window <= 0) {
        throw Error("rate budget for " + std::string(to_string(e)) + " must be positive");
      }
      lanes_.emplace(e, std::make_unique<Lane>(b));
    }
  }

  // Returns the admission time.
  double acquire(Endpoint e) {
    const auto it = lanes_.find(e);
    if (it == lanes_.end()) return clock_.now();
    Lane& lane = *it->second;
    std::lock_guard lock(lane.mu);
    const auto window = static_cast<double>(lane.budget.window_seconds);
    const auto cap = static_cast<std::size_t>(lane.budget.max_calls_per_window);
    double t = clock_.now();
    while (true) {
      while (!lane.admitted.empty() && lane.admitted.front() <= t - window) {
        lane.admitted.pop_front();
      }
      if (lane.admitted.size() < cap) break;
      clock_.sleep_until(lane.admitted.front() + window);
      t = clock_.now();
    }
    lane.admitted.push_back(t);
    lane.history.push_back(t);
    return t;
  }

  std::vector<double> history(Endpoint e) const {
    const auto it = lanes_.find(e);
    if (it == lanes_.end()) return {};
    std::lock_guard lock(it->second->mu);
    return it->second->history;
  }

 private:
  struct Lane {
    explicit Lane(RateBudget b) : budget(b) {}
    RateBudget budget;
    std::mutex mu;
    std::deque<double> admitted;
    std::vector<double> history;
  };
  Clock& clock_;
  std::map<Endpoint, std::unique_ptr<Lane>> lanes_;
};

// ---------------------------------------------------------------------------
// Source interface

class Source {
 public:
  virtual ~Source() = default;

  // Public lists containing the user, ordered by list_id.
  virtual Fetched<std::vector<ListRecord>> fetch_memberships(const std::string& user_id) = 0;
  virtual Fetched<std::vector<std::string>> fetch_members(const std::string& list_id) = 0;
  virtual Fetched<UserProfile> fetch_profile(const std::string& user_id) = 0;
  virtual Fetched<UserBundle> fetch_user_bundle(const std::string& user_id,
                                                std::size_t max_statuses = kDefaultMaxStatuses) = 0;
};

// ---------------------------------------------------------------------------
// Fixture data and JSON schema (version 1)
//
//   users.json              {"version":1,"users":[UserProfile...]}
//   lists.json              {"version":1,"lists":[ListRecord...]}
//   edges.json              {"version":1,"follows":[{"follower":..,"followee":..}...]}
//   statuses/<user_id>.json {"version":1,"statuses":[Status...]}  newest first

inline constexpr int kFixtureVersion = 1;

struct FollowEdge {
  std::string follower;
  std::string followee;

  friend bool operator==(const FollowEdge&, const FollowEdge&) = default;
};

struct FixtureData {
  std::vector<UserProfile> users;
  std::vector<ListRecord> lists;
  std::vector<FollowEdge> follows;
  std::map<std::string, std::vector<Status>> statuses;  // by author
};

inline std::string_view to_string(StatusKind k) {
  switch (k) {
    case StatusKind::Tweet: return "Tweet";
    case StatusKind::Retweet: return "Retweet";
    case StatusKind::Reply: return "Reply";
  }
  return "Tweet";
}

inline StatusKind parse_status_kind(const std::string& s) {
  if (s == "Tweet") return StatusKind::Tweet;
  if (s == "Retweet") return StatusKind::Retweet;
  if (s == "Reply") return StatusKind::Reply;
  throw DataError("unknown status kind '" + s + "'");
}

inline void to_json(nlohmann::json& j, const UserProfile& u) {
  j = {{"user_id", u.user_id},
       {"screen_name", u.screen_name},
       {"display_name", u.display_name},
       {"description", u.description},
       {"profile_image_url",
        u.profile_image_url ? nlohmann::json(*u.profile_image_url) : nlohmann::json()},
       {"is_public", u.is_public},
       {"listed_count", u.listed_count}};
}

inline void from_json(const nlohmann::json& j, UserProfile& u) {
  u.user_id = j.at("user_id").get<std::string>();
  u.screen_name = j.value("screen_name", "");
  u.display_name = j.value("display_name", "");
  u.description = j.value("description", "");
  u.profile_image_url.reset();
  if (j.contains("profile_image_url") && !j["profile_image_url"].is_null()) {
    u.profile_image_url = j["profile_image_url"].get<std::string>();
  }
  u.is_public = j.value("is_public", true);
  u.listed_count = j.value("listed_count", std::int64_t{0});
}

inline void to_json(nlohmann::json& j, const ListRecord& l) {
  j = {{"list_id", l.list_id},
       {"name", l.name},
       {"description", l.description},
       {"is_public", l.is_public},
       {"member_ids", l.member_ids}};
}

inline void from_json(const nlohmann::json& j, ListRecord& l) {
  l.list_id = j.at("list_id").get<std::string>();
  l.name = j.value("name", "");
  l.description = j.value("description", "");
  l.is_public = j.value("is_public", true);
  l.member_ids = j.value("member_ids", std::vector<std::string>{});
}

inline void to_json(nlohmann::json& j, const Status& s) {
  j = {{"status_id", s.status_id},
       {"author_id", s.author_id},
       {"kind", to_string(s.kind)},
       {"text", s.text},
       {"urls", s.urls}};
  if (s.original) {
    j["original"] = {{"author_id", s.original->author_id},
                     {"status_id", s.original->status_id},
                     {"urls", s.original->urls}};
  } else {
    j["original"] = nullptr;
  }
}

inline void from_json(const nlohmann::json& j, Status& s) {
  s.status_id = j.at("status_id").get<std::string>();
  s.author_id = j.at("author_id").get<std::string>();
  s.kind = parse_status_kind(j.value("kind", "Tweet"));
  s.text = j.value("text", "");
  s.urls = j.value("urls", std::vector<std::string>{});
  s.original.reset();
  if (j.contains("original") && !j["original"].is_null()) {
    const auto& o = j["original"];
    s.original = OriginalStatus{o.at("author_id").get<std::string>(),
                                o.at("status_id").get<std::string>(),
                                o.value("urls", std::vector<std::string>{})};
  }
}

inline void to_json(nlohmann::json& j, const UserBundle& b) {
  j = {{"profile", b.profile},
       {"followers", b.followers},
       {"followings", b.followings},
       {"statuses", b.statuses}};
}

inline void from_json(const nlohmann::json& j, UserBundle& b) {
  b.profile = j.at("profile").get<UserProfile>();
  b.followers = j.at("followers").get<std::vector<std::string>>();
  b.followings = j.at("followings").get<std::vector<std::string>>();
  b.statuses = j.at("statuses").get<std::vector<Status>>();
}

// Checks the fixture invariants; throws DataError on the first violation.
inline void validate_fixture(const FixtureData& d) {
  std::set<std::string> ids;
  for (const auto& u : d.users) {
    if (u.user_id.empty()) throw DataError("user with empty user_id");
    if (!ids.insert(u.user_id).second) throw DataError("duplicate user_id " + u.user_id);
    if (u.listed_count < 0) throw DataError("negative listed_count for " + u.user_id);
  }
  std::set<std::string> list_ids;
  for (const auto& l : d.lists) {
    if (!list_ids.insert(l.list_id).second) throw DataError("duplicate list_id " + l.list_id);
    std::set<std::string> members(l.member_ids.begin(), l.member_ids.end());
    if (members.size() != l.member_ids.size()) {
      throw DataError("duplicate member in list " + l.list_id);
    }
  }
  for (const auto& [author, sts] : d.statuses) {
    for (const auto& s : sts) {
      if ((s.kind == StatusKind::Retweet) != s.original.has_value()) {
        throw DataError("status " + s.status_id + ": original must be present iff Retweet");
      }
      if (s.author_id != author) {
        throw DataError("status " + s.status_id + " filed under " + author);
      }
    }
  }
}

namespace fixture_detail {

inline nlohmann::json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("cannot open " + p.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(p.string() + ": " + e.what());
  }
}

inline void check_version(const nlohmann::json& j, const std::filesystem::path& p) {
  if (j.value("version", 0) != kFixtureVersion) {
    throw DataError(p.string() + ": unsupported fixture version");
  }
}

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DataError("cannot write " + p.string());
  out << j.dump(2) << '\n';
}

}  // namespace fixture_detail

inline FixtureData load_fixture(const std::filesystem::path& dir) {
  using namespace fixture_detail;
  FixtureData d;
  try {
    auto users = read_json(dir / "users.json");
    check_version(users, dir / "users.json");
    d.users = users.at("users").get<std::vector<UserProfile>>();
    auto lists = read_json(dir / "lists.json");
    check_version(lists, dir / "lists.json");
    d.lists = lists.at("lists").get<std::vector<ListRecord>>();
    if (std::filesystem::exists(dir / "edges.json")) {
      auto edges = read_json(dir / "edges.json");
      check_version(edges, dir / "edges.json");
      for (const auto& e : edges.at("follows")) {
        d.follows.push_back({e.at("follower").get<std::string>(),
                             e.at("followee").get<std::string>()});
      }
    }
    for (const auto& u : d.users) {
      const auto p = dir / "statuses" / (u.user_id + ".json");
      if (!std::filesystem::exists(p)) continue;
      auto sts = read_json(p);
      check_version(sts, p);
      d.statuses[u.user_id] = sts.at("statuses").get<std::vector<Status>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("fixture " + dir.string() + ": " + e.what());
  }
  validate_fixture(d);
  return d;
}

inline void save_fixture(const FixtureData& d, const std::filesystem::path& dir) {
  using namespace fixture_detail;
  validate_fixture(d);
  std::filesystem::create_directories(dir / "statuses");
  write_json(dir / "users.json", {{"version", kFixtureVersion}, {"users", d.users}});
  write_json(dir / "lists.json", {{"version", kFixtureVersion}, {"lists", d.lists}});
  nlohmann::json follows = nlohmann::json::array();
  for (const auto& e : d.follows) {
    follows.push_back({{"follower", e.follower}, {"followee", e.followee}});
  }
  write_json(dir / "edges.json", {{"version", kFixtureVersion}, {"follows", follows}});
  for (const auto& [author, sts] : d.statuses) {
    write_json(dir / "statuses" / (author + ".json"),
               {{"version", kFixtureVersion}, {"statuses", sts}});
  }
}

struct FixtureOptions {
  std::size_t page_size = 100;  // items per simulated API page
  RateLimiter* limiter = nullptr;
};

// Replays FixtureData. Data is immutable after construction, so concurrent
// calls are safe; the only shared mutable state is the limiter and the call
// counter, both synchronized.
class FixtureSource final : public Source {
 public:
  explicit FixtureSource(FixtureData data, FixtureOptions opts = {})
      : data_(std::move(data)), opts_(opts) {
    validate_fixture(data_);
    if (opts_.page_size == 0) throw Error("page_size must be positive");
    for (std::size_t i = 0; i < data_.users.size(); ++i) users_[data_.users[i].user_id] = i;
    for (std::size_t i = 0; i < data_.lists.size(); ++i) {
      const ListRecord& l = data_.lists[i];
      lists_[l.list_id] = i;
      for (const auto& m : l.member_ids) memberships_[m].push_back(i);
    }
    for (auto& [user, idx] : memberships_) {
      std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return data_.lists[a].list_id < data_.lists[b].list_id;
      });
    }
    for (const auto& e : data_.follows) {
      followers_[e.followee].push_back(e.follower);
      followings_[e.follower].push_back(e.followee);
    }
  }

  explicit FixtureSource(const std::filesystem::path& dir, FixtureOptions opts = {})
      : FixtureSource(load_fixture(dir), opts) {}

  Fetched<std::vector<ListRecord>> fetch_memberships(const std::string& user_id) override {
    const UserProfile* u = user(user_id);
    if (!u) return Fetched<std::vector<ListRecord>>::not_found();
    if (!u->is_public) return Fetched<std::vector<ListRecord>>::skipped();
    std::vector<ListRecord> out;
    const auto it = memberships_.find(user_id);
    const std::size_t total = it == memberships_.end() ? 0 : it->second.size();
    for_each_page(Endpoint::Memberships, total, [&](std::size_t i) {
      const ListRecord& l = data_.lists[it->second[i]];
      if (l.is_public) out.push_back(l);
    });
    return out;
  }

  Fetched<std::vector<std::string>> fetch_members(const std::string& list_id) override {
    const auto it = lists_.find(list_id);
    if (it == lists_.end()) return Fetched<std::vector<std::string>>::not_found();
    const ListRecord& l = data_.lists[it->second];
    if (!l.is_public) return Fetched<std::vector<std::string>>::skipped();
    std::vector<std::string> out;
    for_each_page(Endpoint::Members, l.member_ids.size(),
                  [&](std::size_t i) { out.push_back(l.member_ids[i]); });
    return out;
  }

  Fetched<UserProfile> fetch_profile(const std::string& user_id) override {
    const UserProfile* u = user(user_id);
    if (!u) return Fetched<UserProfile>::not_found();
    if (!u->is_public) return Fetched<UserProfile>::skipped();
    charge(Endpoint::Users);
    return *u;
  }

  Fetched<UserBundle> fetch_user_bundle(const std::string& user_id,
                                        std::size_t max_statuses = kDefaultMaxStatuses) override {
    const UserProfile* u = user(user_id);
    if (!u) return Fetched<UserBundle>::not_found();
    if (!u->is_public) return Fetched<UserBundle>::skipped();
    charge(Endpoint::Users);
    UserBundle b;
    b.profile = *u;
    auto copy_paged = [&](Endpoint e, const std::map<std::string, std::vector<std::string>>& m,
                          std::vector<std::string>& out) {
      const auto it = m.find(user_id);
      const std::size_t n = it == m.end() ? 0 : it->second.size();
      for_each_page(e, n, [&](std::size_t i) { out.push_back(it->second[i]); });
    };
    copy_paged(Endpoint::Followers, followers_, b.followers);
    copy_paged(Endpoint::Followings, followings_, b.followings);
    const auto st = data_.statuses.find(user_id);
    const std::size_t n =
        st == data_.statuses.end() ? 0 : std::min(st->second.size(), max_statuses);
    for_each_page(Endpoint::Statuses, n, [&](std::size_t i) { b.statuses.push_back(st->second[i]); });
    return b;
  }

  const FixtureData& data() const { return data_; }

  std::size_t calls() const {
    std::lock_guard lock(mu_);
    return calls_;
  }

 private:
  const UserProfile* user(const std::string& id) const {
    const auto it = users_.find(id);
    return it == users_.end() ? nullptr : &data_.users[it->second];
  }

  void charge(Endpoint e) {
    if (opts_.limiter) opts_.limiter->acquire(e);
    std::lock_guard lock(mu_);
    ++calls_;
  }

  // One charged call per page; an empty collection still costs one call.
  template <class F>
  void for_each_page(Endpoint e, std::size_t total, F&& visit) {
    std::size_t i = 0;
    do {
      charge(e);
      const std::size_t end = std::min(total, i + opts_.page_size);
      for (; i < end; ++i) visit(i);
    } while (i < total);
  }

  FixtureData data_;
  FixtureOptions opts_;
  std::map<std::string, std::size_t> users_;
  std::map<std::string, std::size_t> lists_;
  std::map<std::string, std::vector<std::size_t>> memberships_;
  std::map<std::string, std::vector<std::string>> followers_;
  std::map<std::string, std::vector<std::string>> followings_;
  mutable std::mutex mu_;
  std::size_t calls_ = 0;
};

}  // namespace scilist
