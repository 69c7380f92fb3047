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

// HTTP backends: a generic cursor-paginated REST Source and a live redirect
// Resolver. Define CPPHTTPLIB_OPENSSL_SUPPORT before including for https.
//
// REST response shapes (JSON):
//   paged endpoints   {"items": [...], "next_cursor": "<cursor>" | null | ""}
//   users endpoint    a UserProfile object
// Items are ListRecord (memberships), user id strings (members, followers,
// followings) or Status (statuses). HTTP 404 maps to NotFound, 401/403 to
// Skipped; any other failure aborts the collection, is logged, and maps to
// Skipped.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "scilist/error.hpp"
#include "scilist/source.hpp"
#include "scilist/urlshare.hpp"

namespace scilist {

struct RestConfig {
  std::string base_url;  // scheme://host[:port]
  // Path templates with {id}, {cursor} and {count} placeholders.
  std::map<Endpoint, std::string> templates;
  std::size_t page_size = 100;
  std::string auth_header = "Authorization";
  std::string auth_env;  // environment variable holding the header value
  double timeout_seconds = 30;
};

inline Endpoint parse_endpoint(const std::string& s) {
  for (Endpoint e : {Endpoint::Memberships, Endpoint::Members, Endpoint::Users, Endpoint::Followers,
                     Endpoint::Followings, Endpoint::Statuses}) {
    if (to_string(e) == s) return e;
  }
  throw DataError("unknown endpoint '" + s + "'");
}

// {"base_url": .., "page_size": .., "auth_header": .., "auth_env": ..,
//  "timeout_seconds": .., "endpoints": {"memberships": "/path?..", ...}}
inline RestConfig load_rest_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open REST config " + path);
  try {
    const auto j = nlohmann::json::parse(in);
    RestConfig c;
    c.base_url = j.at("base_url").get<std::string>();
    c.page_size = j.value("page_size", c.page_size);
    c.auth_header = j.value("auth_header", c.auth_header);
    c.auth_env = j.value("auth_env", c.auth_env);
    c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
    for (const auto& [name, tpl] : j.at("endpoints").items()) {
      c.templates[parse_endpoint(name)] = tpl.get<std::string>();
    }
    for (Endpoint e : {Endpoint::Memberships, Endpoint::Members, Endpoint::Users, Endpoint::Followers,
                       Endpoint::Followings, Endpoint::Statuses}) {
      if (!c.templates.count(e)) throw DataError("REST config lacks endpoint " + std::string(to_string(e)));
    }
    if (c.page_size == 0) throw DataError("REST config page_size must be positive");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("REST config " + path + ": " + e.what());
  }
}

namespace rest_detail {

inline std::string url_encode(const std::string& s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

inline std::string expand(std::string tpl, const std::map<std::string, std::string>& vars) {
  for (const auto& [k, v] : vars) {
    const std::string key = "{" + k + "}";
    for (auto pos = tpl.find(key); pos != std::string::npos; pos = tpl.find(key, pos + v.size())) {
      tpl.replace(pos, key.size(), url_encode(v));
    }
  }
  return tpl;
}

struct Response {
  int status = 0;  // 0: transport failure
  std::string body;
};

inline std::unique_ptr<httplib::Client> client(const std::string& base, double timeout) {
  auto c = std::make_unique<httplib::Client>(base);
  const auto t = std::chrono::duration<double>(timeout);
  c->set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(t));
  c->set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(t));
  c->set_follow_location(false);
  return c;
}

}  // namespace rest_detail

class RestSource final : public Source {
 public:
  explicit RestSource(RestConfig cfg, RateLimiter* limiter = nullptr)
      : cfg_(std::move(cfg)), limiter_(limiter) {
    if (!cfg_.auth_env.empty()) {
      if (const char* v = std::getenv(cfg_.auth_env.c_str())) auth_value_ = v;
    }
  }

  Fetched<std::vector<ListRecord>> fetch_memberships(const std::string& user_id) override {
    std::vector<ListRecord> out;
    const auto st = paged(Endpoint::Memberships, user_id, [&](const nlohmann::json& item) {
      auto l = item.get<ListRecord>();
      if (l.is_public) out.push_back(std::move(l));
    });
    if (st != FetchStatus::Ok) return fail<std::vector<ListRecord>>(st);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.list_id < b.list_id; });
    return out;
  }

  Fetched<std::vector<std::string>> fetch_members(const std::string& list_id) override {
    std::vector<std::string> out;
    const auto st = paged(Endpoint::Members, list_id,
                          [&](const nlohmann::json& item) { out.push_back(item.get<std::string>()); });
    if (st != FetchStatus::Ok) return fail<std::vector<std::string>>(st);
    return out;
  }

  Fetched<UserProfile> fetch_profile(const std::string& user_id) override {
    const auto r = get(Endpoint::Users, {{"id", user_id}, {"cursor", ""}, {"count", "1"}});
    const auto st = classify(r, Endpoint::Users, user_id);
    if (st != FetchStatus::Ok) return fail<UserProfile>(st);
    try {
      auto u = nlohmann::json::parse(r.body).get<UserProfile>();
      if (!u.is_public) return Fetched<UserProfile>::skipped();
      return u;
    } catch (const nlohmann::json::exception& e) {
      log(Endpoint::Users, user_id, e.what());
      return Fetched<UserProfile>::skipped();
    }
  }

  Fetched<UserBundle> fetch_user_bundle(const std::string& user_id,
                                        std::size_t max_statuses = kDefaultMaxStatuses) override {
    auto p = fetch_profile(user_id);
    if (!p) return fail<UserBundle>(p.status());
    UserBundle b;
    b.profile = std::move(p).value();
    auto ids = [&](Endpoint e, std::vector<std::string>& out) {
      return paged(e, user_id, [&](const nlohmann::json& item) { out.push_back(item.get<std::string>()); });
    };
    if (auto st = ids(Endpoint::Followers, b.followers); st != FetchStatus::Ok) return fail<UserBundle>(st);
    if (auto st = ids(Endpoint::Followings, b.followings); st != FetchStatus::Ok) return fail<UserBundle>(st);
    const auto st = paged(
        Endpoint::Statuses, user_id,
        [&](const nlohmann::json& item) {
          if (b.statuses.size() < max_statuses) b.statuses.push_back(item.get<Status>());
        },
        [&] { return b.statuses.size() >= max_statuses; });
    if (st != FetchStatus::Ok) return fail<UserBundle>(st);
    return b;
  }

 private:
  template <class T>
  static Fetched<T> fail(FetchStatus st) {
    return st == FetchStatus::NotFound ? Fetched<T>::not_found() : Fetched<T>::skipped();
  }

  rest_detail::Response get(Endpoint e, const std::map<std::string, std::string>& vars) {
    if (limiter_) limiter_->acquire(e);
    auto c = rest_detail::client(cfg_.base_url, cfg_.timeout_seconds);
    httplib::Headers h;
    if (!auth_value_.empty()) h.emplace(cfg_.auth_header, auth_value_);
    auto res = c->Get(rest_detail::expand(cfg_.templates.at(e), vars), h);
    rest_detail::Response r;
    if (res) {
      r.status = res->status;
      r.body = res->body;
    }
    return r;
  }

  FetchStatus classify(const rest_detail::Response& r, Endpoint e, const std::string& id) {
    if (r.status == 200) return FetchStatus::Ok;
    if (r.status == 404) return FetchStatus::NotFound;
    if (r.status == 401 || r.status == 403) return FetchStatus::Skipped;
    log(e, id, r.status == 0 ? "transport failure" : "HTTP " + std::to_string(r.status));
    return FetchStatus::Skipped;
  }

  void log(Endpoint e, const std::string& id, const std::string& what) {
    std::lock_guard lock(log_mu_);
    std::cerr << "rest: " << to_string(e) << " " << id << ": " << what << "; collection aborted\n";
  }

  template <class Visit>
  FetchStatus paged(Endpoint e, const std::string& id, Visit&& visit) {
    return paged(e, id, std::forward<Visit>(visit), [] { return false; });
  }

  template <class Visit, class Done>
  FetchStatus paged(Endpoint e, const std::string& id, Visit&& visit, Done&& done) {
    std::string cursor;
    while (true) {
      const auto r = get(e, {{"id", id}, {"cursor", cursor}, {"count", std::to_string(cfg_.page_size)}});
      const auto st = classify(r, e, id);
      if (st != FetchStatus::Ok) return st;
      try {
        const auto j = nlohmann::json::parse(r.body);
        for (const auto& item : j.at("items")) visit(item);
        const auto next = j.find("next_cursor");
        if (next == j.end() || next->is_null() || next->get<std::string>().empty() || done()) {
          return FetchStatus::Ok;
        }
        cursor = next->get<std::string>();
      } catch (const nlohmann::json::exception& ex) {
        log(e, id, ex.what());
        return FetchStatus::Skipped;
      }
    }
  }

  RestConfig cfg_;
  RateLimiter* limiter_;
  std::string auth_value_;
  std::mutex log_mu_;
};

// Follows HTTP redirects with HEAD requests, at most `max_hops`, each hop
// bounded by `timeout_seconds`. Returns the last URL reached once at least
// one redirect was followed; nothing if the first request fails or the hop
// limit is hit.
class HttpResolver final : public Resolver {
 public:
  explicit HttpResolver(std::size_t max_hops = 10, double timeout_seconds = 10)
      : max_hops_(max_hops), timeout_(timeout_seconds) {}

  std::optional<std::string> resolve(const std::string& url) override {
    std::string current = url;
    if (current.find("://") == std::string::npos) current = "http://" + current;
    for (std::size_t hop = 0; hop <= max_hops_; ++hop) {
      const auto split = split_url(current);
      if (!split) return std::nullopt;
      auto c = rest_detail::client(split->first, timeout_);
      auto res = c->Head(split->second);
      if (!res) return hop > 0 ? std::optional<std::string>(current) : std::nullopt;
      if (res->status >= 300 && res->status < 400 && res->has_header("Location")) {
        if (hop == max_hops_) return std::nullopt;
        std::string loc = res->get_header_value("Location");
        if (!loc.empty() && loc[0] == '/') loc = split->first + loc;
        current = loc;
        continue;
      }
      if (res->status >= 400 && hop == 0) return std::nullopt;
      return current;
    }
    return std::nullopt;
  }

  // "scheme://host[:port]" and "/path?query".
  static std::optional<std::pair<std::string, std::string>> split_url(const std::string& url) {
    const auto s = url.find("://");
    if (s == std::string::npos) return std::nullopt;
    const auto p = url.find_first_of("/?#", s + 3);
    if (p == std::string::npos) return std::pair{url, std::string("/")};
    std::string path = url.substr(p);
    if (path[0] != '/') path = "/" + path;
    if (const auto h = path.find('#'); h != std::string::npos) path.resize(h);
    return std::pair{url.substr(0, p), path};
  }

 private:
  std::size_t max_hops_;
  double timeout_;
};

}  // namespace scilist
