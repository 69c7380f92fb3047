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

// URL extraction from statuses, shortener expansion, domain rankings and
// the per-user scientific-sharing fraction.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "scilist/error.hpp"
#include "scilist/parallel.hpp"
#include "scilist/source.hpp"
#include "scilist/text.hpp"

namespace scilist {

struct UrlMention {
  std::string user_id;
  std::string status_id;
  std::string raw_url;
  std::optional<std::string> expanded_url;
  std::string domain;
  bool unresolved = false;  // shortener that could not be expanded

  friend bool operator==(const UrlMention&, const UrlMention&) = default;
};

// ---------------------------------------------------------------------------
// Domains

namespace url_detail {

inline bool host_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.' || u >= 0x80;
}

inline bool valid_scheme(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
  });
}

}  // namespace url_detail

// Lowercase host with one leading "www." removed, or nothing when the URL
// cannot be parsed. Scheme-less URLs ("bit.ly/x") are accepted.
inline std::optional<std::string> url_domain(std::string_view url) {
  std::string_view rest = text::trim(url);
  const auto sep = rest.find("://");
  if (sep != std::string_view::npos) {
    std::string scheme(rest.substr(0, sep));
    for (char& c : scheme) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (!url_detail::valid_scheme(scheme) || (scheme != "http" && scheme != "https")) {
      return std::nullopt;
    }
    rest = rest.substr(sep + 3);
  }
  std::string_view authority = rest.substr(0, rest.find_first_of("/?#"));
  if (const auto at = authority.rfind('@'); at != std::string_view::npos) {
    authority = authority.substr(at + 1);
  }
  if (const auto colon = authority.find(':'); colon != std::string_view::npos) {
    const std::string_view port = authority.substr(colon + 1);
    if (!std::all_of(port.begin(), port.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      return std::nullopt;
    }
    authority = authority.substr(0, colon);
  }
  std::string host(authority);
  for (char& c : host) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (!host.empty() && host.back() == '.') host.pop_back();
  if (host.empty() || !std::all_of(host.begin(), host.end(), url_detail::host_char)) {
    return std::nullopt;
  }
  if (host.front() == '.' || host.find("..") != std::string::npos) return std::nullopt;
  if (host.rfind("www.", 0) == 0 && host.size() > 4) host.erase(0, 4);
  return host;
}

// Plain-text domain list: one domain per line, `#` comments, blank lines.
inline std::set<std::string> parse_domain_list(std::istream& in, const std::string& origin = "domains") {
  std::set<std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view t = text::trim(line);
    if (t.empty()) continue;
    const auto d = url_domain(t);
    if (!d || t.find('/') != std::string_view::npos) {
      throw DataError(origin + ":" + std::to_string(lineno) + ": not a domain: '" + std::string(t) + "'");
    }
    out.insert(*d);
  }
  return out;
}

inline std::set<std::string> load_domain_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open domain list " + path);
  return parse_domain_list(in, path);
}

// `domain` or one of its parent domains is listed.
inline bool domain_in(const std::string& domain, const std::set<std::string>& list) {
  std::string_view d(domain);
  while (true) {
    if (list.count(std::string(d))) return true;
    const auto dot = d.find('.');
    if (dot == std::string_view::npos) return false;
    d.remove_prefix(dot + 1);
  }
}

// ---------------------------------------------------------------------------
// Extraction

// Tweets give their own URLs, retweets give the original's URLs credited to
// the retweeter, replies give nothing. Unparseable URLs are reported and
// skipped.
inline std::vector<UrlMention> extract_urls(const std::vector<Status>& statuses,
                                            std::vector<std::string>* parse_errors = nullptr) {
  std::vector<UrlMention> out;
  for (const Status& s : statuses) {
    const std::vector<std::string>* urls = nullptr;
    if (s.kind == StatusKind::Tweet) urls = &s.urls;
    if (s.kind == StatusKind::Retweet && s.original) urls = &s.original->urls;
    if (!urls) continue;
    for (const std::string& u : *urls) {
      auto d = url_domain(u);
      if (!d) {
        if (parse_errors) parse_errors->push_back(s.status_id + ": " + u);
        continue;
      }
      out.push_back({s.author_id, s.status_id, u, std::nullopt, std::move(*d), false});
    }
  }
  return out;
}

// Keeps the first mention of each (user, URL) pair.
inline std::vector<UrlMention> dedupe_mentions(const std::vector<UrlMention>& mentions) {
  std::set<std::pair<std::string, std::string>> seen;
  std::vector<UrlMention> out;
  for (const auto& m : mentions) {
    if (seen.emplace(m.user_id, m.expanded_url.value_or(m.raw_url)).second) out.push_back(m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Expansion

// Follows redirects to the final destination; nothing on failure.
class Resolver {
 public:
  virtual ~Resolver() = default;
  virtual std::optional<std::string> resolve(const std::string& url) = 0;
};

// Replays a redirect map, following chains of at most `max_hops`.
class FixtureResolver final : public Resolver {
 public:
  explicit FixtureResolver(std::map<std::string, std::string> redirects, int max_hops = 10)
      : redirects_(std::move(redirects)), max_hops_(max_hops) {}

  std::optional<std::string> resolve(const std::string& url) override {
    auto it = redirects_.find(url);
    if (it == redirects_.end()) return std::nullopt;
    std::string cur = it->second;
    for (int hop = 1; hop < max_hops_; ++hop) {
      it = redirects_.find(cur);
      if (it == redirects_.end()) return cur;
      cur = it->second;
    }
    return redirects_.count(cur) ? std::nullopt : std::optional<std::string>(cur);
  }

 private:
  std::map<std::string, std::string> redirects_;
  int max_hops_;
};

// JSON object mapping short URL to its redirect target.
inline FixtureResolver load_fixture_resolver(const std::string& path, int max_hops = 10) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open redirect fixture " + path);
  try {
    nlohmann::json j;
    in >> j;
    return FixtureResolver(j.get<std::map<std::string, std::string>>(), max_hops);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

// Expands shortener URLs. Nothing when the mention's URL does not parse.
inline std::optional<UrlMention> expand_and_domain(UrlMention m, Resolver& resolver,
                                                   const std::set<std::string>& shorteners) {
  if (m.expanded_url) return m;
  const auto raw_domain = url_domain(m.raw_url);
  if (!raw_domain) return std::nullopt;
  m.domain = *raw_domain;
  m.unresolved = false;
  if (!shorteners.count(m.domain)) return m;
  std::optional<std::string> target;
  try {
    target = resolver.resolve(m.raw_url);
  } catch (const std::exception&) {
    target.reset();
  }
  const auto target_domain = target ? url_domain(*target) : std::nullopt;
  if (!target_domain) {
    m.unresolved = true;
    return m;
  }
  m.expanded_url = std::move(target);
  m.domain = *target_domain;
  return m;
}

struct ExpansionStats {
  std::size_t expanded = 0;
  std::size_t unresolved = 0;
  std::size_t dropped = 0;
};

// Resolves each distinct shortener URL once, `workers` at a time; the output
// keeps input order.
inline std::vector<UrlMention> expand_all(const std::vector<UrlMention>& mentions, Resolver& resolver,
                                          const std::set<std::string>& shorteners,
                                          std::size_t workers = 1, ExpansionStats* stats = nullptr) {
  std::vector<std::string> unique;
  {
    std::set<std::string> seen;
    for (const auto& m : mentions) {
      if (!m.expanded_url && seen.insert(m.raw_url).second) unique.push_back(m.raw_url);
    }
  }
  std::vector<std::optional<UrlMention>> resolved(unique.size());
  parallel_for(unique.size(), workers, [&](std::size_t i) {
    UrlMention probe;
    probe.raw_url = unique[i];
    resolved[i] = expand_and_domain(std::move(probe), resolver, shorteners);
  });
  std::map<std::string, const std::optional<UrlMention>*> by_url;
  for (std::size_t i = 0; i < unique.size(); ++i) by_url[unique[i]] = &resolved[i];

  ExpansionStats local;
  std::vector<UrlMention> out;
  out.reserve(mentions.size());
  for (const auto& m : mentions) {
    if (m.expanded_url) {
      out.push_back(m);
      continue;
    }
    const auto& r = *by_url.at(m.raw_url);
    if (!r) {
      ++local.dropped;
      continue;
    }
    UrlMention e = m;
    e.expanded_url = r->expanded_url;
    e.domain = r->domain;
    e.unresolved = r->unresolved;
    local.expanded += e.expanded_url.has_value();
    local.unresolved += e.unresolved;
    out.push_back(std::move(e));
  }
  if (stats) *stats = local;
  return out;
}

// ---------------------------------------------------------------------------
// Rankings

struct DomainCount {
  std::string domain;
  std::int64_t count = 0;

  friend bool operator==(const DomainCount&, const DomainCount&) = default;
};

inline std::map<std::string, std::int64_t> domain_counts(const std::vector<UrlMention>& mentions,
                                                         const std::set<std::string>* filter = nullptr) {
  std::map<std::string, std::int64_t> counts;
  for (const auto& m : mentions) {
    if (!filter || domain_in(m.domain, *filter)) ++counts[m.domain];
  }
  return counts;
}

inline std::vector<DomainCount> rank_counts(const std::map<std::string, std::int64_t>& counts,
                                            std::size_t k) {
  std::vector<DomainCount> ranked;
  for (const auto& [d, c] : counts) ranked.push_back({d, c});
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.count > b.count; });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

// Each mention counts once; ties go to the lexicographically smaller domain.
inline std::vector<DomainCount> top_domains(const std::vector<UrlMention>& mentions, std::size_t k,
                                            const std::set<std::string>* filter = nullptr) {
  if (k < 1) throw Error("top_domains: k must be at least 1");
  return rank_counts(domain_counts(mentions, filter), k);
}

// Groups by the user's first final discipline; users without one are left out.
inline std::map<std::string, std::vector<DomainCount>> top_domains_by_discipline(
    const std::vector<UrlMention>& mentions, std::size_t k,
    const std::map<std::string, std::string>& discipline_of,
    const std::set<std::string>* filter = nullptr) {
  if (k < 1) throw Error("top_domains: k must be at least 1");
  std::map<std::string, std::map<std::string, std::int64_t>> counts;
  for (const auto& m : mentions) {
    const auto d = discipline_of.find(m.user_id);
    if (d == discipline_of.end()) continue;
    if (!filter || domain_in(m.domain, *filter)) ++counts[d->second][m.domain];
  }
  std::map<std::string, std::vector<DomainCount>> out;
  for (const auto& [disc, c] : counts) out[disc] = rank_counts(c, k);
  return out;
}

// ---------------------------------------------------------------------------
// Scientific fraction

struct ScientificShare {
  std::int64_t scientific = 0;  // URL-bearing statuses with a scientific domain
  std::int64_t total = 0;       // URL-bearing statuses
  double s = 0;

  friend bool operator==(const ScientificShare&, const ScientificShare&) = default;
};

// Users without URL-bearing statuses are absent (s undefined).
inline std::map<std::string, ScientificShare> scientific_fraction(
    const std::vector<UrlMention>& mentions, const std::set<std::string>& sci) {
  std::map<std::string, std::map<std::string, bool>> by_user;  // user -> status -> any scientific
  for (const auto& m : mentions) {
    bool& flag = by_user[m.user_id][m.status_id];
    flag = flag || domain_in(m.domain, sci);
  }
  std::map<std::string, ScientificShare> out;
  for (const auto& [user, statuses] : by_user) {
    ScientificShare sh;
    sh.total = static_cast<std::int64_t>(statuses.size());
    for (const auto& [id, is_sci] : statuses) sh.scientific += is_sci;
    sh.s = static_cast<double>(sh.scientific) / static_cast<double>(sh.total);
    out[user] = sh;
  }
  return out;
}

inline constexpr std::size_t kDefaultHistogramBins = 20;

// Bin for s in [0, 1]: bins are right-closed, (lo, hi], the first one being
// [0, hi]. Edges are i / bins.
inline std::size_t histogram_bin(double v, std::size_t bins) {
  if (!(v >= 0.0 && v <= 1.0)) throw Error("histogram value outside [0, 1]");
  const auto edge = [&](std::size_t i) { return static_cast<double>(i) / static_cast<double>(bins); };
  auto idx = static_cast<std::size_t>(std::max(0.0, std::ceil(v * static_cast<double>(bins)) - 1));
  idx = std::min(idx, bins - 1);
  while (idx > 0 && v <= edge(idx)) --idx;
  while (idx + 1 < bins && v > edge(idx + 1)) ++idx;
  return idx;
}

inline std::vector<std::int64_t> fraction_histogram(const std::vector<double>& values,
                                                    std::size_t bins = kDefaultHistogramBins) {
  if (bins < 1) throw Error("fraction_histogram: bins must be at least 1");
  std::vector<std::int64_t> h(bins, 0);
  for (double v : values) ++h[histogram_bin(v, bins)];
  return h;
}

inline std::map<std::string, std::vector<std::int64_t>> fraction_histograms(
    const std::map<std::string, ScientificShare>& shares,
    const std::map<std::string, std::string>& discipline_of,
    std::size_t bins = kDefaultHistogramBins) {
  std::map<std::string, std::vector<double>> values;
  for (const auto& [user, sh] : shares) {
    const auto d = discipline_of.find(user);
    if (d != discipline_of.end()) values[d->second].push_back(sh.s);
  }
  std::map<std::string, std::vector<std::int64_t>> out;
  for (const auto& [disc, v] : values) out[disc] = fraction_histogram(v, bins);
  return out;
}

inline void to_json(nlohmann::json& j, const UrlMention& m) {
  j = nlohmann::json{{"user_id", m.user_id},
                     {"status_id", m.status_id},
                     {"raw_url", m.raw_url},
                     {"expanded_url", m.expanded_url ? nlohmann::json(*m.expanded_url)
                                                     : nlohmann::json(nullptr)},
                     {"domain", m.domain},
                     {"unresolved", m.unresolved}};
}

inline void from_json(const nlohmann::json& j, UrlMention& m) {
  j.at("user_id").get_to(m.user_id);
  j.at("status_id").get_to(m.status_id);
  j.at("raw_url").get_to(m.raw_url);
  m.expanded_url.reset();
  if (!j.at("expanded_url").is_null()) m.expanded_url = j["expanded_url"].get<std::string>();
  j.at("domain").get_to(m.domain);
  m.unresolved = j.value("unresolved", false);
}

}  // namespace scilist
