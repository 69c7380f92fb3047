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

// Follower / retweet / mention networks among identified scientists and the
// measures computed on them.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scilist/error.hpp"
#include "scilist/graph.hpp"
#include "scilist/source.hpp"

namespace scilist {

enum class NetworkKind { Follower, Retweet, Mention };

inline std::string_view to_string(NetworkKind k) {
  switch (k) {
    case NetworkKind::Follower: return "follower";
    case NetworkKind::Retweet: return "retweet";
    case NetworkKind::Mention: return "mention";
  }
  return "follower";
}

// Lowercased screen names after '@' (1-15 of [A-Za-z0-9_]), skipping
// e-mail-like "x@y" occurrences. Each name is reported once per text.
inline std::vector<std::string> parse_mentions(std::string_view text) {
  auto name_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '@') continue;
    if (i > 0 && name_char(text[i - 1])) continue;
    std::size_t j = i + 1;
    while (j < text.size() && name_char(text[j])) ++j;
    const std::size_t len = j - i - 1;
    if (len == 0 || len > 15) {
      i = j;
      continue;
    }
    std::string name(text.substr(i + 1, len));
    for (char& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (seen.insert(name).second) out.push_back(std::move(name));
    i = j;
  }
  return out;
}

// Edges among `bundles` only. Follower links come from both follower and
// following lists with weight 1; retweet links count button retweets of the
// target's tweets; mention links count statuses (not retweets) naming the
// target. Self-links are dropped.
inline DirectedGraph build_network(NetworkKind kind, const std::map<std::string, UserBundle>& bundles) {
  GraphBuilder b(kind == NetworkKind::Follower ? ParallelEdges::Unit : ParallelEdges::Sum);
  for (const auto& [id, _] : bundles) b.add_node(id);
  auto inside = [&](const std::string& id) { return bundles.count(id) > 0; };
  std::map<std::string, std::string> by_screen_name;
  if (kind == NetworkKind::Mention) {
    for (const auto& [id, bundle] : bundles) {
      std::string sn = bundle.profile.screen_name;
      for (char& c : sn) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (!sn.empty()) by_screen_name.emplace(sn, id);
    }
  }
  for (const auto& [id, bundle] : bundles) {
    switch (kind) {
      case NetworkKind::Follower:
        for (const auto& f : bundle.followings) {
          if (inside(f)) b.add_edge(id, f);
        }
        for (const auto& f : bundle.followers) {
          if (inside(f)) b.add_edge(f, id);
        }
        break;
      case NetworkKind::Retweet:
        for (const Status& s : bundle.statuses) {
          if (s.kind == StatusKind::Retweet && s.original && inside(s.original->author_id)) {
            b.add_edge(id, s.original->author_id);
          }
        }
        break;
      case NetworkKind::Mention:
        for (const Status& s : bundle.statuses) {
          if (s.kind == StatusKind::Retweet) continue;
          for (const auto& name : parse_mentions(s.text)) {
            const auto it = by_screen_name.find(name);
            if (it != by_screen_name.end()) b.add_edge(id, it->second);
          }
        }
        break;
    }
  }
  return b.build();
}

// ---------------------------------------------------------------------------
// Components

// Weakly connected components as sorted node-index lists, ordered by the
// smallest member.
inline std::vector<std::vector<std::size_t>> weak_components(const DirectedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<char> seen(n, 0);
  std::vector<std::vector<std::size_t>> comps;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp;
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      const std::size_t v = q.front();
      q.pop();
      comp.push_back(v);
      for (const auto* arcs : {&g.out(v), &g.in(v)}) {
        for (const Arc& a : *arcs) {
          if (!seen[a.node]) {
            seen[a.node] = 1;
            q.push(a.node);
          }
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

// Largest component; among equal sizes the one holding the smallest node id.
inline DirectedGraph largest_wcc(const DirectedGraph& g) {
  if (g.empty()) return {};
  const auto comps = weak_components(g);
  const std::vector<std::size_t>* best = &comps.front();
  for (const auto& c : comps) {
    if (c.size() > best->size()) best = &c;
  }
  return g.induced(*best);
}

// ---------------------------------------------------------------------------
// Centralities

enum class CentralityKind { InDegree, InStrength, PageRank, KCore };

inline std::string_view to_string(CentralityKind k) {
  switch (k) {
    case CentralityKind::InDegree: return "in_degree";
    case CentralityKind::InStrength: return "in_strength";
    case CentralityKind::PageRank: return "pagerank";
    case CentralityKind::KCore: return "kcore";
  }
  return "in_degree";
}

// Values are indexed like g.nodes().
struct CentralityVector {
  CentralityKind kind = CentralityKind::InDegree;
  std::vector<double> values;
};

inline CentralityVector in_degree(const DirectedGraph& g) {
  CentralityVector c{CentralityKind::InDegree, std::vector<double>(g.node_count())};
  for (std::size_t i = 0; i < g.node_count(); ++i) c.values[i] = static_cast<double>(g.in(i).size());
  return c;
}

inline CentralityVector in_strength(const DirectedGraph& g) {
  CentralityVector c{CentralityKind::InStrength, std::vector<double>(g.node_count())};
  for (std::size_t i = 0; i < g.node_count(); ++i) c.values[i] = g.in_strength(i);
  return c;
}

struct PageRankOptions {
  double damping = 0.85;
  double tol = 1e-12;
  std::size_t max_iter = 10000;
};

// Power iteration on the out-weight-normalized transition matrix with
// uniform teleportation; dangling nodes spread their mass uniformly.
inline CentralityVector pagerank(const DirectedGraph& g, const PageRankOptions& opts = {}) {
  if (!(opts.damping > 0 && opts.damping < 1)) throw Error("pagerank: damping must be in (0, 1)");
  const std::size_t n = g.node_count();
  CentralityVector c{CentralityKind::PageRank, {}};
  if (n == 0) return c;
  std::vector<double> out_w(n);
  for (std::size_t i = 0; i < n; ++i) out_w[i] = g.out_strength(i);
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> x(n, inv_n);
  std::vector<double> next(n);
  double residual = 0;
  for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
    double dangling = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (out_w[i] == 0) dangling += x[i];
    }
    const double base = (1.0 - opts.damping) * inv_n + opts.damping * dangling * inv_n;
    std::fill(next.begin(), next.end(), base);
    for (const Edge& e : g.edges()) next[e.dst] += opts.damping * x[e.src] * e.weight / out_w[e.src];
    double total = 0;
    for (double v : next) total += v;
    residual = 0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= total;
      residual += std::abs(next[i] - x[i]);
    }
    x.swap(next);
    if (residual < opts.tol) {
      c.values = std::move(x);
      return c;
    }
  }
  throw ConvergenceError("pagerank did not converge", residual);
}

enum class KCoreMode { Undirected, In, Out, Total };

inline std::string_view to_string(KCoreMode m) {
  switch (m) {
    case KCoreMode::Undirected: return "undirected";
    case KCoreMode::In: return "in";
    case KCoreMode::Out: return "out";
    case KCoreMode::Total: return "total";
  }
  return "undirected";
}

inline KCoreMode parse_kcore_mode(std::string_view s) {
  for (KCoreMode m : {KCoreMode::Undirected, KCoreMode::In, KCoreMode::Out, KCoreMode::Total}) {
    if (to_string(m) == s) return m;
  }
  throw Error("unknown k-core mode '" + std::string(s) + "'");
}

// Core numbers by minimum-degree peeling. Undirected uses the simple
// undirected projection; the directed modes count in-, out- or in+out arcs
// (self-loops ignored throughout).
inline CentralityVector k_core_numbers(const DirectedGraph& g, KCoreMode mode = KCoreMode::Undirected) {
  const std::size_t n = g.node_count();
  // dependents[v]: nodes whose degree drops by one when v is removed.
  std::vector<std::vector<std::size_t>> dependents(n);
  std::vector<std::size_t> deg(n, 0);
  if (mode == KCoreMode::Undirected) {
    for (std::size_t v = 0; v < n; ++v) {
      std::set<std::size_t> nb;
      for (const Arc& a : g.out(v)) nb.insert(a.node);
      for (const Arc& a : g.in(v)) nb.insert(a.node);
      nb.erase(v);
      dependents[v].assign(nb.begin(), nb.end());
      deg[v] = nb.size();
    }
  } else {
    for (const Edge& e : g.edges()) {
      if (e.src == e.dst) continue;
      if (mode == KCoreMode::In || mode == KCoreMode::Total) {
        ++deg[e.dst];
        dependents[e.src].push_back(e.dst);
      }
      if (mode == KCoreMode::Out || mode == KCoreMode::Total) {
        ++deg[e.src];
        dependents[e.dst].push_back(e.src);
      }
    }
  }
  std::set<std::pair<std::size_t, std::size_t>> queue;
  for (std::size_t v = 0; v < n; ++v) queue.emplace(deg[v], v);
  std::vector<char> removed(n, 0);
  CentralityVector c{CentralityKind::KCore, std::vector<double>(n, 0)};
  std::size_t k = 0;
  while (!queue.empty()) {
    const auto [d, v] = *queue.begin();
    queue.erase(queue.begin());
    k = std::max(k, d);
    c.values[v] = static_cast<double>(k);
    removed[v] = 1;
    for (std::size_t u : dependents[v]) {
      if (removed[u]) continue;
      queue.erase({deg[u], u});
      --deg[u];
      queue.emplace(deg[u], u);
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Group shares

struct GroupShare {
  std::int64_t nodes = 0;
  double node_fraction = 0;
  double share = 0;                   // fraction of the covered centrality total
  std::optional<double> normalized;   // share / node_fraction
};

// Nodes without a label are left out of every total. `expected` groups are
// reported even when empty.
inline std::map<std::string, GroupShare> group_shares(const DirectedGraph& g,
                                                      const CentralityVector& c,
                                                      const std::map<std::string, std::string>& labels,
                                                      const std::set<std::string>& expected = {}) {
  std::map<std::string, GroupShare> out;
  for (const auto& e : expected) out[e];
  std::map<std::string, double> sums;
  double total = 0;
  std::int64_t covered = 0;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto it = labels.find(g.node(i));
    if (it == labels.end()) continue;
    ++out[it->second].nodes;
    sums[it->second] += c.values[i];
    total += c.values[i];
    ++covered;
  }
  for (auto& [group, gs] : out) {
    if (covered > 0) gs.node_fraction = static_cast<double>(gs.nodes) / static_cast<double>(covered);
    if (total > 0) gs.share = sums[group] / total;
    if (gs.nodes > 0 && total > 0) gs.normalized = gs.share / gs.node_fraction;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Assortativity

// Raw (unnormalized) category mixing weights.
struct MixingMatrix {
  std::vector<std::string> categories;
  std::vector<std::vector<double>> weight;  // [from][to]
};

inline MixingMatrix mixing_matrix(const DirectedGraph& g, const std::map<std::string, std::string>& labels,
                                  bool weighted) {
  std::set<std::string> cats;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto it = labels.find(g.node(i));
    if (it != labels.end()) cats.insert(it->second);
  }
  MixingMatrix m;
  m.categories.assign(cats.begin(), cats.end());
  const std::size_t k = m.categories.size();
  m.weight.assign(k, std::vector<double>(k, 0.0));
  std::vector<std::optional<std::size_t>> cat_of(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto it = labels.find(g.node(i));
    if (it == labels.end()) continue;
    cat_of[i] = static_cast<std::size_t>(
        std::lower_bound(m.categories.begin(), m.categories.end(), it->second) - m.categories.begin());
  }
  for (const Edge& e : g.edges()) {
    if (!cat_of[e.src] || !cat_of[e.dst]) continue;
    m.weight[*cat_of[e.src]][*cat_of[e.dst]] += weighted ? e.weight : 1.0;
  }
  return m;
}

// Newman's discrete assortativity on a directed mixing matrix; nothing when
// undefined (no edges, or all weight in a single category).
inline std::optional<double> assortativity(const MixingMatrix& m) {
  const std::size_t k = m.categories.size();
  std::vector<double> a(k, 0.0);
  std::vector<double> b(k, 0.0);
  double trace = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      a[i] += m.weight[i][j];
      b[j] += m.weight[i][j];
    }
    trace += m.weight[i][i];
  }
  double total = 0;
  for (double v : a) total += v;
  double ab = 0;
  for (std::size_t i = 0; i < k; ++i) ab += a[i] * b[i];
  // Scaled by total^2: r = (W tr - sum a b) / (W^2 - sum a b).
  const double denom = total * total - ab;
  if (!(total > 0) || !(denom > 0)) return std::nullopt;
  return (total * trace - ab) / denom;
}

inline std::optional<double> assortativity_discrete(const DirectedGraph& g,
                                                    const std::map<std::string, std::string>& labels,
                                                    bool weighted) {
  return assortativity(mixing_matrix(g, labels, weighted));
}

struct NetworkSummary {
  std::string network;
  std::size_t nodes = 0;
  std::size_t links = 0;
};

}  // namespace scilist
