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

// Two-level map equation, a greedy multilevel minimizer for it, the
// condensed community network and word labels for each community.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "scilist/error.hpp"
#include "scilist/graph.hpp"
#include "scilist/netanalysis.hpp"
#include "scilist/parallel.hpp"
#include "scilist/source.hpp"
#include "scilist/text.hpp"

namespace scilist {

inline double plogp(double p) { return p > 0 ? p * std::log2(p) : 0.0; }

// Stationary visit rates (PageRank) and the flow they push along each link:
// f(a, b) = p(a) w(a, b) / w_out(a). Teleportation moves no flow between
// modules. Self-loops carry no flow here since they never leave a module.
struct Flow {
  std::vector<double> node;
  std::vector<Edge> links;  // weight = flow
};

inline Flow compute_flow(const DirectedGraph& g, const PageRankOptions& pr = {}) {
  Flow f;
  f.node = pagerank(g, pr).values;
  std::vector<double> out_w(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) out_w[i] = g.out_strength(i);
  for (const Edge& e : g.edges()) {
    if (e.src != e.dst) f.links.push_back({e.src, e.dst, f.node[e.src] * e.weight / out_w[e.src]});
  }
  return f;
}

// L = q H(Q) + sum_i p_i H(P_i), with module exit rates as both the index
// codebook entries and each module's exit codeword.
inline double map_equation(const Flow& f, const std::vector<std::size_t>& assignment) {
  if (f.node.empty()) throw Error("map_equation: empty graph");
  if (assignment.size() != f.node.size()) throw Error("map_equation: assignment size mismatch");
  std::map<std::size_t, double> exit;
  std::map<std::size_t, double> flow;
  for (std::size_t v = 0; v < f.node.size(); ++v) {
    flow[assignment[v]] += f.node[v];
    exit[assignment[v]] += 0.0;
  }
  for (const Edge& e : f.links) {
    if (assignment[e.src] != assignment[e.dst]) exit[assignment[e.src]] += e.weight;
  }
  double q = 0;
  double exit_log = 0;
  double exit_flow_log = 0;
  for (const auto& [m, x] : exit) {
    q += x;
    exit_log += plogp(x);
    exit_flow_log += plogp(x + flow[m]);
  }
  double node_log = 0;
  for (double p : f.node) node_log += plogp(p);
  return plogp(q) - 2 * exit_log - node_log + exit_flow_log;
}

inline double map_equation(const DirectedGraph& g, const std::vector<std::size_t>& assignment,
                           const PageRankOptions& pr = {}) {
  if (g.empty()) throw Error("map_equation: empty graph");
  return map_equation(compute_flow(g, pr), assignment);
}

struct Partition {
  std::vector<std::size_t> assignment;  // community id per node, ids 0.. by descending size
  double codelength = 0;
  std::uint64_t seed = 0;

  std::size_t community_count() const {
    return assignment.empty() ? 0 : *std::max_element(assignment.begin(), assignment.end()) + 1;
  }
};

namespace communities_detail {

struct Level {
  std::vector<double> flow;
  std::vector<std::vector<std::pair<std::size_t, double>>> out;  // no self-links
  std::vector<std::vector<std::pair<std::size_t, double>>> in;
  std::vector<double> out_total;
};

inline Level base_level(const Flow& f) {
  Level l;
  const std::size_t n = f.node.size();
  l.flow = f.node;
  l.out.resize(n);
  l.in.resize(n);
  l.out_total.assign(n, 0.0);
  for (const Edge& e : f.links) {
    l.out[e.src].push_back({e.dst, e.weight});
    l.in[e.dst].push_back({e.src, e.weight});
    l.out_total[e.src] += e.weight;
  }
  return l;
}

// Collapses `lvl` by `module` (ids dense in [0, k)).
inline Level aggregate(const Level& lvl, const std::vector<std::size_t>& module, std::size_t k) {
  Level a;
  a.flow.assign(k, 0.0);
  a.out.resize(k);
  a.in.resize(k);
  a.out_total.assign(k, 0.0);
  std::map<std::pair<std::size_t, std::size_t>, double> links;
  for (std::size_t v = 0; v < lvl.flow.size(); ++v) {
    a.flow[module[v]] += lvl.flow[v];
    for (const auto& [u, w] : lvl.out[v]) {
      if (module[v] != module[u]) links[{module[v], module[u]}] += w;
    }
  }
  for (const auto& [key, w] : links) {
    a.out[key.first].push_back({key.second, w});
    a.in[key.second].push_back({key.first, w});
    a.out_total[key.first] += w;
  }
  return a;
}

// Renumbers ids to [0, k) in order of first appearance; returns k.
inline std::size_t compact(std::vector<std::size_t>& module) {
  std::map<std::size_t, std::size_t> ids;
  for (auto& m : module) {
    const auto it = ids.emplace(m, ids.size()).first;
    m = it->second;
  }
  return ids.size();
}

// Fisher-Yates with a fixed reduction so the order is identical on every
// standard library.
inline void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(v[i - 1], v[j]);
  }
}

class Mover {
 public:
  Mover(const Level& lvl, std::vector<std::size_t>& module, double node_log)
      : lvl_(lvl), module_(module), node_log_(node_log) {
    const std::size_t n = lvl.flow.size();
    mod_flow_.assign(n, 0.0);
    mod_exit_.assign(n, 0.0);
    members_.assign(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
      mod_flow_[module_[v]] += lvl.flow[v];
      ++members_[module_[v]];
      for (const auto& [u, w] : lvl.out[v]) {
        if (module_[u] != module_[v]) mod_exit_[module_[v]] += w;
      }
    }
    for (std::size_t m = 0; m < n; ++m) {
      if (members_[m] == 0) free_.push_back(m);
    }
    std::reverse(free_.begin(), free_.end());
    refresh();
  }

  double codelength() const {
    return plogp(sum_exit_) - 2 * sum_exit_log_ - node_log_ + sum_exit_flow_log_;
  }

  // One pass over all nodes in random order; returns the number of moves.
  std::size_t sweep(std::mt19937_64& rng) {
    std::vector<std::size_t> order(lvl_.flow.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, rng);
    std::size_t moves = 0;
    for (std::size_t v : order) moves += try_move(v);
    refresh();
    return moves;
  }

 private:
  struct Delta {
    double out_to = 0;
    double in_from = 0;
  };

  bool try_move(std::size_t v) {
    const std::size_t from = module_[v];
    std::map<std::size_t, Delta> nb;
    nb[from];
    for (const auto& [u, w] : lvl_.out[v]) nb[module_[u]].out_to += w;
    for (const auto& [u, w] : lvl_.in[v]) nb[module_[u]].in_from += w;
    if (members_[from] > 1 && !free_.empty()) nb[free_.back()];

    const double p = lvl_.flow[v];
    const double tout = lvl_.out_total[v];
    const Delta& df = nb.at(from);
    const double exit_from = mod_exit_[from] - (tout - df.out_to) + df.in_from;
    const double base = codelength();

    double best = 0;
    std::optional<std::size_t> target;
    double best_exit_to = 0;
    for (const auto& [to, dt] : nb) {
      if (to == from) continue;
      const double exit_to = mod_exit_[to] + (tout - dt.out_to) - dt.in_from;
      const double sum_exit = sum_exit_ - mod_exit_[from] - mod_exit_[to] + exit_from + exit_to;
      const double sum_exit_log = sum_exit_log_ - plogp(mod_exit_[from]) - plogp(mod_exit_[to]) +
                                  plogp(exit_from) + plogp(exit_to);
      const double sum_exit_flow_log =
          sum_exit_flow_log_ - plogp(mod_exit_[from] + mod_flow_[from]) -
          plogp(mod_exit_[to] + mod_flow_[to]) + plogp(exit_from + mod_flow_[from] - p) +
          plogp(exit_to + mod_flow_[to] + p);
      const double delta =
          plogp(sum_exit) - 2 * sum_exit_log - node_log_ + sum_exit_flow_log - base;
      if (delta < best - 1e-14) {
        best = delta;
        target = to;
        best_exit_to = exit_to;
      }
    }
    if (!target || best > -1e-12) return false;
    const std::size_t to = *target;
    account(from, -1.0);
    account(to, -1.0);
    mod_exit_[from] = exit_from;
    mod_flow_[from] -= p;
    mod_exit_[to] = best_exit_to;
    mod_flow_[to] += p;
    module_[v] = to;
    if (--members_[from] == 0) {
      mod_exit_[from] = 0;
      mod_flow_[from] = 0;
      free_.push_back(from);
    }
    if (members_[to]++ == 0) free_.erase(std::find(free_.begin(), free_.end(), to));
    account(from, 1.0);
    account(to, 1.0);
    return true;
  }

  void account(std::size_t m, double sign) {
    sum_exit_ += sign * mod_exit_[m];
    sum_exit_log_ += sign * plogp(mod_exit_[m]);
    sum_exit_flow_log_ += sign * plogp(mod_exit_[m] + mod_flow_[m]);
  }

  // Recomputes the running sums from module totals to shed rounding drift.
  void refresh() {
    sum_exit_ = 0;
    sum_exit_log_ = 0;
    sum_exit_flow_log_ = 0;
    for (std::size_t m = 0; m < mod_exit_.size(); ++m) {
      if (members_[m] == 0) continue;
      sum_exit_ += mod_exit_[m];
      sum_exit_log_ += plogp(mod_exit_[m]);
      sum_exit_flow_log_ += plogp(mod_exit_[m] + mod_flow_[m]);
    }
  }

  const Level& lvl_;
  std::vector<std::size_t>& module_;
  double node_log_;
  std::vector<double> mod_flow_;
  std::vector<double> mod_exit_;
  std::vector<std::size_t> members_;
  std::vector<std::size_t> free_;
  double sum_exit_ = 0;
  double sum_exit_log_ = 0;
  double sum_exit_flow_log_ = 0;
};

inline bool local_moves(const Level& lvl, std::vector<std::size_t>& module, double node_log,
                        std::mt19937_64& rng, std::size_t max_sweeps = 100) {
  Mover mover(lvl, module, node_log);
  bool any = false;
  for (std::size_t s = 0; s < max_sweeps; ++s) {
    if (mover.sweep(rng) == 0) break;
    any = true;
  }
  return any;
}

inline double level_codelength(const Level& lvl, std::vector<std::size_t> module, double node_log) {
  return Mover(lvl, module, node_log).codelength();
}

// Alternates single-node moves and module merges from `assign` until the
// codelength stops falling.
inline void optimize(const Level& base, std::vector<std::size_t>& assign, double node_log,
                     std::mt19937_64& rng) {
  compact(assign);
  double prev = level_codelength(base, assign, node_log);
  for (int round = 0; round < 50; ++round) {
    local_moves(base, assign, node_log, rng);
    std::size_t k = compact(assign);
    while (true) {
      const Level lvl = aggregate(base, assign, k);
      std::vector<std::size_t> mods(k);
      std::iota(mods.begin(), mods.end(), 0);
      if (!local_moves(lvl, mods, node_log, rng)) break;
      for (auto& a : assign) a = mods[a];
      k = compact(assign);
    }
    const double now = level_codelength(base, assign, node_log);
    if (now >= prev - 1e-10) break;
    prev = now;
  }
}

// The level restricted to `members`, keeping only links among them.
inline Level subset_level(const Level& base, const std::vector<std::size_t>& members) {
  std::map<std::size_t, std::size_t> local;
  for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = i;
  Level l;
  l.flow.resize(members.size());
  l.out.resize(members.size());
  l.in.resize(members.size());
  l.out_total.assign(members.size(), 0.0);
  for (std::size_t i = 0; i < members.size(); ++i) {
    l.flow[i] = base.flow[members[i]];
    for (const auto& [u, w] : base.out[members[i]]) {
      const auto it = local.find(u);
      if (it == local.end()) continue;
      l.out[i].push_back({it->second, w});
      l.in[it->second].push_back({i, w});
      l.out_total[i] += w;
    }
  }
  return l;
}

// Splits every module into submodules found inside it, then lets those
// submodules move between modules as units.
inline void coarse_tune(const Level& base, std::vector<std::size_t>& assign, double node_log,
                        std::mt19937_64& rng) {
  const std::size_t k = compact(assign);
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t v = 0; v < assign.size(); ++v) members[assign[v]].push_back(v);
  std::vector<std::size_t> sub(assign.size());
  std::vector<std::size_t> home;
  for (std::size_t m = 0; m < k; ++m) {
    const Level lvl = subset_level(base, members[m]);
    double sub_log = 0;
    for (double p : lvl.flow) sub_log += plogp(p);
    std::vector<std::size_t> sa(members[m].size());
    std::iota(sa.begin(), sa.end(), 0);
    optimize(lvl, sa, sub_log, rng);
    const std::size_t parts = compact(sa);
    for (std::size_t i = 0; i < sa.size(); ++i) sub[members[m][i]] = home.size() + sa[i];
    home.insert(home.end(), parts, m);
  }
  const Level lvl = aggregate(base, sub, home.size());
  local_moves(lvl, home, node_log, rng);
  for (std::size_t v = 0; v < assign.size(); ++v) assign[v] = home[sub[v]];
  compact(assign);
}

// One seeded search: bottom-up from singletons and top-down from a single
// module, keeping the better, then refined by repeated coarse tuning.
inline std::vector<std::size_t> one_trial(const Flow& f, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Level base = base_level(f);
  double node_log = 0;
  for (double p : f.node) node_log += plogp(p);
  const std::size_t n = f.node.size();
  std::vector<std::size_t> assign(n);
  std::iota(assign.begin(), assign.end(), 0);
  optimize(base, assign, node_log, rng);
  std::vector<std::size_t> top(n, 0);
  optimize(base, top, node_log, rng);
  double best = level_codelength(base, assign, node_log);
  if (const double l = level_codelength(base, top, node_log); l < best - 1e-12) {
    assign = top;
    best = l;
  }
  for (int round = 0; round < 20; ++round) {
    std::vector<std::size_t> next = assign;
    coarse_tune(base, next, node_log, rng);
    optimize(base, next, node_log, rng);
    const double l = level_codelength(base, next, node_log);
    if (l >= best - 1e-10) break;
    assign = std::move(next);
    best = l;
  }
  return assign;
}

// Community ids by descending size, ties by smallest member.
inline void renumber_by_size(std::vector<std::size_t>& assign) {
  std::map<std::size_t, std::pair<std::size_t, std::size_t>> info;  // id -> (size, first)
  for (std::size_t v = 0; v < assign.size(); ++v) {
    auto [it, fresh] = info.emplace(assign[v], std::pair<std::size_t, std::size_t>{0, v});
    ++it->second.first;
  }
  std::vector<std::pair<std::size_t, std::pair<std::size_t, std::size_t>>> order(info.begin(), info.end());
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second.first != b.second.first) return a.second.first > b.second.first;
    return a.second.second < b.second.second;
  });
  std::map<std::size_t, std::size_t> newid;
  for (std::size_t i = 0; i < order.size(); ++i) newid[order[i].first] = i;
  for (auto& a : assign) a = newid[a];
}

}  // namespace communities_detail

struct DetectOptions {
  std::uint64_t seed = 1;
  std::size_t trials = 10;
  std::size_t workers = 1;
  PageRankOptions pagerank{};
};

// Best of `trials` greedy multilevel searches (trial t seeded with seed + t),
// also weighed against the one-module solution. Ties go to the earliest trial.
inline Partition detect_communities(const DirectedGraph& g, const DetectOptions& opts = {}) {
  using namespace communities_detail;
  if (g.empty()) throw Error("detect_communities: empty graph");
  const Flow f = compute_flow(g, opts.pagerank);
  const std::size_t trials = std::max<std::size_t>(1, opts.trials);
  std::vector<std::vector<std::size_t>> found(trials);
  std::vector<double> lengths(trials);
  parallel_for(trials, opts.workers, [&](std::size_t t) {
    found[t] = one_trial(f, opts.seed + t);
    lengths[t] = map_equation(f, found[t]);
  });
  Partition best;
  best.seed = opts.seed;
  best.assignment.assign(g.node_count(), 0);
  best.codelength = map_equation(f, best.assignment);
  for (std::size_t t = 0; t < trials; ++t) {
    if (lengths[t] < best.codelength - 1e-12) {
      best.assignment = found[t];
      best.codelength = lengths[t];
    }
  }
  renumber_by_size(best.assignment);
  best.codelength = map_equation(f, best.assignment);
  return best;
}

// ---------------------------------------------------------------------------
// Community network

struct CommunityLink {
  std::size_t a;  // a < b
  std::size_t b;
  double weight;
  bool retained = false;
};

struct CommunityNetwork {
  std::vector<std::size_t> communities;  // ids with at least min_size members
  std::vector<std::size_t> sizes;        // parallel to communities
  std::vector<CommunityLink> links;      // by descending weight, then (a, b)
  std::size_t retained = 0;              // prefix length of `links` kept
  bool connected = true;                 // false: even all links leave pieces apart
};

inline constexpr std::size_t kDefaultMinCommunitySize = 10;

// Keeps the shortest descending-weight prefix of inter-community links that
// connects every kept community (or, failing that, reaches the fewest
// pieces the full link set allows).
inline CommunityNetwork community_network(const DirectedGraph& g, const Partition& p,
                                          std::size_t min_size = kDefaultMinCommunitySize) {
  CommunityNetwork net;
  std::map<std::size_t, std::size_t> size;
  for (std::size_t c : p.assignment) ++size[c];
  std::map<std::size_t, std::size_t> pos;
  for (const auto& [c, s] : size) {
    if (s >= min_size) {
      pos[c] = net.communities.size();
      net.communities.push_back(c);
      net.sizes.push_back(s);
    }
  }
  std::map<std::pair<std::size_t, std::size_t>, double> w;
  for (const Edge& e : g.edges()) {
    const std::size_t ca = p.assignment[e.src];
    const std::size_t cb = p.assignment[e.dst];
    if (ca == cb || !pos.count(ca) || !pos.count(cb)) continue;
    w[{std::min(ca, cb), std::max(ca, cb)}] += e.weight;
  }
  for (const auto& [key, weight] : w) net.links.push_back({key.first, key.second, weight, false});
  std::stable_sort(net.links.begin(), net.links.end(),
                   [](const auto& x, const auto& y) { return x.weight > y.weight; });

  std::vector<std::size_t> parent(net.communities.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t pieces = net.communities.size();
  std::vector<std::size_t> pieces_after(net.links.size());
  for (std::size_t i = 0; i < net.links.size(); ++i) {
    const std::size_t ra = find(pos.at(net.links[i].a));
    const std::size_t rb = find(pos.at(net.links[i].b));
    if (ra != rb) {
      parent[std::max(ra, rb)] = std::min(ra, rb);
      --pieces;
    }
    pieces_after[i] = pieces;
  }
  const std::size_t final_pieces = pieces;
  net.connected = final_pieces <= 1;
  if (net.communities.size() > 1) {
    std::size_t keep = 0;
    while (keep < net.links.size() && pieces_after[keep] != final_pieces) ++keep;
    net.retained = net.links.empty() ? 0 : keep + 1;
  }
  for (std::size_t i = 0; i < net.retained; ++i) net.links[i].retained = true;
  return net;
}

// ---------------------------------------------------------------------------
// Labels

inline const std::set<std::string>& label_stop_words() {
  static const std::set<std::string> s = {"a",  "and", "of",   "the", "in", "at",  "to",  "i",
                                          "for", "your", "on", "are", "my", "own", "with"};
  return s;
}

struct CommunitySummary {
  std::size_t community_id = 0;
  std::size_t size = 0;
  std::vector<std::string> label_words;
  std::vector<std::pair<std::string, double>> top_members;  // (user_id, pagerank)
};

// Top `words` description words per community (stop words removed, ties
// lexicographic) and the `top` members by PageRank on `g`.
inline std::vector<CommunitySummary> label_and_rank(const DirectedGraph& g, const Partition& p,
                                                    const std::map<std::string, UserProfile>& profiles,
                                                    const CentralityVector& pr,
                                                    std::size_t words = 5, std::size_t top = 3) {
  std::vector<CommunitySummary> out(p.community_count());
  std::vector<std::map<std::string, std::int64_t>> counts(out.size());
  std::vector<std::vector<std::size_t>> members(out.size());
  for (std::size_t v = 0; v < p.assignment.size(); ++v) {
    const std::size_t c = p.assignment[v];
    members[c].push_back(v);
    const auto it = profiles.find(g.node(v));
    if (it == profiles.end()) continue;
    for (const auto& tok : text::tokenize(it->second.description)) {
      if (!label_stop_words().count(tok.folded)) ++counts[c][tok.folded];
    }
  }
  for (std::size_t c = 0; c < out.size(); ++c) {
    CommunitySummary& s = out[c];
    s.community_id = c;
    s.size = members[c].size();
    std::vector<std::pair<std::string, std::int64_t>> ranked(counts[c].begin(), counts[c].end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (std::size_t i = 0; i < std::min(words, ranked.size()); ++i) s.label_words.push_back(ranked[i].first);
    auto& m = members[c];
    std::stable_sort(m.begin(), m.end(), [&](std::size_t a, std::size_t b) {
      return pr.values[a] > pr.values[b];
    });
    for (std::size_t i = 0; i < std::min(top, m.size()); ++i) {
      s.top_members.push_back({g.node(m[i]), pr.values[m[i]]});
    }
  }
  return out;
}

}  // namespace scilist
