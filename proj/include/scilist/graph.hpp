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

// Immutable weighted digraph over string node ids. Nodes are kept sorted so
// that every traversal, and everything written from one, is deterministic.

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scilist/error.hpp"
#include "scilist/text.hpp"

namespace scilist {

struct Edge {
  std::size_t src;
  std::size_t dst;
  double weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Arc {
  std::size_t node;  // the other endpoint
  double weight;
};

class DirectedGraph {
 public:
  DirectedGraph() = default;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::string& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<Edge>& edges() const { return edges_; }  // sorted by (src, dst)
  const std::vector<Arc>& out(std::size_t i) const { return out_[i]; }
  const std::vector<Arc>& in(std::size_t i) const { return in_[i]; }

  std::optional<std::size_t> index_of(const std::string& id) const {
    const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
    if (it == nodes_.end() || *it != id) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
  }

  double out_strength(std::size_t i) const {
    double s = 0;
    for (const Arc& a : out_[i]) s += a.weight;
    return s;
  }
  double in_strength(std::size_t i) const {
    double s = 0;
    for (const Arc& a : in_[i]) s += a.weight;
    return s;
  }

  // Subgraph on the given node indices.
  DirectedGraph induced(const std::vector<std::size_t>& keep) const;

  friend bool operator==(const DirectedGraph& a, const DirectedGraph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  friend class GraphBuilder;

  std::vector<std::string> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Arc>> out_;
  std::vector<std::vector<Arc>> in_;
};

enum class ParallelEdges {
  Sum,    // weights of repeated (src, dst) pairs add up
  Unit,   // repeated pairs collapse to one edge of weight 1
};

class GraphBuilder {
 public:
  explicit GraphBuilder(ParallelEdges parallel = ParallelEdges::Sum, bool self_loops = false)
      : parallel_(parallel), self_loops_(self_loops) {}

  void add_node(const std::string& id) { nodes_.insert(id); }

  // Endpoints are added as nodes. Self-loops are dropped unless enabled.
  void add_edge(const std::string& src, const std::string& dst, double weight = 1.0) {
    if (!(weight > 0)) throw Error("edge weight must be positive");
    add_node(src);
    add_node(dst);
    if (src == dst && !self_loops_) return;
    double& w = weights_[{src, dst}];
    w = parallel_ == ParallelEdges::Unit ? 1.0 : w + weight;
  }

  DirectedGraph build() const {
    DirectedGraph g;
    g.nodes_.assign(nodes_.begin(), nodes_.end());
    g.out_.resize(g.nodes_.size());
    g.in_.resize(g.nodes_.size());
    for (const auto& [key, w] : weights_) {
      const std::size_t s = *g.index_of(key.first);
      const std::size_t d = *g.index_of(key.second);
      g.edges_.push_back({s, d, w});
    }
    index(g);
    return g;
  }

  static void index(DirectedGraph& g) {
    std::sort(g.edges_.begin(), g.edges_.end(), [](const Edge& a, const Edge& b) {
      return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
    });
    g.out_.assign(g.nodes_.size(), {});
    g.in_.assign(g.nodes_.size(), {});
    for (const Edge& e : g.edges_) {
      g.out_[e.src].push_back({e.dst, e.weight});
      g.in_[e.dst].push_back({e.src, e.weight});
    }
  }

 private:
  ParallelEdges parallel_;
  bool self_loops_;
  std::set<std::string> nodes_;
  std::map<std::pair<std::string, std::string>, double> weights_;
};

inline DirectedGraph DirectedGraph::induced(const std::vector<std::size_t>& keep) const {
  std::vector<std::size_t> sorted = keep;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::size_t> remap(nodes_.size(), static_cast<std::size_t>(-1));
  DirectedGraph g;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    remap[sorted[i]] = i;
    g.nodes_.push_back(nodes_[sorted[i]]);
  }
  for (const Edge& e : edges_) {
    if (remap[e.src] != static_cast<std::size_t>(-1) && remap[e.dst] != static_cast<std::size_t>(-1)) {
      g.edges_.push_back({remap[e.src], remap[e.dst], e.weight});
    }
  }
  GraphBuilder::index(g);
  return g;
}

// CSV `src,dst,weight` with a header row.
inline void write_edges_csv(const DirectedGraph& g, std::ostream& out) {
  out << "src,dst,weight\n";
  for (const Edge& e : g.edges()) {
    std::ostringstream w;
    w.precision(17);
    w << e.weight;
    out << g.node(e.src) << ',' << g.node(e.dst) << ',' << w.str() << '\n';
  }
}

inline DirectedGraph read_edges_csv(std::istream& in) {
  GraphBuilder b(ParallelEdges::Sum, true);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = text::trim(line);
    if (t.empty() || (lineno == 1 && t.rfind("src,", 0) == 0)) continue;
    const auto c1 = t.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : t.find(',', c1 + 1);
    if (c2 == std::string_view::npos) {
      throw DataError("edge list line " + std::to_string(lineno) + ": expected src,dst,weight");
    }
    double w = 0;
    try {
      w = std::stod(std::string(t.substr(c2 + 1)));
    } catch (const std::exception&) {
      throw DataError("edge list line " + std::to_string(lineno) + ": bad weight");
    }
    if (!(w > 0)) throw DataError("edge list line " + std::to_string(lineno) + ": weight must be positive");
    b.add_edge(std::string(t.substr(0, c1)), std::string(t.substr(c1 + 1, c2 - c1 - 1)), w);
  }
  return b.build();
}

}  // namespace scilist
