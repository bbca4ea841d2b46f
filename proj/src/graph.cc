// Copyright 2026 The g2t Authors.
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

#include "g2t/graph.h"

#include <algorithm>
#include <climits>
#include <deque>
#include <stdexcept>
#include <unordered_map>

namespace g2t {
namespace {

// Splits on single spaces without case folding; masked entity tokens are
// upper-case.
Tokens Split(const std::string& s) {
  Tokens out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Nodes standing in for sources (sign = +1) or sinks (sign = -1) when none
// exist: maximal sign * (out - in), creation order.
std::vector<int> Extremal(const std::vector<int>& in, const std::vector<int>& out,
                          int sign) {
  int best = INT_MIN;
  for (size_t v = 0; v < in.size(); ++v) best = std::max(best, sign * (out[v] - in[v]));
  std::vector<int> nodes;
  for (size_t v = 0; v < in.size(); ++v) {
    if (sign * (out[v] - in[v]) == best) nodes.push_back(static_cast<int>(v));
  }
  return nodes;
}

}  // namespace

std::vector<int> EntityGraph::InDegrees() const {
  std::vector<int> deg(nodes.size(), 0);
  for (const auto& e : edges) {
    if (e.source != e.target) ++deg[e.target];
  }
  return deg;
}

std::vector<int> EntityGraph::OutDegrees() const {
  std::vector<int> deg(nodes.size(), 0);
  for (const auto& e : edges) {
    if (e.source != e.target) ++deg[e.source];
  }
  return deg;
}

Tokens MetaPathSequence::Concatenated() const {
  Tokens out;
  out.reserve(total_len);
  for (const auto& p : paths) out.insert(out.end(), p.tokens.begin(), p.tokens.end());
  return out;
}

EntityGraph BuildEntityGraph(const std::vector<Triple>& triples) {
  if (triples.empty()) throw std::invalid_argument("entity graph needs at least one triple");
  EntityGraph g;
  std::unordered_map<std::string, int> index;
  auto node = [&](const std::string& s) {
    auto [it, inserted] = index.emplace(s, g.num_nodes());
    if (inserted) g.nodes.push_back(s);
    return it->second;
  };
  for (const auto& t : triples) {
    int s = node(t.subject);
    int o = node(t.object);
    g.edges.push_back({s, t.relation, o});
  }
  return g;
}

MetaPath MakeMetaPath(const EntityGraph& g, std::vector<int> nodes,
                      std::vector<int> edges) {
  MetaPath p;
  for (size_t i = 0; i < nodes.size(); ++i) {
    Tokens ent = Split(g.nodes[nodes[i]]);
    p.tokens.insert(p.tokens.end(), ent.begin(), ent.end());
    if (i < edges.size()) {
      Tokens rel = Split(g.edges[edges[i]].relation);
      p.tokens.insert(p.tokens.end(), rel.begin(), rel.end());
    }
  }
  p.nodes = std::move(nodes);
  p.edges = std::move(edges);
  return p;
}

MetaPathSequence MakeMetaPathSequence(std::vector<MetaPath> paths) {
  MetaPathSequence seq;
  seq.paths = std::move(paths);
  for (const auto& p : seq.paths) {
    seq.boundary_offsets.push_back(seq.total_len);
    seq.total_len += static_cast<int>(p.tokens.size());
  }
  return seq;
}

MetaPathSequence ComputeMetaPaths(const EntityGraph& g) {
  const int n = g.num_nodes();
  if (n == 0) throw std::invalid_argument("meta-paths of an empty graph");
  auto in = g.InDegrees();
  auto out = g.OutDegrees();

  std::vector<int> sources, sinks;
  for (int v = 0; v < n; ++v) {
    if (in[v] == 0) sources.push_back(v);
    if (out[v] == 0) sinks.push_back(v);
  }
  if (sources.empty()) sources = Extremal(in, out, +1);
  if (sinks.empty()) sinks = Extremal(in, out, -1);

  std::vector<std::vector<int>> adjacency(n);  // edge ids, insertion order
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
    if (g.edges[e].source != g.edges[e].target) {
      adjacency[g.edges[e].source].push_back(e);
    }
  }

  std::vector<MetaPath> paths;
  std::vector<bool> covered(g.edges.size(), false);
  for (int src : sources) {
    // parent_edge[v] = edge through which v was first discovered.
    std::vector<int> parent_edge(n, -1);
    std::vector<bool> seen(n, false);
    std::deque<int> queue{src};
    seen[src] = true;
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (int e : adjacency[u]) {
        int v = g.edges[e].target;
        if (seen[v]) continue;
        seen[v] = true;
        parent_edge[v] = e;
        queue.push_back(v);
      }
    }
    for (int dst : sinks) {
      if (dst == src || !seen[dst]) continue;
      std::vector<int> nodes{dst}, edges;
      for (int v = dst; v != src;) {
        int e = parent_edge[v];
        edges.push_back(e);
        v = g.edges[e].source;
        nodes.push_back(v);
      }
      std::reverse(nodes.begin(), nodes.end());
      std::reverse(edges.begin(), edges.end());
      for (int e : edges) covered[e] = true;
      paths.push_back(MakeMetaPath(g, std::move(nodes), std::move(edges)));
    }
  }
  for (int e = 0; e < static_cast<int>(g.edges.size()); ++e) {
    if (!covered[e]) {
      paths.push_back(MakeMetaPath(g, {g.edges[e].source, g.edges[e].target}, {e}));
    }
  }
  return MakeMetaPathSequence(std::move(paths));
}

LeviGraph BuildLeviGraph(const std::vector<Triple>& triples) {
  if (triples.empty()) throw std::invalid_argument("Levi graph needs at least one triple");
  LeviGraph g;
  std::vector<std::pair<int, int>> edges;
  std::unordered_map<std::string, int> entity_root;

  // Root node for the first token, one child per remaining token.
  auto add_group = [&](const std::string& text) {
    Tokens toks = Split(text);
    int root = g.size();
    g.nodes.push_back(toks.front());
    for (size_t i = 1; i < toks.size(); ++i) {
      edges.emplace_back(root, g.size());
      g.nodes.push_back(toks[i]);
    }
    return root;
  };
  auto entity = [&](const std::string& s) {
    auto it = entity_root.find(s);
    if (it != entity_root.end()) return it->second;
    int root = add_group(s);
    entity_root.emplace(s, root);
    return root;
  };

  for (const auto& t : triples) {
    int s = entity(t.subject);
    int r = add_group(t.relation);
    int o = entity(t.object);
    edges.emplace_back(r, s);
    edges.emplace_back(r, o);
  }

  g.out_adj = Eigen::MatrixXd::Zero(g.size(), g.size());
  for (auto [a, b] : edges) g.out_adj(a, b) = 1.0;
  g.in_adj = g.out_adj.transpose();
  return g;
}

NormalizedAdjacency NormalizeAdjacency(const LeviGraph& g) {
  return {SymmetricNormalize(g.in_adj), SymmetricNormalize(g.out_adj)};
}

void DumpEntityGraph(const EntityGraph& g, std::ostream& out) {
  for (const auto& e : g.edges) {
    out << g.nodes[e.source] << " -[" << e.relation << "]-> " << g.nodes[e.target] << "\n";
  }
}

void DumpLeviGraph(const LeviGraph& g, std::ostream& out) {
  for (int i = 0; i < g.size(); ++i) {
    for (int j = 0; j < g.size(); ++j) {
      if (g.out_adj(i, j) != 0.0) {
        out << i << ":" << g.nodes[i] << " -[]-> " << j << ":" << g.nodes[j] << "\n";
      }
    }
  }
}

void DumpMetaPaths(const MetaPathSequence& seq, std::ostream& out) {
  for (const auto& p : seq.paths) out << Join(p.tokens) << "\n";
}

}  // namespace g2t
