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

// The two input graphs derived from a triple set: the entity graph walked by
// the meta-path encoder, and the Levi graph (relations as nodes) convolved by
// the directional GCN encoder.

#pragma once

#include <Eigen/Dense>
#include <ostream>
#include <string>
#include <vector>

#include "g2t/triple_model.h"

namespace g2t {

struct EntityEdge {
  int source;
  std::string relation;
  int target;
};

struct EntityGraph {
  std::vector<std::string> nodes;  // distinct entity surfaces, creation order
  std::vector<EntityEdge> edges;   // one per triple, input order

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  std::vector<int> InDegrees() const;
  std::vector<int> OutDegrees() const;
};

// A walk v0 -e0-> v1 -e1-> ... through the entity graph. A path with one edge
// and no predecessor on a shortest route is a plain triple.
struct MetaPath {
  std::vector<int> nodes;
  std::vector<int> edges;  // indices into EntityGraph::edges
  Tokens tokens;           // entity and relation tokens interleaved

  friend bool operator==(const MetaPath&, const MetaPath&) = default;
};

struct MetaPathSequence {
  std::vector<MetaPath> paths;
  std::vector<int> boundary_offsets;  // start of each path in the concatenation
  int total_len = 0;

  Tokens Concatenated() const;
};

struct LeviGraph {
  Tokens nodes;
  // out_adj(i, j) = 1 iff there is an edge i -> j; in_adj is its transpose.
  Eigen::MatrixXd out_adj;
  Eigen::MatrixXd in_adj;

  int size() const { return static_cast<int>(nodes.size()); }
};

struct NormalizedAdjacency {
  Eigen::MatrixXd in_norm;
  Eigen::MatrixXd out_norm;
};

EntityGraph BuildEntityGraph(const std::vector<Triple>& triples);

// Shortest directed paths from every zero in-degree node to every reachable
// zero out-degree node, by breadth-first search expanding edges in insertion
// order. Triples on no selected path are appended as one-hop paths. When a
// cycle leaves no source (sink) nodes, the nodes with maximal out-in (in-out)
// degree difference stand in.
MetaPathSequence ComputeMetaPaths(const EntityGraph& g);

// Builds the path token sequence from node and edge indices.
MetaPath MakeMetaPath(const EntityGraph& g, std::vector<int> nodes,
                      std::vector<int> edges);
MetaPathSequence MakeMetaPathSequence(std::vector<MetaPath> paths);

LeviGraph BuildLeviGraph(const std::vector<Triple>& triples);

// D^{-1/2} (A + I) D^{-1/2} with D the row sums of A + I.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
SymmetricNormalize(const Eigen::MatrixBase<Derived>& adj) {
  using Scalar = typename Derived::Scalar;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Mat a_hat = adj + Mat::Identity(adj.rows(), adj.cols());
  auto d_inv_sqrt = a_hat.rowwise().sum().array().rsqrt().matrix();
  return d_inv_sqrt.asDiagonal() * a_hat * d_inv_sqrt.asDiagonal();
}

NormalizedAdjacency NormalizeAdjacency(const LeviGraph& g);

// "src -[label]-> dst" lines.
void DumpEntityGraph(const EntityGraph& g, std::ostream& out);
void DumpLeviGraph(const LeviGraph& g, std::ostream& out);
void DumpMetaPaths(const MetaPathSequence& seq, std::ostream& out);

}  // namespace g2t
