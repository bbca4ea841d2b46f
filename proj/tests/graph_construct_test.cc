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


#include <cmath>
#include <sstream>

#include "doctest.h"
#include "g2t/graph.h"
#include "meta_path_oracle.h"

namespace g2t {
namespace {

// The worked example: a dish, its region, the region's leader and county,
// a dish variation and its ingredient.
std::vector<Triple> WorkedExample() {
  return {{"FOOD-1", "region", "PLACE"},
          {"PLACE", "leaderName", "PERSON"},
          {"PLACE", "county", "COUNTY"},
          {"FOOD-1", "dishVariation", "FOOD-2"},
          {"FOOD-2", "ingredient", "INGREDIENT"}};
}

bool HasEdge(const LeviGraph& g, const std::string& from, const std::string& to) {
  for (int i = 0; i < g.size(); ++i) {
    for (int j = 0; j < g.size(); ++j) {
      if (g.nodes[i] == from && g.nodes[j] == to && g.out_adj(i, j) == 1.0) return true;
    }
  }
  return false;
}

TEST_CASE("entity graph of the worked example") {
  EntityGraph g = BuildEntityGraph(WorkedExample());
  CHECK(g.num_nodes() == 6);
  CHECK(g.edges.size() == 5);
}

TEST_CASE("single triple graph and path") {
  EntityGraph g = BuildEntityGraph({{"a", "r", "b"}});
  CHECK(g.num_nodes() == 2);
  CHECK(g.edges.size() == 1);
  MetaPathSequence seq = ComputeMetaPaths(g);
  REQUIRE(seq.paths.size() == 1);
  CHECK(seq.paths[0].tokens == Tokens{"a", "r", "b"});
  CHECK(seq.boundary_offsets == std::vector<int>{0});
  CHECK(seq.total_len == 3);
}

TEST_CASE("shared subject is one node with out-degree 3") {
  EntityGraph g = BuildEntityGraph({{"hub", "r", "x"}, {"hub", "s", "y"}, {"hub", "t", "z"}});
  CHECK(g.num_nodes() == 4);
  CHECK(g.OutDegrees()[0] == 3);
}

TEST_CASE("worked example yields three meta-paths") {
  MetaPathSequence seq = ComputeMetaPaths(BuildEntityGraph(WorkedExample()));
  REQUIRE(seq.paths.size() == 3);
  CHECK(Join(seq.paths[0].tokens) == "FOOD-1 region PLACE leaderName PERSON");
  CHECK(Join(seq.paths[1].tokens) == "FOOD-1 region PLACE county COUNTY");
  CHECK(Join(seq.paths[2].tokens) == "FOOD-1 dishVariation FOOD-2 ingredient INGREDIENT");
  CHECK(seq.boundary_offsets == std::vector<int>{0, 5, 10});
  CHECK(seq.total_len == 15);
}

TEST_CASE("uncovered triples become one-hop paths") {
  // a -> b -> c plus the shortcut a -> c: the shortest a..c path skips b.
  MetaPathSequence seq =
      ComputeMetaPaths(BuildEntityGraph({{"a", "r", "b"}, {"b", "r", "c"}, {"a", "s", "c"}}));
  REQUIRE(seq.paths.size() == 3);
  CHECK(Join(seq.paths[0].tokens) == "a s c");
  CHECK(Join(seq.paths[1].tokens) == "a r b");
  CHECK(Join(seq.paths[2].tokens) == "b r c");
}

TEST_CASE("cycles fall back to extremal degree nodes") {
  // a -> b -> c -> a and c -> d: d is the only sink; no node has in-degree 0,
  // and c has the largest out - in (2 - 1).
  MetaPathSequence seq = ComputeMetaPaths(
      BuildEntityGraph({{"a", "r", "b"}, {"b", "r", "c"}, {"c", "r", "a"}, {"c", "s", "d"}}));
  REQUIRE(!seq.paths.empty());
  CHECK(Join(seq.paths[0].tokens) == "c s d");
  // Every triple is covered.
  std::vector<bool> covered(4, false);
  for (const auto& p : seq.paths) {
    for (int e : p.edges) covered[e] = true;
  }
  for (bool c : covered) CHECK(c);
}

TEST_CASE("meta-paths match the brute-force oracle on random DAGs") {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    EntityGraph g = BuildEntityGraph(testing::RandomDagTriples(rng, 5, 6));
    CHECK(testing::SameSequence(ComputeMetaPaths(g), testing::OracleMetaPaths(g)));
  }
}

TEST_CASE("meta-path structural invariants") {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    EntityGraph g = BuildEntityGraph(testing::RandomDagTriples(rng, 5, 6));
    MetaPathSequence seq = ComputeMetaPaths(g);
    auto in = g.InDegrees();
    auto out = g.OutDegrees();
    std::vector<bool> covered(g.edges.size(), false);
    int total = 0;
    for (size_t k = 0; k < seq.paths.size(); ++k) {
      const MetaPath& p = seq.paths[k];
      CHECK(seq.boundary_offsets[k] == total);
      total += static_cast<int>(p.tokens.size());
      REQUIRE(p.nodes.size() == p.edges.size() + 1);
      for (size_t i = 0; i < p.edges.size(); ++i) {
        CHECK(g.edges[p.edges[i]].source == p.nodes[i]);
        CHECK(g.edges[p.edges[i]].target == p.nodes[i + 1]);
        covered[p.edges[i]] = true;
      }
      if (p.edges.size() > 1) {
        CHECK(in[p.nodes.front()] == 0);
        CHECK(out[p.nodes.back()] == 0);
      }
    }
    CHECK(total == seq.total_len);
    for (bool c : covered) CHECK(c);
  }
}

TEST_CASE("meta-paths are deterministic") {
  EntityGraph g = BuildEntityGraph(WorkedExample());
  CHECK(testing::SameSequence(ComputeMetaPaths(g), ComputeMetaPaths(g)));
}

TEST_CASE("levi graph connects relations to both endpoints") {
  LeviGraph g = BuildLeviGraph(WorkedExample());
  CHECK(HasEdge(g, "region", "FOOD-1"));
  CHECK(HasEdge(g, "region", "PLACE"));
  CHECK_FALSE(HasEdge(g, "FOOD-1", "region"));
  CHECK(g.size() == 6 + 5);
  CHECK(g.in_adj == g.out_adj.transpose());
}

TEST_CASE("multi-token entities hang their tokens off the root") {
  LeviGraph g = BuildLeviGraph({{"ENTITY-1 FOOD INGREDIENTS", "region", "PLACE"}});
  CHECK(HasEdge(g, "ENTITY-1", "FOOD"));
  CHECK(HasEdge(g, "ENTITY-1", "INGREDIENTS"));
  CHECK(HasEdge(g, "region", "ENTITY-1"));
  CHECK(g.size() == 5);
}

TEST_CASE("single triple levi graph has three nodes and two edges") {
  LeviGraph g = BuildLeviGraph({{"a", "r", "b"}});
  CHECK(g.size() == 3);
  CHECK(g.out_adj.sum() == 2.0);
}

TEST_CASE("levi node count and connectivity") {
  // Roots: a, b, c; extra tokens: "x" of "a x"; relations: 2 (one has an
  // extra token "label").
  std::vector<Triple> triples = {{"a x", "r", "b"}, {"b", "multi label", "c"}};
  LeviGraph g = BuildLeviGraph(triples);
  CHECK(g.size() == 3 + 1 + 2 + 1);
  for (int i = 0; i < g.size(); ++i) {
    CHECK(g.out_adj.row(i).sum() + g.in_adj.row(i).sum() > 0.0);
  }
  CHECK(HasEdge(g, "multi", "label"));
  // Two triples sharing a relation label get separate relation nodes.
  LeviGraph twice = BuildLeviGraph({{"a", "capital", "b"}, {"c", "capital", "d"}});
  CHECK(twice.size() == 6);
}

TEST_CASE("normalize_adjacency of a single node is the identity") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(1, 1);
  CHECK(SymmetricNormalize(a)(0, 0) == 1.0);
}

TEST_CASE("normalize_adjacency hand-computed two-node example") {
  Eigen::MatrixXd a(2, 2);
  a << 0, 1, 0, 0;
  Eigen::MatrixXd n = SymmetricNormalize(a);
  CHECK(n(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(n(0, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(n(1, 0) == 0.0);
  CHECK(n(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("in normalization equals out normalization of the reversed graph") {
  LeviGraph g = BuildLeviGraph(WorkedExample());
  NormalizedAdjacency adj = NormalizeAdjacency(g);
  LeviGraph reversed = g;
  std::swap(reversed.in_adj, reversed.out_adj);
  NormalizedAdjacency radj = NormalizeAdjacency(reversed);
  CHECK((adj.in_norm - radj.out_norm).cwiseAbs().maxCoeff() == 0.0);
  // Reconstruction: D^-1/2 (A + I) D^-1/2.
  Eigen::MatrixXd a_hat = g.out_adj + Eigen::MatrixXd::Identity(g.size(), g.size());
  Eigen::VectorXd d = a_hat.rowwise().sum();
  for (int i = 0; i < g.size(); ++i) {
    for (int j = 0; j < g.size(); ++j) {
      CHECK(adj.out_norm(i, j) ==
            doctest::Approx(a_hat(i, j) / std::sqrt(d(i) * d(j))).epsilon(1e-14));
    }
  }
}

TEST_CASE("graph dumps use the edge-list format") {
  std::ostringstream os;
  DumpEntityGraph(BuildEntityGraph({{"a", "r", "b"}}), os);
  CHECK(os.str() == "a -[r]-> b\n");
}

}  // namespace
}  // namespace g2t
