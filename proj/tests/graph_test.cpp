/*
Copyright (c) 2026 The ripple-gnn Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include <algorithm>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "ripple/graph.hpp"
#include "test_util.hpp"

using namespace ripple;

namespace {

std::vector<vertex_id> ids(std::span<const neighbor> ns) {
  std::vector<vertex_id> out;
  for (const auto& n : ns)
    out.push_back(n.id);
  return out;
}

} // namespace

TEST(DynamicGraph, AddEdgeInsertsBothDirections) {
  dynamic_graph g(3);
  g.add_edge(0, 1, 1.0);
  ASSERT_EQ(g.out_neighbors(0).size(), 1u);
  EXPECT_EQ(g.out_neighbors(0)[0].id, 1u);
  EXPECT_EQ(g.out_neighbors(0)[0].weight, 1.0);
  EXPECT_EQ(g.in_degree(1), 1u);
  EXPECT_EQ(g.num_edges(), 1u);
}

TEST(DynamicGraph, DuplicateEdgeRejected) {
  dynamic_graph g(3);
  g.add_edge(0, 1);
  EXPECT_THROW(g.add_edge(0, 1), duplicate_edge_error);
  EXPECT_EQ(g.num_edges(), 1u);
}

TEST(DynamicGraph, SelfLoopAllowed) {
  dynamic_graph g(3);
  g.add_edge(2, 2, 1.0);
  EXPECT_EQ(g.in_degree(2), 1u);
  EXPECT_EQ(g.out_degree(2), 1u);
}

TEST(DynamicGraph, OutOfRange) {
  dynamic_graph g(3);
  EXPECT_THROW(g.add_edge(0, 3), out_of_range_error);
  EXPECT_THROW(g.add_edge(7, 0), out_of_range_error);
  EXPECT_THROW(g.out_neighbors(3), out_of_range_error);
}

TEST(DynamicGraph, DeleteReturnsWeight) {
  dynamic_graph g(3);
  g.add_edge(0, 1, 2.5);
  EXPECT_EQ(g.delete_edge(0, 1), 2.5);
  EXPECT_EQ(g.in_degree(1), 0u);
  EXPECT_TRUE(g.out_neighbors(0).empty());
}

TEST(DynamicGraph, DeleteMissing) {
  dynamic_graph g(3);
  EXPECT_THROW(g.delete_edge(0, 1), missing_edge_error);
}

TEST(DynamicGraph, AddDeleteAddRoundTrip) {
  dynamic_graph once(3), twice(3);
  once.add_edge(0, 1, 1.0);
  twice.add_edge(0, 1, 1.0);
  twice.delete_edge(0, 1);
  twice.add_edge(0, 1, 1.0);
  EXPECT_EQ(once.num_edges(), twice.num_edges());
  EXPECT_EQ(ids(once.out_neighbors(0)), ids(twice.out_neighbors(0)));
  EXPECT_EQ(ids(once.in_neighbors(1)), ids(twice.in_neighbors(1)));
  EXPECT_TRUE(twice.consistent());
}

TEST(DynamicGraph, OutNeighborsFanOut) {
  // A=0 with out-edges to B=1, C=2, D=3.
  dynamic_graph g(6);
  g.add_edge(0, 1);
  g.add_edge(0, 2);
  g.add_edge(0, 3);
  EXPECT_EQ(ids(g.out_neighbors(0)), (std::vector<vertex_id>{1, 2, 3}));
  EXPECT_TRUE(g.out_neighbors(5).empty());
  g.add_edge(4, 5);
  g.delete_edge(4, 5);
  EXPECT_TRUE(g.out_neighbors(4).empty());
}

TEST(DynamicGraph, InNeighborsAfterAddingEdge) {
  // In(A) = {B, D}; adding C->A makes it {B, C, D}.
  dynamic_graph g(4);
  g.add_edge(1, 0);
  g.add_edge(3, 0);
  g.add_edge(2, 0);
  auto in = ids(g.in_neighbors(0));
  std::sort(in.begin(), in.end());
  EXPECT_EQ(in, (std::vector<vertex_id>{1, 2, 3}));
  EXPECT_TRUE(g.in_neighbors(2).empty());
}

TEST(DynamicGraph, InNeighborsKeepWeights) {
  dynamic_graph g(2);
  g.add_edge(0, 1, 0.5);
  ASSERT_EQ(g.in_neighbors(1).size(), 1u);
  EXPECT_EQ(g.in_neighbors(1)[0].id, 0u);
  EXPECT_EQ(g.in_neighbors(1)[0].weight, 0.5);
}

TEST(DynamicGraph, RandomMutationsKeepMirrorInvariant) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    rng gen(seed);
    const std::size_t n = 1 + gen.below(30);
    dynamic_graph g(n);
    std::set<std::pair<vertex_id, vertex_id>> model;
    for (int step = 0; step < 400; ++step) {
      const vertex_id u = gen.below(n), v = gen.below(n);
      if (model.contains({u, v})) {
        g.delete_edge(u, v);
        model.erase({u, v});
      } else {
        g.add_edge(u, v, gen.uniform(0.0, 1.0));
        model.insert({u, v});
      }
      if (step % 50 == 0) {
        ASSERT_TRUE(g.consistent()) << "seed " << seed << " step " << step;
      }
    }
    ASSERT_TRUE(g.consistent());
    std::size_t in_total = 0;
    for (vertex_id v = 0; v < n; ++v)
      in_total += g.in_degree(v);
    EXPECT_EQ(in_total, g.num_edges());
    EXPECT_EQ(g.num_edges(), model.size());
    for (auto [u, v] : model)
      EXPECT_TRUE(g.has_edge(u, v));
  }
}

TEST(DynamicGraph, AddThenDeleteRestoresQueries) {
  auto g = testkit::random_graph(40, 150, 3, true);
  auto before = g;
  for (vertex_id u = 0; u < 40; u += 7) {
    for (vertex_id v = 0; v < 40; v += 5) {
      if (g.has_edge(u, v))
        continue;
      g.add_edge(u, v, 3.0);
      g.delete_edge(u, v);
    }
  }
  ASSERT_TRUE(g.consistent());
  EXPECT_EQ(g.num_edges(), before.num_edges());
  for (vertex_id u = 0; u < 40; ++u) {
    EXPECT_EQ(g.in_degree(u), before.in_degree(u));
    for (const auto& e : before.out_neighbors(u))
      EXPECT_EQ(g.edge_weight(u, e.id), e.weight);
  }
}

TEST(EdgeList, ParsesEdges) {
  std::istringstream in("0,1\n1,2\n");
  auto g = load_edge_list(in, 3);
  EXPECT_EQ(g.num_vertices(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
}

TEST(EdgeList, ParsesWeightAndHeader) {
  std::istringstream in("# n=5\n# comment\n0,1,0.25\n");
  auto g = load_edge_list(in);
  EXPECT_EQ(g.num_vertices(), 5u);
  EXPECT_EQ(g.edge_weight(0, 1), 0.25);
}

TEST(EdgeList, MalformedLineReportsLine) {
  std::istringstream in("0;1\n");
  try {
    load_edge_list(in, 3);
    FAIL() << "expected parse_error";
  } catch (const parse_error& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(EdgeList, DuplicateReportsLine) {
  std::istringstream in("0,1\n1,2\n0,1\n");
  try {
    load_edge_list(in, 3);
    FAIL() << "expected parse_error";
  } catch (const parse_error& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

TEST(EdgeList, WriteReadRoundTrip) {
  auto g = testkit::random_graph(50, 200, 9, true, 0.05);
  std::stringstream ss;
  write_edge_list(ss, g);
  auto back = load_edge_list(ss);
  ASSERT_EQ(back.num_vertices(), g.num_vertices());
  ASSERT_EQ(back.num_edges(), g.num_edges());
  for (vertex_id u = 0; u < 50; ++u)
    for (const auto& e : g.out_neighbors(u))
      EXPECT_EQ(back.edge_weight(u, e.id), e.weight);
}
