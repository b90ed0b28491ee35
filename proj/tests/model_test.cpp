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

#include <gtest/gtest.h>

#include "ripple/model.hpp"
#include "test_util.hpp"

using namespace ripple;

namespace {

/// Model whose every weight matrix is the identity and every bias zero.
model_config identity_model(update_rule rule, aggregator_kind agg, std::size_t dim, std::size_t layers,
                            double eps = 0.0) {
  model_config cfg;
  cfg.rule = rule;
  cfg.aggregator = agg;
  cfg.epsilon = eps;
  cfg.dims.assign(layers + 1, dim);
  for (std::size_t l = 0; l < layers; ++l) {
    layer_weights w;
    if (rule == update_rule::gin) {
      w.mlp_hidden = matrix::identity(dim);
      w.mlp_hidden_bias = vec(dim, 0.0);
      w.mlp_out = matrix::identity(dim);
      w.mlp_out_bias = vec(dim, 0.0);
    } else {
      w.neigh = matrix::identity(dim);
      w.bias = vec(dim, 0.0);
      if (rule == update_rule::sage)
        w.self = matrix::identity(dim);
    }
    cfg.layers.push_back(std::move(w));
  }
  cfg.validate();
  return cfg;
}

} // namespace

TEST(UpdateFn, GraphConvHiddenLayerApplyRelu) {
  auto cfg = identity_model(update_rule::graph_conv, aggregator_kind::sum, 2, 2);
  EXPECT_EQ(update_fn(vec{9, 9}, vec{-1, 2}, 1, cfg), (vec{0, 2}));
}

TEST(UpdateFn, SageFinalLayer) {
  auto cfg = identity_model(update_rule::sage, aggregator_kind::sum, 2, 1);
  EXPECT_EQ(update_fn(vec{1, 0}, vec{0, 1}, 1, cfg), (vec{1, 1}));
}

TEST(UpdateFn, GinIdentityMlp) {
  auto cfg = identity_model(update_rule::gin, aggregator_kind::sum, 1, 1, 0.0);
  EXPECT_EQ(update_fn(vec{1}, vec{2}, 1, cfg), (vec{3}));
}

TEST(UpdateFn, GinEpsilonScalesSelf) {
  auto cfg = identity_model(update_rule::gin, aggregator_kind::sum, 1, 1, 0.5);
  EXPECT_EQ(update_fn(vec{2}, vec{1}, 1, cfg), (vec{4}));
}

TEST(UpdateFn, DimMismatch) {
  auto cfg = identity_model(update_rule::graph_conv, aggregator_kind::sum, 2, 1);
  EXPECT_THROW(update_fn(vec{1, 2}, vec{1, 2, 3}, 1, cfg), dim_mismatch_error);
}

TEST(ModelConfig, GinRequiresSum) {
  auto cfg = identity_model(update_rule::gin, aggregator_kind::sum, 2, 1);
  cfg.aggregator = aggregator_kind::mean;
  EXPECT_THROW(cfg.validate(), format_error);
}

TEST(ModelConfig, ShapeChecked) {
  auto cfg = identity_model(update_rule::sage, aggregator_kind::sum, 2, 2);
  cfg.layers[1].self = matrix(3, 2);
  EXPECT_THROW(cfg.validate(), format_error);
}

TEST(FullInference, TwoVertexHandEvaluation) {
  // u=0 -> v=1, one final layer with W=I, b=0: H1[u] = 0, H1[v] = x_u.
  dynamic_graph g(2);
  g.add_edge(0, 1);
  matrix features(2, 1, {1.0, 2.0});
  auto cfg = identity_model(update_rule::graph_conv, aggregator_kind::sum, 1, 1);
  auto store = full_layerwise_inference(g, features, cfg);
  EXPECT_EQ(store.h[1].row(0)[0], 0.0);
  EXPECT_EQ(store.h[1].row(1)[0], 1.0);
  EXPECT_EQ(store.x[1].row(1)[0], 1.0);
}

TEST(FullInference, EmptyEdgeSetLeavesAggregatesZero) {
  dynamic_graph g(4);
  auto features = testkit::random_features(4, 3, 1);
  auto cfg = init_random_model({3, 4, 2}, update_rule::sage, aggregator_kind::sum, 7);
  auto store = full_layerwise_inference(g, features, cfg);
  for (std::size_t l = 1; l <= 2; ++l)
    for (double v : store.x[l].flat())
      EXPECT_EQ(v, 0.0);
  for (vertex_id v = 0; v < 4; ++v) {
    const vec zero(3, 0.0);
    const vec h1 = update_fn(features.row(v), zero, 1, cfg);
    for (std::size_t j = 0; j < h1.size(); ++j)
      EXPECT_EQ(store.h[1].row(v)[j], h1[j]);
  }
}

TEST(FullInference, MeanWithNoInEdgesIsZeroAggregate) {
  dynamic_graph g(3);
  g.add_edge(0, 1);
  auto cfg = identity_model(update_rule::graph_conv, aggregator_kind::mean, 2, 1);
  auto store = full_layerwise_inference(g, testkit::random_features(3, 2, 4), cfg);
  EXPECT_EQ(store.h[1].row(2)[0], 0.0);
  EXPECT_EQ(store.h[1].row(2)[1], 0.0);
}

TEST(FullInference, MeanDividesByInDegree) {
  dynamic_graph g(3);
  g.add_edge(0, 2);
  g.add_edge(1, 2);
  matrix features(3, 1, {2.0, 4.0, 100.0});
  auto cfg = identity_model(update_rule::graph_conv, aggregator_kind::mean, 1, 1);
  auto store = full_layerwise_inference(g, features, cfg);
  EXPECT_EQ(store.x[1].row(2)[0], 6.0);
  EXPECT_EQ(store.h[1].row(2)[0], 3.0);
}

TEST(FullInference, FeatureShapeChecked) {
  dynamic_graph g(3);
  auto cfg = identity_model(update_rule::graph_conv, aggregator_kind::sum, 2, 1);
  EXPECT_THROW(full_layerwise_inference(g, matrix(2, 2), cfg), dim_mismatch_error);
  EXPECT_THROW(full_layerwise_inference(g, matrix(3, 3), cfg), dim_mismatch_error);
}

TEST(VertexWise, DepthZeroReturnsFeatures) {
  auto g = testkit::random_graph(10, 30, 1);
  auto features = testkit::random_features(10, 3, 2);
  auto cfg = init_random_model({3, 4, 2}, update_rule::graph_conv, aggregator_kind::sum, 3);
  auto h = vertex_wise_inference(g, features, cfg, 4, 0);
  EXPECT_EQ(h, vec(features.row(4).begin(), features.row(4).end()));
}

TEST(VertexWise, StarCenterSumsLeaves) {
  const std::size_t k = 12;
  dynamic_graph g(k + 1);
  for (vertex_id leaf = 1; leaf <= k; ++leaf)
    g.add_edge(leaf, 0);
  auto features = testkit::random_features(k + 1, 3, 8);
  auto cfg = identity_model(update_rule::graph_conv, aggregator_kind::sum, 3, 1);
  auto h = vertex_wise_inference(g, features, cfg, 0);
  for (std::size_t j = 0; j < 3; ++j) {
    double expected = 0.0;
    for (vertex_id leaf = 1; leaf <= k; ++leaf)
      expected += features(leaf, j);
    EXPECT_NEAR(h[j], expected, 1e-12);
  }
}

struct workload {
  update_rule rule;
  aggregator_kind agg;
  bool weighted;
};

class OracleAgreement : public ::testing::TestWithParam<workload> {};

TEST_P(OracleAgreement, VertexWiseMatchesLayerWise) {
  const auto w = GetParam();
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    rng gen(seed * 31);
    const std::size_t n = 20 + gen.below(180);
    const std::size_t layers = 1 + gen.below(3);
    auto g = testkit::random_graph(n, n * 2, seed, w.weighted, 0.02);
    auto features = testkit::random_features(n, 4, seed + 100);
    std::vector<std::size_t> dims{4};
    for (std::size_t l = 0; l < layers; ++l)
      dims.push_back(3 + gen.below(3));
    auto cfg = init_random_model(dims, w.rule, w.agg, seed, 0.1);
    auto store = full_layerwise_inference(g, features, cfg);
    double worst = 0.0;
    for (vertex_id v = 0; v < n; ++v)
      worst = std::max(worst, max_abs_diff(vertex_wise_inference(g, features, cfg, v), store.h[layers].row(v)));
    EXPECT_LE(worst, 1e-9) << "seed " << seed;
  }
}

INSTANTIATE_TEST_SUITE_P(Workloads, OracleAgreement,
                         ::testing::Values(workload{update_rule::graph_conv, aggregator_kind::sum, false},
                                           workload{update_rule::sage, aggregator_kind::sum, false},
                                           workload{update_rule::graph_conv, aggregator_kind::mean, false},
                                           workload{update_rule::gin, aggregator_kind::sum, false},
                                           workload{update_rule::graph_conv, aggregator_kind::weighted_sum, true},
                                           workload{update_rule::sage, aggregator_kind::mean, false}));

TEST(Labels, ArgmaxOfFinalLayer) {
  embedding_store store(2, {1, 2});
  store.h[1].row(0)[0] = 0.1;
  store.h[1].row(0)[1] = 0.9;
  store.h[1].row(1)[0] = 0.5;
  store.h[1].row(1)[1] = 0.5;
  std::vector<vertex_id> vs{0, 1};
  auto labels = predict_labels(store, vs);
  EXPECT_EQ(labels.at(0), 1u);
  EXPECT_EQ(labels.at(1), 0u);
}

TEST(RandomModel, SeedDeterminism) {
  auto a = init_random_model({8, 6, 4}, update_rule::sage, aggregator_kind::mean, 42);
  auto b = init_random_model({8, 6, 4}, update_rule::sage, aggregator_kind::mean, 42);
  auto c = init_random_model({8, 6, 4}, update_rule::sage, aggregator_kind::mean, 43);
  EXPECT_TRUE(a.layers == b.layers);
  EXPECT_FALSE(a.layers == c.layers);
  for (const auto& l : a.layers)
    for (double v : l.self.flat()) {
      EXPECT_GE(v, -0.5);
      EXPECT_LE(v, 0.5);
    }
}
