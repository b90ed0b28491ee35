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

#include "ripple/formats.hpp"
#include "test_util.hpp"

using namespace ripple;

TEST(ModelFile, RoundTripIsBitwise) {
  for (auto rule : {update_rule::graph_conv, update_rule::sage, update_rule::gin}) {
    auto agg = rule == update_rule::gin ? aggregator_kind::sum : aggregator_kind::mean;
    auto cfg = init_random_model({5, 7, 3}, rule, agg, 11, 0.25);
    auto back = decode_model(encode_model(cfg));
    EXPECT_EQ(back.rule, cfg.rule);
    EXPECT_EQ(back.aggregator, cfg.aggregator);
    EXPECT_EQ(back.dims, cfg.dims);
    EXPECT_EQ(back.epsilon, cfg.epsilon);
    EXPECT_TRUE(back.layers == cfg.layers);
    EXPECT_EQ(encode_model(back), encode_model(cfg));
  }
}

TEST(ModelFile, SaveLoad) {
  testkit::temp_dir dir("model");
  auto cfg = init_random_model({4, 4, 2}, update_rule::graph_conv, aggregator_kind::weighted_sum, 2);
  save_model(dir.file("m.rgnm"), cfg);
  EXPECT_TRUE(load_model(dir.file("m.rgnm")).layers == cfg.layers);
}

TEST(ModelFile, HeaderLayout) {
  auto cfg = init_random_model({2, 3}, update_rule::sage, aggregator_kind::sum, 1, 0.5);
  auto bytes = encode_model(cfg);
  ASSERT_GE(bytes.size(), 4u + 4 + 1 + 1 + 4 + 8 + 8);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "RGNM");
  EXPECT_EQ(bytes[4], 1); // version, little-endian
  EXPECT_EQ(bytes[8], 1); // sage
  EXPECT_EQ(bytes[9], 0); // sum
  EXPECT_EQ(bytes[10], 1); // L
  EXPECT_EQ(bytes[14], 2); // d_0
  EXPECT_EQ(bytes[18], 3); // d_1
  // header 30 bytes, then self 3x2, neigh 3x2, bias 3 as f32
  EXPECT_EQ(bytes.size(), 30u + 4 * (6 + 6 + 3));
}

TEST(ModelFile, ShapeMismatchIsFormatError) {
  auto cfg = init_random_model({4, 4, 2}, update_rule::graph_conv, aggregator_kind::sum, 2);
  auto bytes = encode_model(cfg);
  auto grown = bytes;
  grown[14] = 5; // claim d_0 = 5: blobs no longer line up
  EXPECT_THROW(decode_model(grown), format_error);
  auto truncated = bytes;
  truncated.resize(truncated.size() - 3);
  EXPECT_THROW(decode_model(truncated), format_error);
  auto padded = bytes;
  padded.push_back(0);
  EXPECT_THROW(decode_model(padded), format_error);
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_THROW(decode_model(magic), format_error);
  auto gin_mean = bytes;
  gin_mean[8] = 2;
  gin_mean[9] = 1;
  EXPECT_THROW(decode_model(gin_mean), format_error);
}

TEST(FeatureFile, RoundTrip) {
  matrix f(3, 2, {0.5, 0.25, -1.0, 2.0, 0.125, 3.0});
  auto back = decode_features(encode_features(f));
  EXPECT_EQ(back, f);
  auto bytes = encode_features(f);
  bytes.pop_back();
  EXPECT_THROW(decode_features(bytes), format_error);
}

TEST(EmbeddingDump, RoundTrip) {
  auto g = testkit::random_graph(30, 90, 4);
  auto cfg = init_random_model({3, 5, 2}, update_rule::sage, aggregator_kind::mean, 9);
  auto store = full_layerwise_inference(g, testkit::random_features(30, 3, 5), cfg);
  auto bytes = encode_embeddings(store);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "RGNE");
  EXPECT_EQ(decode_embeddings(bytes), store);
  bytes.resize(bytes.size() - 8);
  EXPECT_THROW(decode_embeddings(bytes), format_error);
}

TEST(EmbeddingShard, ExtractMergeRoundTrip) {
  auto g = testkit::random_graph(25, 60, 8);
  auto cfg = init_random_model({2, 3, 2}, update_rule::graph_conv, aggregator_kind::sum, 1);
  auto store = full_layerwise_inference(g, testkit::random_features(25, 2, 6), cfg);
  std::vector<embedding_shard> shards;
  for (std::uint32_t w = 0; w < 3; ++w) {
    std::vector<vertex_id> ids;
    for (vertex_id v = w; v < 25; v += 3)
      ids.push_back(v);
    shards.push_back(decode_shard(encode_shard(extract_shard(store, w, ids))));
  }
  EXPECT_EQ(merge_shards(shards), store);
  shards.pop_back();
  EXPECT_THROW(merge_shards(shards), coverage_error);
}
