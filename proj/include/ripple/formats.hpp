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

#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "ripple/bytes.hpp"
#include "ripple/model.hpp"

// Binary file formats. All integers and floats are little-endian.
//
// Model (RGNM):
//   "RGNM" u32 version=1 u8 rule u8 aggregator u32 L u32 dims[L+1] f64 epsilon
//   then for l = 1..L, f32 row-major blobs in this order:
//     graph_conv: neigh[d_l x d_{l-1}] bias[d_l]
//     sage:       self[d_l x d_{l-1}] neigh[d_l x d_{l-1}] bias[d_l]
//     gin:        mlp_hidden[d_l x d_{l-1}] mlp_hidden_bias[d_l] mlp_out[d_l x d_l] mlp_out_bias[d_l]
//
// Features (RGNF):  "RGNF" u32 n u32 d, then n*d f32 row-major.
//
// Embedding dump (RGNE):
//   "RGNE" u32 n u32 L u32 dims[L+1], then H[0..L] and X[1..L] as f64 row-major.
//
// Shard dump (RGNI): an index header followed by an RGNE block holding only
// the listed vertices, in list order:
//   "RGNI" u32 total_n u32 worker u32 count u64 ids[count] <RGNE block, n=count>

namespace ripple {

inline constexpr std::uint32_t model_format_version = 1;

namespace detail {

inline void expect_magic(byte_reader& r, std::string_view magic) {
  if (r.remaining() < magic.size() || r.bytes(magic.size()) != magic)
    throw format_error("bad magic, expected " + std::string(magic));
}

inline void write_f32_block(byte_writer& w, std::span<const double> values) {
  for (double v : values)
    w.f32(static_cast<float>(v));
}

inline void read_f32_block(byte_reader& r, std::span<double> values) {
  for (auto& v : values)
    v = static_cast<double>(r.f32());
}

inline std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw error("cannot open " + path);
  return read_all(in);
}

inline void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw error("cannot write " + path);
  write_all(out, bytes);
}

} // namespace detail

inline std::vector<std::uint8_t> encode_model(const model_config& cfg) {
  cfg.validate();
  std::vector<std::uint8_t> bytes;
  byte_writer w(bytes);
  w.bytes("RGNM");
  w.u32(model_format_version);
  w.u8(static_cast<std::uint8_t>(cfg.rule));
  w.u8(static_cast<std::uint8_t>(cfg.aggregator));
  w.u32(static_cast<std::uint32_t>(cfg.num_layers()));
  for (auto d : cfg.dims)
    w.u32(static_cast<std::uint32_t>(d));
  w.f64(cfg.epsilon);
  for (const auto& lw : cfg.layers) {
    switch (cfg.rule) {
    case update_rule::sage:
      detail::write_f32_block(w, lw.self.flat());
      [[fallthrough]];
    case update_rule::graph_conv:
      detail::write_f32_block(w, lw.neigh.flat());
      detail::write_f32_block(w, lw.bias);
      break;
    case update_rule::gin:
      detail::write_f32_block(w, lw.mlp_hidden.flat());
      detail::write_f32_block(w, lw.mlp_hidden_bias);
      detail::write_f32_block(w, lw.mlp_out.flat());
      detail::write_f32_block(w, lw.mlp_out_bias);
      break;
    }
  }
  return bytes;
}

inline model_config decode_model(std::span<const std::uint8_t> bytes) {
  byte_reader r(bytes);
  detail::expect_magic(r, "RGNM");
  if (auto version = r.u32(); version != model_format_version)
    throw format_error("unsupported model version " + std::to_string(version));
  model_config cfg;
  const auto rule = r.u8();
  const auto agg = r.u8();
  if (rule > 2)
    throw format_error("unknown update rule code " + std::to_string(rule));
  if (agg > 2)
    throw format_error("unknown aggregator code " + std::to_string(agg));
  cfg.rule = static_cast<update_rule>(rule);
  cfg.aggregator = static_cast<aggregator_kind>(agg);
  const std::uint32_t layers = r.u32();
  if (layers == 0 || layers > 64)
    throw format_error("implausible layer count " + std::to_string(layers));
  for (std::uint32_t i = 0; i <= layers; ++i)
    cfg.dims.push_back(r.u32());
  cfg.epsilon = r.f64();
  for (std::size_t l = 1; l <= layers; ++l) {
    const std::size_t in = cfg.dims[l - 1], out = cfg.dims[l];
    layer_weights lw;
    auto mat = [&](std::size_t rows, std::size_t cols) {
      if (rows * cols * 4 > r.remaining())
        throw format_error("layer " + std::to_string(l) + " weights truncated");
      matrix m(rows, cols);
      detail::read_f32_block(r, m.flat());
      return m;
    };
    auto vector = [&](std::size_t n) {
      if (n * 4 > r.remaining())
        throw format_error("layer " + std::to_string(l) + " bias truncated");
      vec v(n);
      detail::read_f32_block(r, v);
      return v;
    };
    switch (cfg.rule) {
    case update_rule::sage:
      lw.self = mat(out, in);
      [[fallthrough]];
    case update_rule::graph_conv:
      lw.neigh = mat(out, in);
      lw.bias = vector(out);
      break;
    case update_rule::gin:
      lw.mlp_hidden = mat(out, in);
      lw.mlp_hidden_bias = vector(out);
      lw.mlp_out = mat(out, out);
      lw.mlp_out_bias = vector(out);
      break;
    }
    cfg.layers.push_back(std::move(lw));
  }
  if (!r.done())
    throw format_error(std::to_string(r.remaining()) + " trailing bytes after model weights");
  cfg.validate();
  return cfg;
}

inline void save_model(const std::string& path, const model_config& cfg) {
  detail::write_file(path, encode_model(cfg));
}

inline model_config load_model(const std::string& path) { return decode_model(detail::read_file(path)); }

inline std::vector<std::uint8_t> encode_features(const matrix& features) {
  std::vector<std::uint8_t> bytes;
  byte_writer w(bytes);
  w.bytes("RGNF");
  w.u32(static_cast<std::uint32_t>(features.rows()));
  w.u32(static_cast<std::uint32_t>(features.cols()));
  detail::write_f32_block(w, features.flat());
  return bytes;
}

inline matrix decode_features(std::span<const std::uint8_t> bytes) {
  byte_reader r(bytes);
  detail::expect_magic(r, "RGNF");
  const std::size_t n = r.u32(), d = r.u32();
  if (r.remaining() != n * d * 4)
    throw format_error("feature payload is " + std::to_string(r.remaining()) + " bytes, expected " +
                       std::to_string(n * d * 4));
  matrix m(n, d);
  detail::read_f32_block(r, m.flat());
  return m;
}

inline void save_features(const std::string& path, const matrix& features) {
  detail::write_file(path, encode_features(features));
}

inline matrix load_features(const std::string& path) { return decode_features(detail::read_file(path)); }

namespace detail {

inline void encode_store_body(byte_writer& w, const embedding_store& store) {
  w.bytes("RGNE");
  w.u32(static_cast<std::uint32_t>(store.rows()));
  w.u32(static_cast<std::uint32_t>(store.num_layers()));
  for (const auto& h : store.h)
    w.u32(static_cast<std::uint32_t>(h.cols()));
  for (const auto& h : store.h)
    for (double v : h.flat())
      w.f64(v);
  for (std::size_t l = 1; l < store.x.size(); ++l)
    for (double v : store.x[l].flat())
      w.f64(v);
}

inline embedding_store decode_store_body(byte_reader& r) {
  expect_magic(r, "RGNE");
  const std::size_t n = r.u32();
  const std::size_t layers = r.u32();
  if (layers == 0 || layers > 64)
    throw format_error("implausible layer count " + std::to_string(layers));
  std::vector<std::size_t> dims;
  std::size_t width = 0;
  for (std::size_t l = 0; l <= layers; ++l) {
    dims.push_back(r.u32());
    width += dims.back() * (l == 0 ? 1 : 2);
  }
  if (r.remaining() < n * width * 8)
    throw format_error("embedding payload truncated");
  embedding_store store(n, dims);
  for (auto& h : store.h)
    for (auto& v : h.flat())
      v = r.f64();
  for (std::size_t l = 1; l <= layers; ++l)
    for (auto& v : store.x[l].flat())
      v = r.f64();
  return store;
}

} // namespace detail

inline std::vector<std::uint8_t> encode_embeddings(const embedding_store& store) {
  std::vector<std::uint8_t> bytes;
  byte_writer w(bytes);
  detail::encode_store_body(w, store);
  return bytes;
}

inline embedding_store decode_embeddings(std::span<const std::uint8_t> bytes) {
  byte_reader r(bytes);
  auto store = detail::decode_store_body(r);
  if (!r.done())
    throw format_error("trailing bytes after embedding dump");
  return store;
}

inline void save_embeddings(const std::string& path, const embedding_store& store) {
  detail::write_file(path, encode_embeddings(store));
}

inline embedding_store load_embeddings(const std::string& path) {
  return decode_embeddings(detail::read_file(path));
}

/// Rows of a full store restricted to a vertex subset.
struct embedding_shard {
  std::size_t total_vertices = 0;
  std::uint32_t worker = 0;
  std::vector<vertex_id> ids;
  embedding_store store; // row i holds ids[i]
};

inline embedding_shard extract_shard(const embedding_store& full, std::uint32_t worker,
                                     std::vector<vertex_id> ids) {
  embedding_shard shard;
  shard.total_vertices = full.rows();
  shard.worker = worker;
  std::vector<std::size_t> dims;
  for (const auto& h : full.h)
    dims.push_back(h.cols());
  shard.store = embedding_store(ids.size(), dims);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t l = 0; l < dims.size(); ++l) {
      auto src = full.h[l].row(ids[i]);
      std::copy(src.begin(), src.end(), shard.store.h[l].row(i).begin());
      if (l > 0) {
        auto xs = full.x[l].row(ids[i]);
        std::copy(xs.begin(), xs.end(), shard.store.x[l].row(i).begin());
      }
    }
  }
  shard.ids = std::move(ids);
  return shard;
}

inline std::vector<std::uint8_t> encode_shard(const embedding_shard& shard) {
  std::vector<std::uint8_t> bytes;
  byte_writer w(bytes);
  w.bytes("RGNI");
  w.u32(static_cast<std::uint32_t>(shard.total_vertices));
  w.u32(shard.worker);
  w.u32(static_cast<std::uint32_t>(shard.ids.size()));
  for (auto id : shard.ids)
    w.u64(id);
  detail::encode_store_body(w, shard.store);
  return bytes;
}

inline embedding_shard decode_shard(std::span<const std::uint8_t> bytes) {
  byte_reader r(bytes);
  detail::expect_magic(r, "RGNI");
  embedding_shard shard;
  shard.total_vertices = r.u32();
  shard.worker = r.u32();
  const std::size_t count = r.u32();
  if (count * 8 > r.remaining())
    throw format_error("shard index truncated");
  for (std::size_t i = 0; i < count; ++i) {
    shard.ids.push_back(r.u64());
    if (shard.ids.back() >= shard.total_vertices)
      throw format_error("shard vertex " + std::to_string(shard.ids.back()) + " out of range");
  }
  shard.store = detail::decode_store_body(r);
  if (shard.store.rows() != count)
    throw format_error("shard index lists " + std::to_string(count) + " vertices but block has " +
                       std::to_string(shard.store.rows()));
  if (!r.done())
    throw format_error("trailing bytes after shard");
  return shard;
}

inline void save_shard(const std::string& path, const embedding_shard& shard) {
  detail::write_file(path, encode_shard(shard));
}

inline embedding_shard load_shard(const std::string& path) { return decode_shard(detail::read_file(path)); }

/// Reassembles a full store from shards that together cover every vertex.
inline embedding_store merge_shards(const std::vector<embedding_shard>& shards) {
  if (shards.empty())
    throw format_error("no shards to merge");
  const std::size_t n = shards.front().total_vertices;
  std::vector<std::size_t> dims;
  for (const auto& h : shards.front().store.h)
    dims.push_back(h.cols());
  embedding_store full(n, dims);
  std::vector<bool> seen(n, false);
  for (const auto& shard : shards) {
    if (shard.total_vertices != n)
      throw format_error("shards disagree on vertex count");
    for (std::size_t i = 0; i < shard.ids.size(); ++i) {
      const auto v = shard.ids[i];
      if (seen[v])
        throw format_error("vertex " + std::to_string(v) + " appears in two shards");
      seen[v] = true;
      for (std::size_t l = 0; l < dims.size(); ++l) {
        auto src = shard.store.h[l].row(i);
        std::copy(src.begin(), src.end(), full.h[l].row(v).begin());
        if (l > 0) {
          auto xs = shard.store.x[l].row(i);
          std::copy(xs.begin(), xs.end(), full.x[l].row(v).begin());
        }
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v)
    if (!seen[v])
      throw coverage_error("vertex " + std::to_string(v) + " missing from shards");
  return full;
}

} // namespace ripple
