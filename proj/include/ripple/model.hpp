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

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ripple/error.hpp"
#include "ripple/graph.hpp"
#include "ripple/linalg.hpp"
#include "ripple/parallel.hpp"
#include "ripple/random.hpp"

namespace ripple {

enum class aggregator_kind : std::uint8_t { sum = 0, mean = 1, weighted_sum = 2 };

enum class update_rule : std::uint8_t { graph_conv = 0, sage = 1, gin = 2 };

inline std::string to_string(aggregator_kind k) {
  switch (k) {
  case aggregator_kind::sum: return "sum";
  case aggregator_kind::mean: return "mean";
  case aggregator_kind::weighted_sum: return "wsum";
  }
  return "?";
}

inline std::string to_string(update_rule r) {
  switch (r) {
  case update_rule::graph_conv: return "gc";
  case update_rule::sage: return "sage";
  case update_rule::gin: return "gin";
  }
  return "?";
}

inline aggregator_kind parse_aggregator(const std::string& s) {
  if (s == "sum") return aggregator_kind::sum;
  if (s == "mean") return aggregator_kind::mean;
  if (s == "wsum" || s == "weighted_sum") return aggregator_kind::weighted_sum;
  throw format_error("unknown aggregator '" + s + "'");
}

inline update_rule parse_rule(const std::string& s) {
  if (s == "gc" || s == "graph_conv") return update_rule::graph_conv;
  if (s == "sage") return update_rule::sage;
  if (s == "gin") return update_rule::gin;
  throw format_error("unknown update rule '" + s + "'");
}

/// Whether H[l+1][v] reads H[l][v] directly.
inline bool has_self_term(update_rule r) noexcept { return r != update_rule::graph_conv; }

/// Per-edge coefficient applied to the sender's embedding.
inline double edge_coefficient(aggregator_kind k, double weight) noexcept {
  return k == aggregator_kind::weighted_sum ? weight : 1.0;
}

/// Weights of one layer. Which members are populated depends on the rule:
///   graph_conv: neigh, bias
///   sage:       self, neigh, bias
///   gin:        mlp_hidden, mlp_hidden_bias, mlp_out, mlp_out_bias
struct layer_weights {
  matrix self;
  matrix neigh;
  vec bias;
  matrix mlp_hidden;
  vec mlp_hidden_bias;
  matrix mlp_out;
  vec mlp_out_bias;

  friend bool operator==(const layer_weights&, const layer_weights&) = default;
};

struct model_config {
  update_rule rule = update_rule::graph_conv;
  aggregator_kind aggregator = aggregator_kind::sum;
  std::vector<std::size_t> dims; // d_0 .. d_L
  double epsilon = 0.0;          // GIN only
  std::vector<layer_weights> layers;

  std::size_t num_layers() const noexcept { return dims.empty() ? 0 : dims.size() - 1; }
  std::size_t dim(std::size_t l) const { return dims.at(l); }
  const layer_weights& weights(std::size_t l) const { return layers.at(l - 1); }

  void validate() const {
    if (dims.size() < 2)
      throw format_error("model needs at least one layer");
    for (auto d : dims)
      if (d == 0)
        throw format_error("zero layer width");
    if (layers.size() != num_layers())
      throw format_error("expected " + std::to_string(num_layers()) + " weight blocks, got " +
                         std::to_string(layers.size()));
    if (rule == update_rule::gin && aggregator != aggregator_kind::sum)
      throw format_error("GIN requires the sum aggregator");
    if (!std::isfinite(epsilon))
      throw format_error("non-finite epsilon");
    auto shape = [](const matrix& m, std::size_t r, std::size_t c, const char* what, std::size_t l) {
      if (m.rows() != r || m.cols() != c)
        throw format_error("layer " + std::to_string(l) + " " + what + " is " + std::to_string(m.rows()) +
                           "x" + std::to_string(m.cols()) + ", expected " + std::to_string(r) + "x" +
                           std::to_string(c));
    };
    auto length = [](const vec& v, std::size_t n, const char* what, std::size_t l) {
      if (v.size() != n)
        throw format_error("layer " + std::to_string(l) + " " + what + " has length " +
                           std::to_string(v.size()) + ", expected " + std::to_string(n));
    };
    for (std::size_t l = 1; l <= num_layers(); ++l) {
      const auto& w = weights(l);
      const std::size_t in = dims[l - 1], out = dims[l];
      switch (rule) {
      case update_rule::sage:
        shape(w.self, out, in, "self weight", l);
        [[fallthrough]];
      case update_rule::graph_conv:
        shape(w.neigh, out, in, "neighbour weight", l);
        length(w.bias, out, "bias", l);
        break;
      case update_rule::gin:
        shape(w.mlp_hidden, out, in, "mlp hidden weight", l);
        length(w.mlp_hidden_bias, out, "mlp hidden bias", l);
        shape(w.mlp_out, out, out, "mlp output weight", l);
        length(w.mlp_out_bias, out, "mlp output bias", l);
        break;
      }
    }
  }
};

/// Buffers reused across update_fn calls; one per worker thread.
struct update_scratch {
  vec combined;
  vec hidden;
};

/// h^l = sigma(update(h^{l-1}_self, x_norm)). sigma is ReLU below the last
/// layer and the identity on it.
inline void update_fn(std::span<const double> h_self, std::span<const double> x_norm, std::size_t l,
                      const model_config& cfg, std::span<double> out, update_scratch& scratch) {
  const auto& w = cfg.weights(l);
  detail::require_dims(h_self.size(), cfg.dim(l - 1), "update_fn self");
  detail::require_dims(x_norm.size(), cfg.dim(l - 1), "update_fn aggregate");
  detail::require_dims(out.size(), cfg.dim(l), "update_fn output");
  switch (cfg.rule) {
  case update_rule::graph_conv:
    matvec(w.neigh, x_norm, out);
    axpy(1.0, w.bias, out);
    break;
  case update_rule::sage:
    matvec(w.self, h_self, out);
    matvec_add(w.neigh, x_norm, out);
    axpy(1.0, w.bias, out);
    break;
  case update_rule::gin: {
    auto& z = scratch.combined;
    z.resize(h_self.size());
    const double scale = 1.0 + cfg.epsilon;
    for (std::size_t i = 0; i < z.size(); ++i)
      z[i] = scale * h_self[i] + x_norm[i];
    auto& hidden = scratch.hidden;
    hidden.resize(cfg.dim(l));
    matvec(w.mlp_hidden, z, hidden);
    axpy(1.0, w.mlp_hidden_bias, std::span<double>(hidden));
    relu_inplace(hidden);
    matvec(w.mlp_out, hidden, out);
    axpy(1.0, w.mlp_out_bias, out);
    break;
  }
  }
  if (l < cfg.num_layers())
    relu_inplace(out);
}

inline vec update_fn(std::span<const double> h_self, std::span<const double> x_norm, std::size_t l,
                     const model_config& cfg) {
  vec out(cfg.dim(l));
  update_scratch scratch;
  update_fn(h_self, x_norm, l, cfg, out, scratch);
  return out;
}

/// Divisor turning a raw aggregate into the normalised one.
inline double normalizer(aggregator_kind k, std::size_t in_degree) noexcept {
  return k == aggregator_kind::mean && in_degree > 1 ? static_cast<double>(in_degree) : 1.0;
}

/// out = x / normalizer. out may alias x.
inline void normalize(std::span<const double> x, aggregator_kind k, std::size_t in_degree, std::span<double> out) {
  const double d = normalizer(k, in_degree);
  if (d == 1.0) {
    if (out.data() != x.data())
      std::copy(x.begin(), x.end(), out.begin());
    return;
  }
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = x[i] / d;
}

/// Per-layer embeddings H[0..L] and raw aggregates X[1..L] (X[0] is unused).
/// Rows are slots; for a whole graph slot == vertex id.
struct embedding_store {
  std::vector<matrix> h;
  std::vector<matrix> x;

  embedding_store() = default;
  embedding_store(std::size_t rows, const std::vector<std::size_t>& dims) {
    for (std::size_t l = 0; l < dims.size(); ++l) {
      h.emplace_back(rows, dims[l]);
      x.emplace_back(l == 0 ? 0 : rows, l == 0 ? 0 : dims[l - 1]);
    }
  }

  std::size_t num_layers() const noexcept { return h.empty() ? 0 : h.size() - 1; }
  std::size_t rows() const noexcept { return h.empty() ? 0 : h[0].rows(); }

  std::size_t label(std::size_t slot) const { return argmax(h.back().row(slot)); }

  friend bool operator==(const embedding_store&, const embedding_store&) = default;
};

/// Layer-by-layer inference over every vertex. Serves as the bootstrap and as
/// the exactness reference for the incremental strategies.
inline embedding_store full_layerwise_inference(const dynamic_graph& g, const matrix& features,
                                                const model_config& cfg) {
  const std::size_t n = g.num_vertices();
  if (features.rows() != n)
    throw dim_mismatch_error("feature rows " + std::to_string(features.rows()) + " != vertex count " +
                             std::to_string(n));
  detail::require_dims(features.cols(), cfg.dim(0), "feature width");
  embedding_store store(n, cfg.dims);
  store.h[0] = features;
  std::vector<update_scratch> scratch(thread_count());
  std::vector<vec> normed(thread_count());
  for (std::size_t l = 1; l <= cfg.num_layers(); ++l) {
    const auto& prev = store.h[l - 1];
    auto& agg = store.x[l];
    auto& cur = store.h[l];
    parallel_for(0, n, [&](std::size_t v, std::size_t worker) {
      auto xv = agg.row(v);
      for (const auto& e : g.in_neighbors(v))
        axpy(edge_coefficient(cfg.aggregator, e.weight), prev.row(e.id), xv);
      auto& tmp = normed[worker];
      tmp.resize(xv.size());
      normalize(xv, cfg.aggregator, g.in_degree(v), tmp);
      update_fn(prev.row(v), tmp, l, cfg, cur.row(v), scratch[worker]);
    });
  }
  return store;
}

namespace detail {
inline vec vertex_wise(const dynamic_graph& g, const matrix& features, const model_config& cfg, vertex_id v,
                       std::size_t l) {
  if (l == 0)
    return vec(features.row(v).begin(), features.row(v).end());
  vec agg(cfg.dim(l - 1), 0.0);
  for (const auto& e : g.in_neighbors(v)) {
    const vec h = vertex_wise(g, features, cfg, e.id, l - 1);
    axpy(edge_coefficient(cfg.aggregator, e.weight), h, std::span<double>(agg));
  }
  normalize(agg, cfg.aggregator, g.in_degree(v), agg);
  const vec self = has_self_term(cfg.rule) ? vertex_wise(g, features, cfg, v, l - 1) : vec(cfg.dim(l - 1), 0.0);
  return update_fn(self, agg, l, cfg);
}
} // namespace detail

/// Evaluates the full L-hop computation tree rooted at v without sharing any
/// intermediate result. Exponential in L; a reference baseline only.
/// layers must be 0 (returns the feature row) or the model depth.
inline vec vertex_wise_inference(const dynamic_graph& g, const matrix& features, const model_config& cfg,
                                 vertex_id v, std::optional<std::size_t> layers = std::nullopt) {
  g.check_vertex(v);
  const std::size_t depth = layers.value_or(cfg.num_layers());
  if (depth != 0 && depth != cfg.num_layers())
    throw dim_mismatch_error("vertex-wise depth must be 0 or the model depth");
  return detail::vertex_wise(g, features, cfg, v, depth);
}

inline std::map<vertex_id, std::size_t> predict_labels(const embedding_store& store,
                                                       std::span<const vertex_id> vertices) {
  std::map<vertex_id, std::size_t> out;
  for (auto v : vertices)
    out.emplace(v, store.label(v));
  return out;
}

inline std::vector<std::size_t> predict_all_labels(const embedding_store& store) {
  std::vector<std::size_t> out(store.rows());
  for (std::size_t v = 0; v < out.size(); ++v)
    out[v] = store.label(v);
  return out;
}

namespace detail {
inline matrix random_matrix(rng& gen, std::size_t rows, std::size_t cols) {
  matrix m(rows, cols);
  for (auto& v : m.flat())
    v = static_cast<double>(static_cast<float>(gen.uniform01() - 0.5));
  return m;
}
inline vec random_vec(rng& gen, std::size_t n) {
  vec out(n);
  for (auto& v : out)
    v = static_cast<double>(static_cast<float>(gen.uniform01() - 0.5));
  return out;
}
} // namespace detail

/// Synthetic weights, uniform in [-0.5, 0.5]. Entries are f32-representable
/// so a save/load round trip is bitwise exact.
inline model_config init_random_model(std::vector<std::size_t> dims, update_rule rule, aggregator_kind aggregator,
                                      std::uint64_t seed, double epsilon = 0.0) {
  model_config cfg;
  cfg.rule = rule;
  cfg.aggregator = aggregator;
  cfg.dims = std::move(dims);
  cfg.epsilon = epsilon;
  if (cfg.dims.size() < 2)
    throw format_error("model needs at least one layer");
  rng gen(seed);
  for (std::size_t l = 1; l < cfg.dims.size(); ++l) {
    const std::size_t in = cfg.dims[l - 1], out = cfg.dims[l];
    layer_weights w;
    switch (rule) {
    case update_rule::sage:
      w.self = detail::random_matrix(gen, out, in);
      [[fallthrough]];
    case update_rule::graph_conv:
      w.neigh = detail::random_matrix(gen, out, in);
      w.bias = detail::random_vec(gen, out);
      break;
    case update_rule::gin:
      w.mlp_hidden = detail::random_matrix(gen, out, in);
      w.mlp_hidden_bias = detail::random_vec(gen, out);
      w.mlp_out = detail::random_matrix(gen, out, out);
      w.mlp_out_bias = detail::random_vec(gen, out);
      break;
    }
    cfg.layers.push_back(std::move(w));
  }
  cfg.validate();
  return cfg;
}

} // namespace ripple
