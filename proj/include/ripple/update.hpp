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
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "ripple/error.hpp"
#include "ripple/graph.hpp"
#include "ripple/linalg.hpp"

namespace ripple {

struct edge_add {
  vertex_id src;
  vertex_id dst;
  double weight = default_edge_weight;
  friend bool operator==(const edge_add&, const edge_add&) = default;
};

struct edge_del {
  vertex_id src;
  vertex_id dst;
  friend bool operator==(const edge_del&, const edge_del&) = default;
};

struct vertex_feat {
  vertex_id vertex;
  vec features;
  friend bool operator==(const vertex_feat&, const vertex_feat&) = default;
};

using update_record = std::variant<edge_add, edge_del, vertex_feat>;

/// The vertex at which the change originates (hop 0).
inline vertex_id source_vertex(const update_record& r) {
  return std::visit(
      [](const auto& rec) -> vertex_id {
        using T = std::decay_t<decltype(rec)>;
        if constexpr (std::is_same_v<T, vertex_feat>)
          return rec.vertex;
        else
          return rec.src;
      },
      r);
}

/// Checks a batch against the graph as it evolves record by record, without
/// mutating it. Throws invalid_batch_error naming the first bad record.
inline void validate_batch(const dynamic_graph& g, std::span<const update_record> batch, std::size_t feature_dim) {
  std::unordered_map<std::uint64_t, bool> overlay;
  auto present = [&](vertex_id u, vertex_id v) {
    auto it = overlay.find((u << 32) | v);
    return it != overlay.end() ? it->second : g.has_edge(u, v);
  };
  const std::size_t n = g.num_vertices();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    std::visit(
        [&](const auto& rec) {
          using T = std::decay_t<decltype(rec)>;
          if constexpr (std::is_same_v<T, vertex_feat>) {
            if (rec.vertex >= n)
              throw invalid_batch_error(i, "vertex " + std::to_string(rec.vertex) + " out of range");
            if (rec.features.size() != feature_dim)
              throw invalid_batch_error(i, "feature width " + std::to_string(rec.features.size()) + " != " +
                                               std::to_string(feature_dim));
            for (double f : rec.features)
              if (!std::isfinite(f))
                throw invalid_batch_error(i, "non-finite feature value");
          } else {
            if (rec.src >= n || rec.dst >= n)
              throw invalid_batch_error(i, "edge endpoint out of range");
            const bool has = present(rec.src, rec.dst);
            if constexpr (std::is_same_v<T, edge_add>) {
              if (!std::isfinite(rec.weight))
                throw invalid_batch_error(i, "non-finite edge weight");
              if (has)
                throw invalid_batch_error(i, "edge (" + std::to_string(rec.src) + "," + std::to_string(rec.dst) +
                                                 ") already present");
              overlay[(rec.src << 32) | rec.dst] = true;
            } else {
              if (!has)
                throw invalid_batch_error(i, "edge (" + std::to_string(rec.src) + "," + std::to_string(rec.dst) +
                                                 ") absent");
              overlay[(rec.src << 32) | rec.dst] = false;
            }
          }
        },
        batch[i]);
  }
}

} // namespace ripple
