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
#include <fstream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ripple/error.hpp"
#include "ripple/text.hpp"

namespace ripple {

using vertex_id = std::uint64_t;

struct neighbor {
  vertex_id id;
  double weight;
};

inline constexpr double default_edge_weight = 1.0;

/// Mutable simple digraph with mirrored out/in adjacency.
///
/// Each vertex keeps an unordered list of out-edges and in-edges. Removal
/// swaps the victim with the last slot, so neighbour order is unspecified once
/// deletions happen. An (u,v) -> slot index keeps add/delete O(1).
class dynamic_graph {
public:
  dynamic_graph() = default;

  explicit dynamic_graph(std::size_t n) : out_(n), in_(n) {
    if (n > std::numeric_limits<std::uint32_t>::max())
      throw out_of_range_error("vertex count exceeds 2^32");
  }

  std::size_t num_vertices() const noexcept { return out_.size(); }
  std::size_t num_edges() const noexcept { return index_.size(); }

  void add_edge(vertex_id u, vertex_id v, double w = default_edge_weight) {
    check_vertex(u);
    check_vertex(v);
    if (!std::isfinite(w))
      throw error("non-finite edge weight on (" + std::to_string(u) + "," + std::to_string(v) + ")");
    auto [it, inserted] = index_.try_emplace(key(u, v));
    if (!inserted)
      throw duplicate_edge_error("duplicate edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    it->second.out_pos = static_cast<std::uint32_t>(out_[u].size());
    it->second.in_pos = static_cast<std::uint32_t>(in_[v].size());
    out_[u].push_back({v, w});
    in_[v].push_back({u, w});
  }

  /// Removes (u,v) and returns its weight.
  double delete_edge(vertex_id u, vertex_id v) {
    check_vertex(u);
    check_vertex(v);
    auto it = index_.find(key(u, v));
    if (it == index_.end())
      throw missing_edge_error("missing edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    const slot s = it->second;
    index_.erase(it);
    const double w = out_[u][s.out_pos].weight;

    auto& outs = out_[u];
    if (s.out_pos + 1 != outs.size()) {
      outs[s.out_pos] = outs.back();
      index_.at(key(u, outs[s.out_pos].id)).out_pos = s.out_pos;
    }
    outs.pop_back();

    auto& ins = in_[v];
    if (s.in_pos + 1 != ins.size()) {
      ins[s.in_pos] = ins.back();
      index_.at(key(ins[s.in_pos].id, v)).in_pos = s.in_pos;
    }
    ins.pop_back();
    return w;
  }

  bool has_edge(vertex_id u, vertex_id v) const {
    return u < num_vertices() && v < num_vertices() && index_.contains(key(u, v));
  }

  std::optional<double> edge_weight(vertex_id u, vertex_id v) const {
    if (u >= num_vertices() || v >= num_vertices())
      return std::nullopt;
    auto it = index_.find(key(u, v));
    if (it == index_.end())
      return std::nullopt;
    return out_[u][it->second.out_pos].weight;
  }

  std::span<const neighbor> out_neighbors(vertex_id u) const {
    check_vertex(u);
    return out_[u];
  }

  std::span<const neighbor> in_neighbors(vertex_id v) const {
    check_vertex(v);
    return in_[v];
  }

  std::size_t in_degree(vertex_id v) const { return in_neighbors(v).size(); }
  std::size_t out_degree(vertex_id u) const { return out_neighbors(u).size(); }

  void check_vertex(vertex_id v) const {
    if (v >= num_vertices())
      throw out_of_range_error("vertex " + std::to_string(v) + " out of range [0," +
                               std::to_string(num_vertices()) + ")");
  }

  /// Full scan of the mirror and index invariants. Test/debug use.
  bool consistent() const {
    std::size_t in_total = 0;
    for (vertex_id v = 0; v < num_vertices(); ++v) {
      in_total += in_[v].size();
      for (std::size_t i = 0; i < in_[v].size(); ++i) {
        const auto& e = in_[v][i];
        auto it = index_.find(key(e.id, v));
        if (it == index_.end() || it->second.in_pos != i)
          return false;
        const auto& mirror = out_[e.id][it->second.out_pos];
        if (mirror.id != v || mirror.weight != e.weight)
          return false;
      }
    }
    std::size_t out_total = 0;
    for (const auto& outs : out_)
      out_total += outs.size();
    return in_total == index_.size() && out_total == index_.size();
  }

private:
  struct slot {
    std::uint32_t out_pos = 0;
    std::uint32_t in_pos = 0;
  };

  static std::uint64_t key(vertex_id u, vertex_id v) noexcept { return (u << 32) | v; }

  std::vector<std::vector<neighbor>> out_;
  std::vector<std::vector<neighbor>> in_;
  std::unordered_map<std::uint64_t, slot> index_;
};

/// Reads `src,dst[,weight]` lines. The vertex count comes from `n` or a
/// `# n=<count>` header line; without either it is max id + 1.
inline dynamic_graph load_edge_list(std::istream& in, std::optional<std::size_t> n = std::nullopt,
                                    double default_weight = default_edge_weight) {
  struct row {
    vertex_id u, v;
    double w;
    std::size_t line;
  };
  std::vector<row> rows;
  std::optional<std::size_t> header_n;
  vertex_id max_id = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view text = trim(line);
    if (text.empty())
      continue;
    if (text.front() == '#') {
      text = trim(text.substr(1));
      if (text.starts_with("n=")) {
        auto count = parse_number<std::size_t>(text.substr(2));
        if (!count)
          throw parse_error(lineno, "bad vertex-count header");
        header_n = *count;
      }
      continue;
    }
    auto fields = split(text, ',');
    if (fields.size() != 2 && fields.size() != 3)
      throw parse_error(lineno, "expected src,dst[,weight]");
    auto u = parse_number<vertex_id>(fields[0]);
    auto v = parse_number<vertex_id>(fields[1]);
    if (!u || !v)
      throw parse_error(lineno, "bad vertex id");
    double w = default_weight;
    if (fields.size() == 3) {
      auto parsed = parse_number<double>(fields[2]);
      if (!parsed || !std::isfinite(*parsed))
        throw parse_error(lineno, "bad weight");
      w = *parsed;
    }
    max_id = std::max({max_id, *u, *v});
    rows.push_back({*u, *v, w, lineno});
  }

  std::size_t count = n ? *n : header_n ? *header_n : (rows.empty() ? 0 : max_id + 1);
  dynamic_graph g(count);
  for (const auto& r : rows) {
    try {
      g.add_edge(r.u, r.v, r.w);
    } catch (const error& e) {
      throw parse_error(r.line, e.what());
    }
  }
  return g;
}

inline dynamic_graph load_edge_list(const std::string& path, std::optional<std::size_t> n = std::nullopt,
                                    double default_weight = default_edge_weight) {
  std::ifstream in(path);
  if (!in)
    throw error("cannot open edge list " + path);
  return load_edge_list(in, n, default_weight);
}

/// Writes the graph with a `# n=` header; weights are written only when
/// they differ from 1.
inline void write_edge_list(std::ostream& out, const dynamic_graph& g) {
  out << "# n=" << g.num_vertices() << '\n';
  for (vertex_id u = 0; u < g.num_vertices(); ++u) {
    for (const auto& e : g.out_neighbors(u)) {
      out << u << ',' << e.id;
      if (e.weight != default_edge_weight)
        out << ',' << format_double(e.weight);
      out << '\n';
    }
  }
}

inline void write_edge_list(const std::string& path, const dynamic_graph& g) {
  std::ofstream out(path);
  if (!out)
    throw error("cannot write edge list " + path);
  write_edge_list(out, g);
}

} // namespace ripple
