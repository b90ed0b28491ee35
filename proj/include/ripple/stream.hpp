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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ripple/error.hpp"
#include "ripple/graph.hpp"
#include "ripple/linalg.hpp"
#include "ripple/random.hpp"
#include "ripple/text.hpp"
#include "ripple/update.hpp"

namespace ripple {

using update_stream = std::vector<update_record>;

// Stream text format, one record per line:
//   A,src,dst[,w]   edge addition
//   D,src,dst       edge deletion
//   F,v,f0 f1 ...   vertex feature replacement
// Blank lines and '#' comments are ignored.

inline update_record parse_stream_line(std::string_view text, std::size_t lineno) {
  auto fields = split(text, ',');
  if (fields.empty() || fields[0].size() != 1)
    throw parse_error(lineno, "expected record tag A, D or F");
  auto id = [&](std::size_t i) {
    auto v = parse_number<vertex_id>(fields[i]);
    if (!v)
      throw parse_error(lineno, "bad vertex id '" + std::string(fields[i]) + "'");
    return *v;
  };
  switch (fields[0][0]) {
  case 'A': {
    if (fields.size() != 3 && fields.size() != 4)
      throw parse_error(lineno, "expected A,src,dst[,w]");
    double w = default_edge_weight;
    if (fields.size() == 4) {
      auto parsed = parse_number<double>(fields[3]);
      if (!parsed || !std::isfinite(*parsed))
        throw parse_error(lineno, "bad weight");
      w = *parsed;
    }
    return edge_add{id(1), id(2), w};
  }
  case 'D':
    if (fields.size() != 3)
      throw parse_error(lineno, "expected D,src,dst");
    return edge_del{id(1), id(2)};
  case 'F': {
    if (fields.size() != 3)
      throw parse_error(lineno, "expected F,v,f0 f1 ...");
    vertex_feat rec{id(1), {}};
    std::string_view values = fields[2];
    while (!values.empty()) {
      const auto pos = values.find(' ');
      const auto token = values.substr(0, pos);
      if (!token.empty()) {
        auto f = parse_number<double>(token);
        if (!f || !std::isfinite(*f))
          throw parse_error(lineno, "bad feature value '" + std::string(token) + "'");
        rec.features.push_back(*f);
      }
      if (pos == std::string_view::npos)
        break;
      values.remove_prefix(pos + 1);
    }
    if (rec.features.empty())
      throw parse_error(lineno, "empty feature vector");
    return rec;
  }
  default:
    throw parse_error(lineno, "unknown record tag '" + std::string(fields[0]) + "'");
  }
}

inline update_stream read_stream(std::istream& in) {
  update_stream out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto text = trim(line);
    if (text.empty() || text.front() == '#')
      continue;
    out.push_back(parse_stream_line(text, lineno));
  }
  return out;
}

inline update_stream read_stream(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw error("cannot open stream " + path);
  return read_stream(in);
}

inline std::string format_record(const update_record& r) {
  std::ostringstream os;
  std::visit(
      [&](const auto& rec) {
        using T = std::decay_t<decltype(rec)>;
        if constexpr (std::is_same_v<T, edge_add>) {
          os << "A," << rec.src << ',' << rec.dst;
          if (rec.weight != default_edge_weight)
            os << ',' << format_double(rec.weight);
        } else if constexpr (std::is_same_v<T, edge_del>) {
          os << "D," << rec.src << ',' << rec.dst;
        } else {
          os << "F," << rec.vertex << ',';
          for (std::size_t i = 0; i < rec.features.size(); ++i)
            os << (i ? " " : "") << format_double(rec.features[i]);
        }
      },
      r);
  return os.str();
}

inline void write_stream(std::ostream& out, const update_stream& stream) {
  for (const auto& r : stream)
    out << format_record(r) << '\n';
}

inline void write_stream(const std::string& path, const update_stream& stream) {
  std::ofstream out(path);
  if (!out)
    throw error("cannot write stream " + path);
  write_stream(out, stream);
}

/// Recipe for an update stream: withheld edges come back as additions,
/// deletions hit snapshot edges, feature updates perturb random vertices.
struct stream_spec {
  std::uint64_t seed = 1;
  std::size_t additions = 0;
  std::size_t deletions = 0;
  std::size_t feature_updates = 0;
  // When set, the number of withheld edges (and therefore additions) is
  // round(fraction * m) and `additions` is ignored.
  std::optional<double> withheld_fraction;
};

struct generated_stream {
  dynamic_graph snapshot;
  matrix features; // snapshot features, identical to the input
  update_stream records;
};

namespace detail {
inline double feature_stddev(const matrix& features) {
  const auto values = features.flat();
  if (values.empty())
    return 0.0;
  double mean = 0.0;
  for (double v : values)
    mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values)
    var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(values.size()));
}
} // namespace detail

/// Feature updates add elementwise uniform noise in [-a, a] with a = 10% of
/// the global feature standard deviation, applied to the vertex's feature
/// as of that point in the stream.
inline generated_stream generate_stream(const dynamic_graph& full, const matrix& features, const stream_spec& spec) {
  const std::size_t m = full.num_edges();
  std::size_t additions = spec.additions;
  if (spec.withheld_fraction) {
    const double f = *spec.withheld_fraction;
    if (!(f > 0.0 && f < 1.0))
      throw error("withheld fraction must lie in (0,1)");
    additions = static_cast<std::size_t>(std::llround(f * static_cast<double>(m)));
  }
  if (additions + spec.deletions > m)
    throw insufficient_edges_error("need " + std::to_string(additions + spec.deletions) + " edges, graph has " +
                                   std::to_string(m));
  if (spec.feature_updates > 0 && full.num_vertices() == 0)
    throw error("feature updates need at least one vertex");
  if (features.rows() != full.num_vertices())
    throw dim_mismatch_error("feature rows != vertex count");

  struct edge {
    vertex_id u, v;
    double w;
  };
  std::vector<edge> edges;
  edges.reserve(m);
  for (vertex_id u = 0; u < full.num_vertices(); ++u)
    for (const auto& e : full.out_neighbors(u))
      edges.push_back({u, e.id, e.weight});

  rng gen(spec.seed);
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i)
    order[i] = i;
  gen.shuffle(order);

  std::vector<bool> withheld(m, false);
  for (std::size_t i = 0; i < additions; ++i)
    withheld[order[i]] = true;

  generated_stream out;
  out.features = features;
  out.snapshot = dynamic_graph(full.num_vertices());
  for (std::size_t i = 0; i < m; ++i)
    if (!withheld[i])
      out.snapshot.add_edge(edges[i].u, edges[i].v, edges[i].w);

  enum class kind { add, del, feat };
  std::vector<kind> kinds;
  kinds.insert(kinds.end(), additions, kind::add);
  kinds.insert(kinds.end(), spec.deletions, kind::del);
  kinds.insert(kinds.end(), spec.feature_updates, kind::feat);
  gen.shuffle(kinds);

  const double amplitude = 0.1 * detail::feature_stddev(features);
  matrix current = features;
  std::size_t next_add = 0, next_del = additions;
  for (auto k : kinds) {
    switch (k) {
    case kind::add: {
      const auto& e = edges[order[next_add++]];
      out.records.push_back(edge_add{e.u, e.v, e.w});
      break;
    }
    case kind::del: {
      const auto& e = edges[order[next_del++]];
      out.records.push_back(edge_del{e.u, e.v});
      break;
    }
    case kind::feat: {
      const vertex_id v = gen.below(full.num_vertices());
      auto row = current.row(v);
      for (auto& f : row)
        f += gen.uniform(-amplitude, amplitude);
      out.records.push_back(vertex_feat{v, vec(row.begin(), row.end())});
      break;
    }
    }
  }
  return out;
}

enum class graph_kind { erdos_renyi, barabasi_albert };

struct synthetic_graph {
  dynamic_graph graph;
  matrix features;
};

/// ER: `size_param` distinct directed edges, no self-loops, uniformly drawn.
/// BA: a complete digraph on size_param+1 seed vertices, then every new vertex
/// links to size_param distinct earlier vertices picked proportionally to
/// their total degree; mean in-degree is exactly size_param.
/// Features are uniform in [0,1), rounded to f32.
inline synthetic_graph gen_synthetic(graph_kind kind, std::size_t n, std::size_t size_param, std::size_t feature_dim,
                                     std::uint64_t seed) {
  if (n == 0 || size_param == 0 || feature_dim == 0)
    throw error("synthetic graph parameters must be positive");
  rng gen(seed);
  synthetic_graph out{dynamic_graph(n), matrix(n, feature_dim)};
  auto& g = out.graph;
  if (kind == graph_kind::erdos_renyi) {
    if (size_param > n * (n - 1))
      throw error("too many edges for a simple digraph on " + std::to_string(n) + " vertices");
    while (g.num_edges() < size_param) {
      const vertex_id u = gen.below(n), v = gen.below(n);
      if (u != v && !g.has_edge(u, v))
        g.add_edge(u, v);
    }
  } else {
    const std::size_t attach = size_param;
    if (n <= attach)
      throw error("preferential attachment needs n > attach");
    std::vector<vertex_id> endpoints;
    for (vertex_id u = 0; u <= attach; ++u)
      for (vertex_id v = 0; v <= attach; ++v)
        if (u != v) {
          g.add_edge(u, v);
          endpoints.push_back(u);
          endpoints.push_back(v);
        }
    std::vector<vertex_id> targets;
    for (vertex_id u = attach + 1; u < n; ++u) {
      targets.clear();
      while (targets.size() < attach) {
        const vertex_id t = endpoints[gen.below(endpoints.size())];
        if (std::find(targets.begin(), targets.end(), t) == targets.end())
          targets.push_back(t);
      }
      for (auto t : targets) {
        g.add_edge(u, t);
        endpoints.push_back(u);
        endpoints.push_back(t);
      }
    }
  }
  for (auto& f : out.features.flat())
    f = static_cast<double>(gen.next() >> 40) * 0x1.0p-24;
  return out;
}

} // namespace ripple
