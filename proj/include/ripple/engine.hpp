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

#include <chrono>
#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "ripple/graph.hpp"
#include "ripple/mailbox.hpp"
#include "ripple/model.hpp"
#include "ripple/parallel.hpp"
#include "ripple/update.hpp"

namespace ripple {

enum class strategy { ripple, recompute };

inline std::string to_string(strategy s) { return s == strategy::ripple ? "ripple" : "rc"; }

inline strategy parse_strategy(const std::string& s) {
  if (s == "ripple")
    return strategy::ripple;
  if (s == "rc" || s == "recompute")
    return strategy::recompute;
  throw error("unknown strategy '" + s + "'");
}

/// Numeric work done by one batch.
///
/// aggregate_ops counts scalar operations spent keeping raw aggregates
/// current. The incremental engine charges 2*dim per change message (negate
/// the old contribution, add the new one) and dim per structural message.
/// The recompute baseline charges in_degree*dim per recomputed aggregate.
struct op_counters {
  std::uint64_t aggregate_ops = 0;
  std::uint64_t update_calls = 0;
  std::uint64_t messages = 0;

  op_counters& operator+=(const op_counters& o) {
    aggregate_ops += o.aggregate_ops;
    update_calls += o.update_calls;
    messages += o.messages;
    return *this;
  }
};

/// Phase wall-clock durations in microseconds.
struct phase_timings {
  double update_us = 0;
  double apply_us = 0;
  double compute_us = 0;
  double comm_us = 0;

  double total_us() const noexcept { return update_us + apply_us + compute_us + comm_us; }
};

/// Traffic sent by one worker. payload_bytes excludes the 5-byte frame header
/// and the per-frame hop/count prefix; it is the sum of entry bytes.
struct comm_counters {
  std::uint64_t frames = 0;
  std::uint64_t bytes = 0;
  std::uint64_t payload_bytes = 0;

  comm_counters& operator+=(const comm_counters& o) {
    frames += o.frames;
    bytes += o.bytes;
    payload_bytes += o.payload_bytes;
    return *this;
  }
};

struct label_change {
  std::size_t before;
  std::size_t after;
  friend bool operator==(const label_change&, const label_change&) = default;
};

struct batch_result {
  std::uint64_t batch_id = 0;
  std::size_t size = 0;
  std::vector<std::size_t> affected_per_hop; // [0] is hop 1
  std::map<vertex_id, label_change> changed_labels;
  op_counters ops;
  phase_timings timings;
  comm_counters comm;
};

/// Routing policy for a single machine: every vertex is local and its slot is
/// its id. The distributed worker supplies a policy with real exchanges.
struct local_router {
  std::size_t slot(vertex_id v) const noexcept { return v; }
  bool is_local(vertex_id) const noexcept { return true; }

  void send(std::size_t, vertex_id, double, std::span<const double>, bool) {}
  void exchange(std::size_t, mailbox&, batch_result&) {}

  void mark_remote(std::size_t, vertex_id) {}
  void exchange_marks(std::size_t, vertex_set&, batch_result&) {}
  void pull(std::size_t, std::span<const vertex_id>, std::unordered_map<vertex_id, vec>&, batch_result&) {}
};

namespace detail {
using clock = std::chrono::steady_clock;
inline double micros_since(clock::time_point start) {
  return std::chrono::duration<double, std::micro>(clock::now() - start).count();
}
} // namespace detail

/// An edge whose presence changed in the current batch. coeff is the
/// aggregation coefficient the edge carried when the change was recorded.
struct structural_change {
  vertex_id src;
  vertex_id dst;
  double coeff;
};

struct structural_sets {
  std::vector<structural_change> added;
  std::vector<structural_change> deleted;

  void clear() noexcept {
    added.clear();
    deleted.clear();
  }
};

/// Incremental propagation through per-hop mailboxes.
///
/// seed_batch applies the records at hop 0 and posts hop-1 messages;
/// propagate() then runs, for each hop l, an APPLY phase (fold the mailbox
/// into X[l] and refresh H[l]) and, below the last hop, a COMPUTE phase that
/// posts hop l+1 messages:
///   (a) alpha * (h_new - h_old) to every current out-neighbour of an applied
///       vertex, plus a dirty mark on the vertex itself for rules with a self
///       term;
///   (b) +alpha * h_pre for every edge added in the batch;
///   (c) -alpha * h_pre for every edge deleted in the batch;
/// where h_pre is the sender's H[l] before this hop's APPLY.
template <typename Router = local_router>
class basic_ripple_engine {
public:
  basic_ripple_engine(dynamic_graph& g, embedding_store& store, const model_config& cfg, Router router = {})
      : graph_(g), store_(store), cfg_(cfg), router_(std::move(router)) {
    if (store_.num_layers() != cfg_.num_layers())
      throw dim_mismatch_error("embedding store depth does not match model");
    boxes_.emplace_back();
    for (std::size_t l = 1; l <= cfg_.num_layers(); ++l)
      boxes_.emplace_back(graph_.num_vertices(), cfg_.dim(l - 1));
    const auto workers = thread_count();
    scratch_.resize(workers);
    normed_.resize(workers);
  }

  /// Validates, seeds and propagates one batch.
  batch_result process(std::span<const update_record> batch) {
    validate_batch(graph_, batch, cfg_.dim(0));
    seed_batch(batch);
    return propagate();
  }

  /// Hop-0 phase. Records are applied in arrival order; each message uses
  /// the state current when its record is applied.
  void seed_batch(std::span<const update_record> batch) {
    const auto start = detail::clock::now();
    for (const auto& rec : batch)
      seed_record(rec, true);
    result_.timings.update_us += detail::micros_since(start);
  }

  /// compute=false applies only the topology change (the mirror of an edge
  /// whose source lives on another worker).
  void seed_record(const update_record& rec, bool compute) {
    ++result_.size;
    std::visit(
        [&](const auto& r) {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, vertex_feat>) {
            seed_feature(r);
          } else if constexpr (std::is_same_v<T, edge_add>) {
            graph_.add_edge(r.src, r.dst, r.weight);
            if (compute) {
              const double coeff = edge_coefficient(cfg_.aggregator, r.weight);
              deliver(1, r.dst, coeff, store_.h[0].row(router_.slot(r.src)), false);
              result_.ops.aggregate_ops += cfg_.dim(0);
              ++result_.ops.messages;
              structural_.added.push_back({r.src, r.dst, coeff});
            }
          } else {
            const double w = graph_.delete_edge(r.src, r.dst);
            if (compute) {
              const double coeff = edge_coefficient(cfg_.aggregator, w);
              deliver(1, r.dst, -coeff, store_.h[0].row(router_.slot(r.src)), false);
              result_.ops.aggregate_ops += cfg_.dim(0);
              ++result_.ops.messages;
              structural_.deleted.push_back({r.src, r.dst, coeff});
            }
          }
        },
        rec);
  }

  batch_result propagate() {
    const std::size_t depth = cfg_.num_layers();
    for (std::size_t l = 1; l <= depth; ++l) {
      auto& box = boxes_[l];
      router_.exchange(l, box, result_);
      result_.affected_per_hop.push_back(box.size());
      apply_hop(l);
      if (l < depth)
        compute_hop(l);
      box.clear();
    }
    structural_.clear();
    batch_result out = std::move(result_);
    result_ = batch_result{};
    return out;
  }

  const mailbox& mailbox_at(std::size_t hop) const { return boxes_.at(hop); }
  const structural_sets& structural() const noexcept { return structural_; }
  Router& router() noexcept { return router_; }
  const dynamic_graph& graph() const noexcept { return graph_; }
  const embedding_store& store() const noexcept { return store_; }

private:
  void seed_feature(const vertex_feat& r) {
    const std::size_t d = cfg_.dim(0);
    auto h0 = store_.h[0].row(router_.slot(r.vertex));
    diff_.resize(d);
    for (std::size_t j = 0; j < d; ++j)
      diff_[j] = r.features[j] - h0[j];
    std::copy(r.features.begin(), r.features.end(), h0.begin());
    for (const auto& e : graph_.out_neighbors(r.vertex)) {
      deliver(1, e.id, edge_coefficient(cfg_.aggregator, e.weight), diff_, true);
      result_.ops.aggregate_ops += 2 * d;
      ++result_.ops.messages;
    }
    if (has_self_term(cfg_.rule))
      boxes_[1].mark(r.vertex);
  }

  void deliver(std::size_t hop, vertex_id target, double coeff, std::span<const double> contribution, bool dirty) {
    if (router_.is_local(target))
      boxes_[hop].add(target, coeff, contribution, dirty);
    else
      router_.send(hop, target, coeff, contribution, dirty);
  }

  void apply_hop(std::size_t l) {
    const auto start = detail::clock::now();
    auto& box = boxes_[l];
    const std::size_t d = cfg_.dim(l);
    const bool last = l == cfg_.num_layers();
    previous_.resize(box.size() * d);
    parallel_for(
        0, box.size(),
        [&](std::size_t i, std::size_t worker) {
          const vertex_id v = box.vertex(i);
          const std::size_t s = router_.slot(v);
          auto h = store_.h[l].row(s);
          std::copy(h.begin(), h.end(), previous_.begin() + static_cast<std::ptrdiff_t>(i * d));
          auto x = store_.x[l].row(s);
          axpy(1.0, box.delta(i), x);
          auto& tmp = normed_[worker];
          tmp.resize(x.size());
          normalize(x, cfg_.aggregator, graph_.in_degree(v), tmp);
          update_fn(store_.h[l - 1].row(s), tmp, l, cfg_, h, scratch_[worker]);
        },
        256);
    result_.ops.update_calls += box.size();
    if (last) {
      for (std::size_t i = 0; i < box.size(); ++i) {
        const vertex_id v = box.vertex(i);
        const std::size_t before = argmax(std::span<const double>(previous_).subspan(i * d, d));
        const std::size_t after = store_.label(router_.slot(v));
        if (before != after)
          result_.changed_labels[v] = {before, after};
      }
    }
    result_.timings.apply_us += detail::micros_since(start);
  }

  std::span<const double> pre_apply_row(std::size_t l, vertex_id u) const {
    const std::size_t d = cfg_.dim(l);
    if (auto i = boxes_[l].find(u))
      return std::span<const double>(previous_).subspan(*i * d, d);
    return store_.h[l].row(router_.slot(u));
  }

  void compute_hop(std::size_t l) {
    const auto start = detail::clock::now();
    const auto& box = boxes_[l];
    const std::size_t d = cfg_.dim(l);
    const bool self_term = has_self_term(cfg_.rule);
    diff_.resize(d);
    for (std::size_t i = 0; i < box.size(); ++i) {
      const vertex_id v = box.vertex(i);
      const auto h = store_.h[l].row(router_.slot(v));
      for (std::size_t j = 0; j < d; ++j)
        diff_[j] = h[j] - previous_[i * d + j];
      for (const auto& e : graph_.out_neighbors(v)) {
        deliver(l + 1, e.id, edge_coefficient(cfg_.aggregator, e.weight), diff_, true);
        result_.ops.aggregate_ops += 2 * d;
        ++result_.ops.messages;
      }
      if (self_term)
        boxes_[l + 1].mark(v);
    }
    for (const auto& c : structural_.added) {
      deliver(l + 1, c.dst, c.coeff, pre_apply_row(l, c.src), false);
      result_.ops.aggregate_ops += d;
      ++result_.ops.messages;
    }
    for (const auto& c : structural_.deleted) {
      deliver(l + 1, c.dst, -c.coeff, pre_apply_row(l, c.src), false);
      result_.ops.aggregate_ops += d;
      ++result_.ops.messages;
    }
    result_.timings.compute_us += detail::micros_since(start);
  }

  dynamic_graph& graph_;
  embedding_store& store_;
  const model_config& cfg_;
  Router router_;
  std::vector<mailbox> boxes_; // [0] unused
  structural_sets structural_;
  std::vector<double> previous_;
  vec diff_;
  std::vector<update_scratch> scratch_;
  std::vector<vec> normed_;
  batch_result result_;
};

/// Scoped layer-wise recomputation. Every frontier vertex at hop l rebuilds
/// X[l] from all in-neighbours' H[l-1]; frontier l+1 is the out-neighbourhood
/// of frontier l, plus frontier l itself for rules with a self term, plus the
/// sinks of every edge changed in the batch.
template <typename Router = local_router>
class basic_recompute_engine {
public:
  basic_recompute_engine(dynamic_graph& g, embedding_store& store, const model_config& cfg, Router router = {})
      : graph_(g), store_(store), cfg_(cfg), router_(std::move(router)), sinks_(g.num_vertices()) {
    if (store_.num_layers() != cfg_.num_layers())
      throw dim_mismatch_error("embedding store depth does not match model");
    for (std::size_t l = 0; l <= cfg_.num_layers(); ++l)
      frontiers_.emplace_back(graph_.num_vertices());
  }

  batch_result process(std::span<const update_record> batch) {
    validate_batch(graph_, batch, cfg_.dim(0));
    seed_batch(batch);
    return propagate();
  }

  void seed_batch(std::span<const update_record> batch) {
    const auto start = detail::clock::now();
    for (const auto& rec : batch)
      seed_record(rec, true);
    result_.timings.update_us += detail::micros_since(start);
  }

  /// Compute and no-compute records are handled alike: sink ownership alone
  /// decides which worker puts the sink on its frontier.
  void seed_record(const update_record& rec, bool /*compute*/ = true) {
    ++result_.size;
    std::visit(
        [&](const auto& r) {
          using T = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<T, vertex_feat>) {
            auto h0 = store_.h[0].row(router_.slot(r.vertex));
            std::copy(r.features.begin(), r.features.end(), h0.begin());
            for (const auto& e : graph_.out_neighbors(r.vertex))
              mark(1, e.id);
            if (has_self_term(cfg_.rule))
              mark(1, r.vertex);
          } else {
            if constexpr (std::is_same_v<T, edge_add>)
              graph_.add_edge(r.src, r.dst, r.weight);
            else
              graph_.delete_edge(r.src, r.dst);
            if (router_.is_local(r.dst))
              sinks_.insert(r.dst);
          }
        },
        rec);
  }

  batch_result propagate() {
    const std::size_t depth = cfg_.num_layers();
    const bool self_term = has_self_term(cfg_.rule);
    for (std::size_t l = 1; l <= depth; ++l) {
      auto& frontier = frontiers_[l];
      for (auto v : sinks_.items())
        frontier.insert(v);
      router_.exchange_marks(l, frontier, result_);
      result_.affected_per_hop.push_back(frontier.size());

      wanted_.clear();
      for (auto v : frontier.items())
        for (const auto& e : graph_.in_neighbors(v))
          if (!router_.is_local(e.id))
            wanted_.push_back(e.id);
      router_.pull(l - 1, wanted_, remote_rows_, result_);

      recompute_hop(l);

      if (l < depth) {
        for (auto v : frontier.items()) {
          for (const auto& e : graph_.out_neighbors(v))
            mark(l + 1, e.id);
          if (self_term)
            mark(l + 1, v);
        }
      }
      frontier.clear();
      remote_rows_.clear();
    }
    sinks_.clear();
    batch_result out = std::move(result_);
    result_ = batch_result{};
    return out;
  }

  const vertex_set& frontier_at(std::size_t hop) const { return frontiers_.at(hop); }
  Router& router() noexcept { return router_; }

private:
  void mark(std::size_t hop, vertex_id v) {
    if (router_.is_local(v))
      frontiers_[hop].insert(v);
    else
      router_.mark_remote(hop, v);
  }

  std::span<const double> input_row(std::size_t layer, vertex_id u) const {
    if (router_.is_local(u))
      return store_.h[layer].row(router_.slot(u));
    auto it = remote_rows_.find(u);
    if (it == remote_rows_.end())
      throw error("embedding of remote vertex " + std::to_string(u) + " was not pulled");
    return it->second;
  }

  void recompute_hop(std::size_t l) {
    const auto start = detail::clock::now();
    const auto& frontier = frontiers_[l];
    const std::size_t d_in = cfg_.dim(l - 1);
    const bool last = l == cfg_.num_layers();
    normed_.resize(d_in);
    for (auto v : frontier.items()) {
      const std::size_t s = router_.slot(v);
      auto x = store_.x[l].row(s);
      std::fill(x.begin(), x.end(), 0.0);
      const auto ins = graph_.in_neighbors(v);
      for (const auto& e : ins)
        axpy(edge_coefficient(cfg_.aggregator, e.weight), input_row(l - 1, e.id), x);
      result_.ops.aggregate_ops += ins.size() * d_in;
      result_.ops.messages += ins.size();
      normalize(x, cfg_.aggregator, ins.size(), normed_);
      auto h = store_.h[l].row(s);
      const std::size_t before = last ? argmax(h) : 0;
      update_fn(store_.h[l - 1].row(s), normed_, l, cfg_, h, scratch_);
      if (last) {
        const std::size_t after = argmax(h);
        if (before != after)
          result_.changed_labels[v] = {before, after};
      }
    }
    result_.ops.update_calls += frontier.size();
    result_.timings.apply_us += detail::micros_since(start);
  }

  dynamic_graph& graph_;
  embedding_store& store_;
  const model_config& cfg_;
  Router router_;
  std::vector<vertex_set> frontiers_; // [0] unused
  vertex_set sinks_;
  std::vector<vertex_id> wanted_;
  std::unordered_map<vertex_id, vec> remote_rows_;
  vec normed_;
  update_scratch scratch_;
  batch_result result_;
};

using ripple_engine = basic_ripple_engine<local_router>;
using recompute_engine = basic_recompute_engine<local_router>;

/// Per-layer max |H - H_oracle| against a fresh full inference over the
/// current graph and H[0].
inline std::vector<double> verify_against_oracle(const dynamic_graph& g, const embedding_store& store,
                                                 const model_config& cfg) {
  const auto oracle = full_layerwise_inference(g, store.h[0], cfg);
  std::vector<double> out;
  for (std::size_t l = 0; l <= cfg.num_layers(); ++l)
    out.push_back(max_abs_diff(store.h[l].flat(), oracle.h[l].flat()));
  return out;
}

/// Same comparison for the raw aggregates X[1..L]; entry 0 is always 0.
inline std::vector<double> verify_aggregates_against_oracle(const dynamic_graph& g, const embedding_store& store,
                                                            const model_config& cfg) {
  const auto oracle = full_layerwise_inference(g, store.h[0], cfg);
  std::vector<double> out{0.0};
  for (std::size_t l = 1; l <= cfg.num_layers(); ++l)
    out.push_back(max_abs_diff(store.x[l].flat(), oracle.x[l].flat()));
  return out;
}

} // namespace ripple
