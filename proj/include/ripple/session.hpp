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
#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ripple/engine.hpp"
#include "ripple/stream.hpp"

namespace ripple {

/// Owns a graph, its embeddings and the model, and feeds batches to the
/// selected strategy. Not movable: the engine holds references into it.
class streaming_session {
public:
  streaming_session(dynamic_graph graph, embedding_store store, model_config cfg, strategy strat)
      : graph_(std::move(graph)), store_(std::move(store)), cfg_(std::move(cfg)), strategy_(strat) {
    if (store_.rows() != graph_.num_vertices())
      throw dim_mismatch_error("embedding rows " + std::to_string(store_.rows()) + " != vertex count " +
                               std::to_string(graph_.num_vertices()));
    for (std::size_t l = 0; l <= cfg_.num_layers(); ++l)
      if (l >= store_.h.size() || store_.h[l].cols() != cfg_.dim(l))
        throw dim_mismatch_error("embedding widths do not match the model");
    if (strat == strategy::ripple)
      ripple_.emplace(graph_, store_, cfg_);
    else
      recompute_.emplace(graph_, store_, cfg_);
  }

  streaming_session(const streaming_session&) = delete;
  streaming_session& operator=(const streaming_session&) = delete;

  batch_result process(std::span<const update_record> batch) {
    return ripple_ ? ripple_->process(batch) : recompute_->process(batch);
  }

  std::vector<double> verify() const { return verify_against_oracle(graph_, store_, cfg_); }

  const dynamic_graph& graph() const noexcept { return graph_; }
  const embedding_store& store() const noexcept { return store_; }
  const model_config& model() const noexcept { return cfg_; }
  strategy kind() const noexcept { return strategy_; }

private:
  dynamic_graph graph_;
  embedding_store store_;
  model_config cfg_;
  strategy strategy_;
  std::optional<ripple_engine> ripple_;
  std::optional<recompute_engine> recompute_;
};

/// Splits a stream into consecutive batches of at most batch_size records.
inline std::vector<std::span<const update_record>> make_batches(std::span<const update_record> stream,
                                                                std::size_t batch_size) {
  if (batch_size == 0)
    throw error("batch size must be positive");
  std::vector<std::span<const update_record>> out;
  for (std::size_t i = 0; i < stream.size(); i += batch_size)
    out.push_back(stream.subspan(i, std::min(batch_size, stream.size() - i)));
  return out;
}

/// Wall time of one process() call, which covers validation, graph mutation
/// and propagation.
struct timed_batch {
  batch_result result;
  double latency_us = 0;
};

inline timed_batch run_timed(streaming_session& session, std::span<const update_record> batch, std::uint64_t id) {
  const auto start = std::chrono::steady_clock::now();
  timed_batch out{session.process(batch), 0};
  out.latency_us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
  out.result.batch_id = id;
  return out;
}

struct metrics_options {
  bool timings = true;
  bool label_detail = false;
  bool comm = false;
  std::optional<std::string> strategy_name;
};

/// One metrics-stream line (JSON object) for a batch.
inline nlohmann::ordered_json batch_to_json(const batch_result& r, const metrics_options& opt = {}) {
  nlohmann::ordered_json j;
  j["batch_id"] = r.batch_id;
  if (opt.strategy_name)
    j["strategy"] = *opt.strategy_name;
  j["size"] = r.size;
  j["affected"] = r.affected_per_hop;
  j["changed_labels"] = r.changed_labels.size();
  if (opt.label_detail) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& [v, c] : r.changed_labels)
      arr.push_back({v, c.before, c.after});
    j["labels"] = std::move(arr);
  }
  j["ops"] = {{"aggregate", r.ops.aggregate_ops}, {"update_calls", r.ops.update_calls}, {"messages", r.ops.messages}};
  if (opt.comm)
    j["comm"] = {{"frames", r.comm.frames}, {"bytes", r.comm.bytes}, {"payload_bytes", r.comm.payload_bytes}};
  if (opt.timings)
    j["timings_us"] = {{"update", r.timings.update_us},
                       {"apply", r.timings.apply_us},
                       {"compute", r.timings.compute_us},
                       {"comm", r.timings.comm_us},
                       {"total", r.timings.total_us()}};
  return j;
}

/// Field names that vary run to run; stripped before determinism checks.
inline void strip_timing_fields(nlohmann::ordered_json& j) {
  j.erase("timings_us");
  j.erase("latency_us");
}

/// Schema check for one metrics line.
inline bool valid_metrics_line(const nlohmann::ordered_json& j) {
  if (!j.is_object())
    return false;
  for (const char* key : {"batch_id", "size", "changed_labels"})
    if (!j.contains(key) || !j[key].is_number_unsigned())
      return false;
  if (!j.contains("affected") || !j["affected"].is_array())
    return false;
  for (const auto& a : j["affected"])
    if (!a.is_number_unsigned())
      return false;
  if (!j.contains("ops") || !j["ops"].is_object())
    return false;
  for (const char* key : {"aggregate", "update_calls", "messages"})
    if (!j["ops"].contains(key) || !j["ops"][key].is_number_unsigned())
      return false;
  if (j.contains("timings_us")) {
    for (const char* key : {"update", "apply", "compute", "comm", "total"})
      if (!j["timings_us"].contains(key) || !j["timings_us"][key].is_number())
        return false;
  }
  return true;
}

inline double percentile(std::vector<double> values, double q) {
  if (values.empty())
    return 0.0;
  std::sort(values.begin(), values.end());
  const double rank = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(rank);
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (rank - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

/// Aggregate of one (strategy, depth, batch size) benchmark cell.
struct bench_cell {
  strategy strat = strategy::ripple;
  std::size_t layers = 0;
  std::size_t batch_size = 0;
  std::size_t updates = 0;
  std::size_t batches = 0;
  double total_us = 0;
  double throughput = 0; // updates per second
  double median_latency_us = 0;
  double p99_latency_us = 0;
  std::vector<double> affected_fraction; // mean over batches, per hop
  op_counters ops;
  comm_counters comm;
};

inline bench_cell summarize(strategy strat, std::size_t layers, std::size_t batch_size, std::size_t num_vertices,
                            const std::vector<timed_batch>& batches) {
  bench_cell cell;
  cell.strat = strat;
  cell.layers = layers;
  cell.batch_size = batch_size;
  cell.batches = batches.size();
  cell.affected_fraction.assign(layers, 0.0);
  std::vector<double> latencies;
  for (const auto& b : batches) {
    cell.updates += b.result.size;
    cell.total_us += b.latency_us;
    latencies.push_back(b.latency_us);
    cell.ops += b.result.ops;
    cell.comm += b.result.comm;
    for (std::size_t l = 0; l < layers && l < b.result.affected_per_hop.size(); ++l)
      cell.affected_fraction[l] += static_cast<double>(b.result.affected_per_hop[l]) / static_cast<double>(num_vertices);
  }
  if (!batches.empty())
    for (auto& f : cell.affected_fraction)
      f /= static_cast<double>(batches.size());
  cell.throughput = cell.total_us > 0 ? static_cast<double>(cell.updates) / (cell.total_us * 1e-6) : 0.0;
  cell.median_latency_us = percentile(latencies, 0.5);
  cell.p99_latency_us = percentile(latencies, 0.99);
  return cell;
}

inline nlohmann::ordered_json cell_to_json(const bench_cell& c) {
  return {{"strategy", to_string(c.strat)},
          {"layers", c.layers},
          {"batch_size", c.batch_size},
          {"updates", c.updates},
          {"batches", c.batches},
          {"total_us", c.total_us},
          {"throughput", c.throughput},
          {"median_latency_us", c.median_latency_us},
          {"p99_latency_us", c.p99_latency_us},
          {"affected_fraction", c.affected_fraction},
          {"ops", {{"aggregate", c.ops.aggregate_ops}, {"update_calls", c.ops.update_calls}, {"messages", c.ops.messages}}},
          {"comm", {{"frames", c.comm.frames}, {"bytes", c.comm.bytes}, {"payload_bytes", c.comm.payload_bytes}}}};
}

} // namespace ripple
