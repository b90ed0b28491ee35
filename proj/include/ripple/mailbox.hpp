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
#include <optional>
#include <span>
#include <vector>

#include "ripple/graph.hpp"
#include "ripple/linalg.hpp"

namespace ripple {

/// One hop's mailboxes: a sparse accumulator of delta vectors keyed by vertex.
///
/// Entries keep first-arrival order so draining is deterministic. Lookup goes
/// through a dense vertex -> entry table that is reset entry by entry, so
/// clear() costs O(entries) and keeps all buffers allocated.
class mailbox {
public:
  mailbox() = default;
  mailbox(std::size_t num_vertices, std::size_t dim) : dim_(dim), index_(num_vertices, npos) {}

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return vertices_.size(); }
  bool empty() const noexcept { return vertices_.empty(); }

  /// delta += alpha * contribution; dirty is OR-ed.
  void add(vertex_id v, double alpha, std::span<const double> contribution, bool dirty) {
    const std::size_t i = slot_for(v);
    axpy(alpha, contribution, delta(i));
    dirty_[i] |= static_cast<std::uint8_t>(dirty);
  }

  /// Forces a recompute of v without changing its aggregate.
  void mark(vertex_id v) { dirty_[slot_for(v)] = 1; }

  std::optional<std::size_t> find(vertex_id v) const {
    const auto i = index_[v];
    return i == npos ? std::nullopt : std::optional<std::size_t>(i);
  }

  vertex_id vertex(std::size_t i) const noexcept { return vertices_[i]; }
  std::span<double> delta(std::size_t i) noexcept { return {deltas_.data() + i * dim_, dim_}; }
  std::span<const double> delta(std::size_t i) const noexcept { return {deltas_.data() + i * dim_, dim_}; }
  bool dirty(std::size_t i) const noexcept { return dirty_[i] != 0; }
  std::span<const vertex_id> vertices() const noexcept { return vertices_; }

  void clear() noexcept {
    for (auto v : vertices_)
      index_[v] = npos;
    vertices_.clear();
    deltas_.clear();
    dirty_.clear();
  }

private:
  static constexpr std::uint32_t npos = UINT32_MAX;

  std::size_t slot_for(vertex_id v) {
    auto& i = index_[v];
    if (i == npos) {
      i = static_cast<std::uint32_t>(vertices_.size());
      vertices_.push_back(v);
      deltas_.resize(deltas_.size() + dim_, 0.0);
      dirty_.push_back(0);
    }
    return i;
  }

  std::size_t dim_ = 0;
  std::vector<std::uint32_t> index_;
  std::vector<vertex_id> vertices_;
  std::vector<double> deltas_;
  std::vector<std::uint8_t> dirty_;
};

/// Insertion-ordered vertex set with O(1) membership, used for RC frontiers.
class vertex_set {
public:
  vertex_set() = default;
  explicit vertex_set(std::size_t num_vertices) : member_(num_vertices, 0) {}

  bool insert(vertex_id v) {
    if (member_[v])
      return false;
    member_[v] = 1;
    items_.push_back(v);
    return true;
  }

  bool contains(vertex_id v) const noexcept { return member_[v] != 0; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  std::span<const vertex_id> items() const noexcept { return items_; }

  void clear() noexcept {
    for (auto v : items_)
      member_[v] = 0;
    items_.clear();
  }

private:
  std::vector<std::uint8_t> member_;
  std::vector<vertex_id> items_;
};

} // namespace ripple
