// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace graphfuse {

/// Directed edge list over batch-offset node ids. Sample i owns nodes
/// [offsets[i], offsets[i] + lengths[i]).
struct EdgeIndex {
  std::vector<std::size_t> sources;
  std::vector<std::size_t> targets;
  std::vector<std::size_t> offsets;
  std::size_t node_count = 0;

  std::size_t edge_count() const { return sources.size(); }
};

/// Complete graph with self-loops inside each sample, nothing across
/// samples. Edges are enumerated per sample, source-major. Every length
/// must be >= 1 (ContractError otherwise).
EdgeIndex build_fully_connected(std::span<const std::size_t> lengths);

}  // namespace graphfuse
