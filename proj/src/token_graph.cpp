// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/token_graph.hpp"

#include "graphfuse/errors.hpp"

namespace graphfuse {

EdgeIndex build_fully_connected(std::span<const std::size_t> lengths) {
  EdgeIndex g;
  std::size_t edges = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (lengths[i] == 0) {
      throw ContractError("sample " + std::to_string(i) + " has zero length");
    }
    edges += lengths[i] * lengths[i];
  }
  g.sources.reserve(edges);
  g.targets.reserve(edges);
  g.offsets.reserve(lengths.size());
  for (std::size_t n : lengths) {
    const std::size_t o = g.node_count;
    g.offsets.push_back(o);
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t t = 0; t < n; ++t) {
        g.sources.push_back(o + s);
        g.targets.push_back(o + t);
      }
    }
    g.node_count += n;
  }
  return g;
}

}  // namespace graphfuse
