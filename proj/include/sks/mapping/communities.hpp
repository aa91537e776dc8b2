#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "sks/graph/adjacency.hpp"

namespace sks::mapping {

/// Partition of the vertices of an Adjacency. Labels are dense, numbered in
/// order of each community's lowest vertex.
struct Communities {
  std::vector<std::uint32_t> label;
  std::uint32_t count = 0;
  /// False when a best-effort run stopped short of the requested count.
  bool reached_target = true;

  std::vector<std::vector<std::uint32_t>> members() const;
};

/// Relabels arbitrary labels into the canonical dense form.
Communities canonical(const std::vector<std::uint32_t>& raw);

/// Shortest-path edge betweenness (Brandes), keyed by (min, max) endpoint.
/// Each unordered pair of vertices contributes once.
std::map<std::pair<std::uint32_t, std::uint32_t>, double> edge_betweenness(const graph::Adjacency& adj);

/// Girvan-Newman splitting that only accepts a split when both sides have at
/// least `min_size` vertices. Removing an edge that would cut off a smaller
/// piece is undone and the edge is never tried again. Betweenness is
/// recomputed after every removal, for the affected component only.
Communities girvan_newman(const graph::Adjacency& adj, std::uint32_t target, std::uint32_t min_size);

double modularity(const graph::Adjacency& adj, const std::vector<std::uint32_t>& label);

/// One full Louvain run (local moves plus aggregation until stable).
Communities louvain(const graph::Adjacency& adj, std::uint64_t seed);

/// Louvain, then repeatedly re-runs Louvain on the largest community until
/// there are `target` communities. A community Louvain cannot split is cut
/// in two along BFS order; surplus parts are merged into their best-connected
/// sibling so the count lands exactly on `target`.
Communities recursive_louvain(const graph::Adjacency& adj, std::uint32_t target, std::uint64_t seed);

}  // namespace sks::mapping
