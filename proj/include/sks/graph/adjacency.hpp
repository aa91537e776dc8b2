#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sks/graph/multigraph.hpp"

namespace sks::graph {

/// Simple undirected graph in compressed adjacency form over dense indices.
class Adjacency {
 public:
  Adjacency() = default;
  /// Self loops dropped, duplicates merged, edges symmetrized.
  static Adjacency from_edges(std::size_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges);

  std::size_t num_vertices() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t num_edges() const { return targets_.size() / 2; }
  std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::uint32_t degree(std::uint32_t v) const { return offsets_[v + 1] - offsets_[v]; }

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> targets_;
};

/// Direction, labels and weights dropped; vertex i is graph VertexId i.
Adjacency undirected_view(const SocialMultiGraph& g);

/// Component label per vertex, labels numbered in order of first vertex.
std::vector<std::uint32_t> connected_components(const Adjacency& adj, std::uint32_t* count = nullptr);

/// Vertices of the largest component (ties: the one containing the lowest index), ascending.
std::vector<std::uint32_t> largest_component(const Adjacency& adj);

/// Undirected, unweighted version of `g` restricted to its largest connected
/// component: every adjacent pair gets one edge each way with `label`, weight 1.
SocialMultiGraph symmetrized_largest_component(const SocialMultiGraph& g, const std::string& label);

}  // namespace sks::graph
