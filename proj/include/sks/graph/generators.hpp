#pragma once

#include <cstdint>
#include <string>

#include "sks/graph/multigraph.hpp"

namespace sks::graph {

/// Pseudo-random UID for synthetic vertex `index`.
Uid synthetic_uid(std::uint64_t seed, std::uint64_t index);

/// Power-law degrees with planted communities (LFR-style wiring). The
/// result is bidirectional: every tie appears once in each direction.
struct CommunityGraphParams {
  std::size_t users = 1000;
  /// Mean of the drawn degree sequence. Colliding stub pairs are dropped, so
  /// the realized mean degree comes out roughly 15% lower.
  double avg_degree = 7.0;
  double degree_exponent = 2.5;
  std::uint32_t max_degree = 60;
  std::uint32_t min_community = 15;
  std::uint32_t max_community = 60;
  double community_exponent = 1.5;
  double mixing = 0.2;  // fraction of each user's ties leaving its community
  std::string label = "social";
  double initial_weight = 0.1;
};

SocialMultiGraph community_social_graph(const CommunityGraphParams& p, std::uint64_t seed);

/// Connected sparse graph with low clustering and a heavy-tailed degree
/// distribution, sized like a P2P file-sharing overlay snapshot.
struct SparseGraphParams {
  std::size_t users = 10876;
  std::size_t edges = 39994;  // undirected
  double tail_exponent = 2.2;
  double max_weight_factor = 12.0;  // cap on a vertex's attachment weight relative to the minimum
  std::string label = "p2p";
};

SocialMultiGraph sparse_p2p_graph(const SparseGraphParams& p, std::uint64_t seed);

}  // namespace sks::graph
