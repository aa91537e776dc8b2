#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "sks/core/ids.hpp"
#include "sks/graph/multigraph.hpp"
#include "sks/mapping/communities.hpp"

namespace sks::overlay {
class Network;
}

namespace sks::mapping {

enum class MappingKind { random, social };
std::string_view to_string(MappingKind k);
std::optional<MappingKind> parse_mapping_kind(std::string_view s);

struct MappingPlan {
  MappingKind kind = MappingKind::random;
  std::uint32_t replication = 1;  // K
  std::vector<PeerId> peers;
  /// Replica peers per user; the first one is the user's home peer.
  std::map<Uid, std::vector<PeerId>> assignment;

  /// Mean number of users held per peer.
  double users_per_peer() const;
  std::map<PeerId, std::vector<Uid>> users_by_peer() const;
};

/// K = max(1, round(N / base)).
std::uint32_t replication_for(double users_per_peer, double base_density = 10.0);

std::vector<PeerId> synthetic_peers(std::size_t count, std::uint64_t seed);

/// Balanced draw: each replica round deals a fresh permutation of the users
/// onto the peers, so loads differ by at most one per round. Throws
/// InvalidArgument when K exceeds the number of peers.
MappingPlan random_mapping(const std::vector<Uid>& users, const std::vector<PeerId>& peers, std::uint32_t k,
                           std::uint64_t seed);

/// One community per peer (shuffled). Extra replicas go to the peers of the
/// communities a user has most ties into, then to those its community has
/// most ties into, then to random peers. Community i of `c` labels vertex i
/// of `g`'s undirected view.
MappingPlan social_mapping(const graph::SocialMultiGraph& g, const Communities& c, const std::vector<PeerId>& peers,
                           std::uint32_t k, std::uint64_t seed);

MappingPlan social_mapping_betweenness(const graph::SocialMultiGraph& g, const std::vector<PeerId>& peers,
                                       std::uint32_t min_size, std::uint32_t k, std::uint64_t seed);

/// floor(|users| / N) communities, one peer each.
MappingPlan social_mapping_louvain(const graph::SocialMultiGraph& g, double users_per_peer, std::uint32_t k,
                                   std::uint64_t seed);

/// `uid,peer_id_1[,peer_id_2,...]`, users ascending.
void write_plan_csv(std::ostream& out, const MappingPlan& plan);

/// Fraction of undirected ties whose endpoints share a home peer.
double local_tie_fraction(const graph::SocialMultiGraph& g, const MappingPlan& plan);

/// Creates the plan's peers, loads `g` as the authoritative data, provisions
/// every user's trusted group from its replicas and registers peer owners.
void deploy(overlay::Network& net, const graph::SocialMultiGraph& g, const MappingPlan& plan);

}  // namespace sks::mapping
