#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sks/acp/policy.hpp"
#include "sks/graph/multigraph.hpp"
#include "sks/inference/params.hpp"

namespace sks::inference {

/// One read of a user's data on behalf of a request.
struct AccessRequest {
  Uid owner;
  acp::DataRequest data;
  std::vector<Uid> intermediate_users;
  std::vector<PeerId> intermediate_peers;
};

/// Decides whether an owner releases data. An empty gate grants everything.
using AccessGate = std::function<acp::Verdict(const AccessRequest&)>;

/// Gate backed by per-user policies. Users without a policy are permissive.
/// Social distance is measured on `graph` from the owner to the originator.
class PolicyGate {
 public:
  PolicyGate(const graph::SocialMultiGraph& graph, const std::unordered_map<Uid, acp::AccessPolicy>& policies,
             SimTime now, Uid originator, PeerId originator_peer, std::string application,
             std::optional<GeoPoint> originator_location = std::nullopt);

  acp::Verdict operator()(const AccessRequest& req) const;

 private:
  const graph::SocialMultiGraph* graph_;
  const std::unordered_map<Uid, acp::AccessPolicy>* policies_;
  SimTime now_;
  Uid originator_;
  PeerId originator_peer_;
  std::string application_;
  std::optional<GeoPoint> originator_location_;
};

/// Hops from `from` to `to` along out-edges satisfying the constraint, up to
/// c.max_hops; nullopt when farther or unreachable.
std::optional<std::uint32_t> constrained_distance(const graph::SocialMultiGraph& g, Uid from, Uid to,
                                                  const acp::PathConstraint& c, SimTime now);

bool relation_test(const graph::SocialMultiGraph& g, Uid ego, Uid alter, const std::optional<std::string>& label,
                   double min_weight, SimTime now, const AccessGate& gate = {});

/// Without a label each neighbor is scored by its heaviest labeled edge.
std::vector<ScoredUser> top_relations(const graph::SocialMultiGraph& g, Uid ego,
                                      const std::optional<std::string>& label, std::uint32_t n, SimTime now,
                                      const AccessGate& gate = {});

/// Label-summed weight towards j over the largest label-summed weight among
/// i's out-neighbors. Throws UndefinedPair if j is not an out-neighbor of i.
double normalized_weight(const graph::SocialMultiGraph& g, Uid i, Uid j, SimTime now);

/// Label-summed weight from `v` to each out-neighbor, skipping edges lighter than `floor`.
std::vector<std::pair<Uid, double>> neighbor_sums(const graph::SocialMultiGraph& g, graph::VertexId v, SimTime now,
                                                   double floor = 0.0);

/// nw values from one user's neighbor sums; the map is keyed by neighbor.
std::map<Uid, double> normalize(const std::vector<std::pair<Uid, double>>& sums);

/// One factor of the strength product: a direct tie (via empty) or a
/// two-hop path ego -> via -> alter.
struct StrengthPath {
  std::optional<Uid> via;
  double nw = 0.0;  // nw of the direct tie, or min of the two hops

  bool operator==(const StrengthPath&) const = default;
};

/// Direct tie first, then paths by ascending intermediate Uid.
std::vector<StrengthPath> strength_paths(const graph::SocialMultiGraph& g, Uid ego, Uid alter, SimTime now,
                                         const AccessGate& gate = {});

/// 1 - prod(1 - nw/2), folded in the given order.
double fold_strength(const std::vector<StrengthPath>& paths);

double social_strength(const graph::SocialMultiGraph& g, Uid ego, Uid alter, SimTime now,
                       const AccessGate& gate = {});

/// Users within `radius` hops over edges carrying `label` (any if nullopt)
/// with weight >= min_weight on every hop. Score is the hop count; sorted by
/// (hops, uid). Ego is not part of its own neighborhood.
std::vector<ScoredUser> neighborhood(const graph::SocialMultiGraph& g, Uid ego,
                                     const std::optional<std::string>& label, double min_weight,
                                     std::uint32_t radius, SimTime now, const AccessGate& gate = {});

/// Neighborhood filtered by distance from ego's location and freshness.
/// Score is the distance in meters; sorted by (distance, uid). Throws
/// InvalidArgument when ego has no location.
std::vector<ScoredUser> proximity(const graph::SocialMultiGraph& g, Uid ego, const std::optional<std::string>& label,
                                  double min_weight, std::uint32_t radius, double distance_m,
                                  std::optional<SimTime> fresh_after, SimTime now, const AccessGate& gate = {});

/// Whether a user's stored location passes the proximity filter.
bool location_matches(const graph::VertexAttributes& who, const GeoPoint& ego_location, double distance_m,
                      std::optional<SimTime> fresh_after, double* meters = nullptr);

/// Runs any request kind on a single graph. Access denial for ego is an
/// outcome rather than an exception.
InferenceResult evaluate(const graph::SocialMultiGraph& g, const InferenceParams& p, SimTime now,
                         const AccessGate& gate = {});

}  // namespace sks::inference
