#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "sks/core/ids.hpp"
#include "sks/graph/multigraph.hpp"
#include "sks/mapping/plan.hpp"

namespace sks::resilience {

/// Which peers serviced a secondary part of each request.
struct InfluenceLedger {
  std::vector<PeerId> peers;  // every peer of the plan, ascending
  std::uint64_t total = 0;
  std::map<PeerId, std::uint64_t> served;
  /// Per request, the sorted indices into `peers` that serviced it.
  std::vector<std::vector<std::uint32_t>> servers;

  void record(const std::vector<PeerId>& secondary);
  double influence(PeerId p) const;
  /// Mean over every peer of the plan, idle ones included.
  double mean_influence() const;
  std::vector<double> influences() const;  // in `peers` order
  std::uint32_t index_of(PeerId p) const;
};

struct InfluenceOptions {
  std::uint32_t hops = 2;
  std::uint64_t seed = 1;
  /// Called after every finished request with (done, total).
  std::function<void(std::size_t, std::size_t)> progress;
};

/// One `hops`-hop neighborhood request per user of `g`, each entering at the
/// user's home peer, run one at a time with T = inf, no churn and no
/// policies.
InfluenceLedger run_influence_experiment(const graph::SocialMultiGraph& g, const mapping::MappingPlan& plan,
                                         const InfluenceOptions& opts);

enum class CollusionKind { random, social };
std::string_view to_string(CollusionKind k);
std::optional<CollusionKind> parse_collusion_kind(std::string_view s);

struct CollusionConfig {
  CollusionKind kind = CollusionKind::random;
  double seed_fraction = 0.01;
  double target_fraction = 0.1;  // C
  std::uint64_t seed = 1;
};

struct CollusionSets {
  std::vector<std::vector<PeerId>> sets;  // disjoint, each sorted
  /// Set when social growth ran out of adjacent peers and filled randomly.
  bool random_fill = false;

  std::size_t colluders() const;
};

/// max(1, round(seed_fraction * P)) seeds, grown in rounds (one peer per set
/// per round) until round(C * P) peers collude. Random growth adds a
/// uniformly drawn free peer; social growth adds a uniformly drawn free peer
/// hosting a user with a social tie to one of the set's users, falling back
/// to random growth once no free peer is adjacent. Throws InvalidArgument when
/// C < seed_fraction or either lies outside [0, 1].
CollusionSets build_collusion(const mapping::MappingPlan& plan, const graph::SocialMultiGraph& g,
                              const CollusionConfig& cfg);

/// Fraction of requests in which any member serviced a part.
double set_influence(const InfluenceLedger& ledger, const std::vector<PeerId>& set);

struct MeanCi {
  double mean = 0.0;
  double half_width = 0.0;  // 95% Student t
};
MeanCi mean_ci95(const std::vector<double>& xs);

}  // namespace sks::resilience
