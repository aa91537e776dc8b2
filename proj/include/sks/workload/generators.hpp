#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sks/core/rng.hpp"
#include "sks/graph/multigraph.hpp"
#include "sks/inference/params.hpp"

namespace sks::workload {

/// Users ranked by social degree and cut into groups; group 0 holds the
/// highest-degree users. A request or update source is drawn by first
/// picking a group, then a member of it.
struct DegreeRankModel {
  std::vector<std::vector<graph::VertexId>> groups;
  std::vector<double> probability;

  /// `groups` equal-size rank groups (fewer if there are fewer users) with
  /// probability proportional to 1 / (g + 1)^zipf_s.
  static DegreeRankModel zipf(const graph::SocialMultiGraph& g, std::size_t groups = 10, double zipf_s = 1.0);
  /// Same groups, probabilities taken from a cumulative distribution.
  /// Throws InvalidArgument unless the CDF is non-decreasing, has one entry
  /// per group and ends at 1.
  static DegreeRankModel from_cdf(const graph::SocialMultiGraph& g, const std::vector<double>& cdf);

  std::size_t group_of(graph::VertexId v) const;
};

/// Draws users from a model. Within a group, users are drawn without
/// repetition until the group's pool is used up, then the pool refills.
class SourceSampler {
 public:
  SourceSampler(const DegreeRankModel& model, std::uint64_t seed);
  graph::VertexId next();

 private:
  const DegreeRankModel* model_;
  Rng rng_;
  std::vector<std::vector<graph::VertexId>> pools_;
};

struct Schedule {
  SimTime start{};
  /// Mean gap between consecutive items (exponential gaps); zero puts every
  /// item at `start`.
  SimDuration mean_gap{0};
};

/// Adjust-weight records of +0.01 on an edge from a degree-drawn ego to a
/// uniformly chosen out-neighbor. Sequence numbers continue each ego's log
/// in `g`. Egos without out-edges are redrawn.
std::vector<graph::EdgeUpdateRecord> gen_weight_updates(const DegreeRankModel& model, const graph::SocialMultiGraph& g,
                                                        std::size_t count, std::uint64_t seed,
                                                        const Schedule& when = {}, double delta = 0.01);

struct NeighborhoodOptions {
  std::uint32_t min_radius = 1;
  std::uint32_t max_radius = 3;
  double max_chi = 0.1;
  std::optional<std::string> label;
  SimDuration timeout = kInfiniteDuration;
};

/// Degree-drawn ego, radius uniform in [min_radius, max_radius], chi uniform
/// in [0, max_chi]. Request ids run from `first_id`.
std::vector<inference::RequestLine> gen_neighborhood_requests(const DegreeRankModel& model,
                                                              const graph::SocialMultiGraph& g, std::size_t count,
                                                              std::uint64_t seed, const NeighborhoodOptions& opts = {},
                                                              const Schedule& when = {}, std::uint64_t first_id = 1);

/// Per-source request budgets, ceil of a Pareto draw with minimum 1.
std::vector<std::uint32_t> strength_budgets(std::size_t sources, double exponent, std::uint64_t seed);

/// Sources are taken in a seeded order without repetition; each one issues
/// its whole budget of requests, each to a uniformly drawn distinct
/// destination. Throws InvalidArgument with fewer than two users.
std::vector<inference::RequestLine> gen_strength_requests(const graph::SocialMultiGraph& g, std::size_t count,
                                                          std::uint64_t seed, double budget_exponent = 1.5,
                                                          SimDuration timeout = kInfiniteDuration,
                                                          const Schedule& when = {}, std::uint64_t first_id = 1);

}  // namespace sks::workload
