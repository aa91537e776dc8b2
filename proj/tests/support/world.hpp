#pragma once

#include <memory>

#include "sks/graph/generators.hpp"
#include "sks/mapping/plan.hpp"
#include "sks/overlay/network.hpp"

namespace sks::testing {

/// A network with a graph deployed under some mapping.
struct World {
  graph::SocialMultiGraph graph;
  mapping::MappingPlan plan;
  std::unique_ptr<overlay::Network> net;
};

inline overlay::SimConfig quiet_config(std::uint64_t seed) {
  overlay::SimConfig cfg;
  cfg.seed = seed;
  cfg.latency = overlay::LatencyModel::uniform_delay(SimDuration{20'000}, SimDuration{120'000});
  return cfg;
}

inline World make_world(graph::SocialMultiGraph g, mapping::MappingPlan plan, overlay::SimConfig cfg) {
  World w{std::move(g), std::move(plan), std::make_unique<overlay::Network>(cfg)};
  mapping::deploy(*w.net, w.graph, w.plan);
  return w;
}

inline World random_world(graph::SocialMultiGraph g, std::size_t peers, std::uint32_t k, std::uint64_t seed) {
  auto plan = mapping::random_mapping(g.vertex_uids(), mapping::synthetic_peers(peers, seed), k, seed);
  return make_world(std::move(g), std::move(plan), quiet_config(seed));
}

}  // namespace sks::testing
