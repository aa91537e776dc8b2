#include "sks/resilience/influence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "sks/core/errors.hpp"
#include "sks/core/rng.hpp"
#include "sks/graph/adjacency.hpp"
#include "sks/inference/distributed.hpp"
#include "sks/overlay/network.hpp"

namespace sks::resilience {

void InfluenceLedger::record(const std::vector<PeerId>& secondary) {
  ++total;
  std::vector<std::uint32_t> idx;
  idx.reserve(secondary.size());
  for (PeerId p : secondary) idx.push_back(index_of(p));
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  for (auto i : idx) ++served[peers[i]];
  servers.push_back(std::move(idx));
}

std::uint32_t InfluenceLedger::index_of(PeerId p) const {
  const auto it = std::lower_bound(peers.begin(), peers.end(), p);
  if (it == peers.end() || *it != p) throw InvalidArgument("peer " + p.to_string() + " is not in the ledger");
  return static_cast<std::uint32_t>(it - peers.begin());
}

double InfluenceLedger::influence(PeerId p) const {
  if (total == 0) return 0.0;
  const auto it = served.find(p);
  return it == served.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
}

std::vector<double> InfluenceLedger::influences() const {
  std::vector<double> out;
  out.reserve(peers.size());
  for (PeerId p : peers) out.push_back(influence(p));
  return out;
}

double InfluenceLedger::mean_influence() const {
  if (peers.empty()) return 0.0;
  const auto xs = influences();
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

InfluenceLedger run_influence_experiment(const graph::SocialMultiGraph& g, const mapping::MappingPlan& plan,
                                         const InfluenceOptions& opts) {
  overlay::SimConfig cfg;
  cfg.seed = opts.seed;
  cfg.latency = overlay::LatencyModel::constant_delay(SimDuration{50'000});
  overlay::Network net(cfg);
  mapping::deploy(net, g, plan);

  InfluenceLedger ledger;
  ledger.peers = plan.peers;
  std::sort(ledger.peers.begin(), ledger.peers.end());

  inference::DistributedExecutor ex(net);
  ex.on_finish = [&](const inference::RequestRecord& rec) {
    if (rec.result.outcome != inference::Outcome::ok || rec.result.partial)
      throw Error("influence request " + std::to_string(rec.id) + " did not complete");
    ledger.record(rec.secondary_peers);
  };
  const auto users = g.vertex_uids();
  std::uint64_t id = 0;
  for (Uid u : users) {
    inference::RequestLine line;
    line.id = ++id;
    line.at = net.now();
    line.entry = plan.assignment.at(u).front();
    line.params.kind = inference::InferenceKind::neighborhood;
    line.params.ego = u;
    line.params.radius = opts.hops;
    ex.submit(line);
    ex.run();
    ex.forget(line.id);
    if (opts.progress) opts.progress(id, users.size());
  }
  return ledger;
}

std::string_view to_string(CollusionKind k) { return k == CollusionKind::random ? "random" : "social"; }

std::optional<CollusionKind> parse_collusion_kind(std::string_view s) {
  if (s == "random") return CollusionKind::random;
  if (s == "social") return CollusionKind::social;
  return std::nullopt;
}

std::size_t CollusionSets::colluders() const {
  std::size_t n = 0;
  for (const auto& s : sets) n += s.size();
  return n;
}

CollusionSets build_collusion(const mapping::MappingPlan& plan, const graph::SocialMultiGraph& g,
                              const CollusionConfig& cfg) {
  if (!(cfg.seed_fraction >= 0.0 && cfg.seed_fraction <= 1.0 && cfg.target_fraction >= 0.0 &&
        cfg.target_fraction <= 1.0))
    throw InvalidArgument("collusion fractions must lie in [0,1]");
  if (cfg.target_fraction < cfg.seed_fraction) throw InvalidArgument("C must be at least the seed fraction");
  std::vector<PeerId> peers = plan.peers;
  std::sort(peers.begin(), peers.end());
  const std::size_t np = peers.size();
  if (np == 0) return {};
  const auto target = static_cast<std::size_t>(std::llround(cfg.target_fraction * static_cast<double>(np)));
  const auto seeds = std::min(
      target, std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.seed_fraction * static_cast<double>(np)))));

  Rng rng(mix_keys({cfg.seed, 0xC011}));
  std::vector<std::uint32_t> order(np);
  std::iota(order.begin(), order.end(), 0u);
  rng.shuffle(order);

  std::vector<bool> taken(np, false);
  std::vector<std::vector<std::uint32_t>> sets(seeds);
  for (std::size_t s = 0; s < seeds; ++s) {
    sets[s].push_back(order[s]);
    taken[order[s]] = true;
  }

  // users hosted per peer index, and peer indices per vertex
  std::vector<std::vector<graph::VertexId>> hosted(np);
  std::vector<std::vector<std::uint32_t>> hosts(g.num_vertices());
  for (const auto& [u, ps] : plan.assignment) {
    const auto v = g.find(u);
    if (!v) continue;
    for (PeerId p : ps) {
      const auto i = static_cast<std::uint32_t>(std::lower_bound(peers.begin(), peers.end(), p) - peers.begin());
      hosted[i].push_back(*v);
      hosts[*v].push_back(i);
    }
  }
  const auto adj = graph::undirected_view(g);
  std::vector<std::vector<std::uint64_t>> ties;
  auto absorb = [&](std::size_t s, std::uint32_t peer) {
    for (auto v : hosted[peer])
      for (auto w : adj.neighbors(v))
        for (auto q : hosts[w]) ++ties[s][q];
  };
  if (cfg.kind == CollusionKind::social) {
    ties.assign(seeds, std::vector<std::uint64_t>(np, 0));
    for (std::size_t s = 0; s < seeds; ++s) absorb(s, sets[s][0]);
  }

  CollusionSets out;
  std::size_t count = seeds;
  std::vector<std::uint32_t> free_order;  // random growth draws from here
  for (auto i : order)
    if (!taken[i]) free_order.push_back(i);
  std::size_t free_next = 0;
  auto next_free = [&]() -> std::uint32_t {
    while (taken[free_order[free_next]]) ++free_next;
    return free_order[free_next];
  };
  while (count < target) {
    for (std::size_t s = 0; s < seeds && count < target; ++s) {
      std::optional<std::uint32_t> pick;
      if (cfg.kind == CollusionKind::social) {
        std::vector<std::uint32_t> adjacent;
        for (std::uint32_t q = 0; q < np; ++q)
          if (!taken[q] && ties[s][q] > 0) adjacent.push_back(q);
        if (!adjacent.empty()) pick = adjacent[rng.below(adjacent.size())];
        if (!pick) out.random_fill = true;
      }
      if (!pick) pick = next_free();
      taken[*pick] = true;
      sets[s].push_back(*pick);
      if (cfg.kind == CollusionKind::social) absorb(s, *pick);
      ++count;
    }
  }
  for (auto& s : sets) {
    std::vector<PeerId> ids;
    for (auto i : s) ids.push_back(peers[i]);
    std::sort(ids.begin(), ids.end());
    out.sets.push_back(std::move(ids));
  }
  return out;
}

double set_influence(const InfluenceLedger& ledger, const std::vector<PeerId>& set) {
  if (ledger.total == 0) return 0.0;
  std::vector<bool> member(ledger.peers.size(), false);
  for (PeerId p : set) member[ledger.index_of(p)] = true;
  std::uint64_t hit = 0;
  for (const auto& req : ledger.servers)
    if (std::any_of(req.begin(), req.end(), [&](std::uint32_t i) { return member[i]; })) ++hit;
  return static_cast<double>(hit) / static_cast<double>(ledger.total);
}

MeanCi mean_ci95(const std::vector<double>& xs) {
  MeanCi r;
  if (xs.empty()) return r;
  const double n = static_cast<double>(xs.size());
  r.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return r;
  double ss = 0.0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  r.half_width = boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(n);
  return r;
}

}  // namespace sks::resilience
