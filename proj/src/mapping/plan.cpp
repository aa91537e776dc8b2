#include "sks/mapping/plan.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>

#include "sks/core/errors.hpp"
#include "sks/core/rng.hpp"
#include "sks/overlay/network.hpp"

namespace sks::mapping {

std::string_view to_string(MappingKind k) { return k == MappingKind::random ? "random" : "social"; }

std::optional<MappingKind> parse_mapping_kind(std::string_view s) {
  if (s == "random") return MappingKind::random;
  if (s == "social") return MappingKind::social;
  return std::nullopt;
}

double MappingPlan::users_per_peer() const {
  if (peers.empty()) return 0.0;
  std::size_t total = 0;
  for (const auto& [u, ps] : assignment) total += ps.size();
  return static_cast<double>(total) / static_cast<double>(peers.size());
}

std::map<PeerId, std::vector<Uid>> MappingPlan::users_by_peer() const {
  std::map<PeerId, std::vector<Uid>> out;
  for (PeerId p : peers) out[p];
  for (const auto& [u, ps] : assignment)
    for (PeerId p : ps) out[p].push_back(u);
  return out;
}

std::uint32_t replication_for(double users_per_peer, double base_density) {
  return static_cast<std::uint32_t>(std::max(1.0, std::round(users_per_peer / base_density)));
}

std::vector<PeerId> synthetic_peers(std::size_t count, std::uint64_t seed) {
  std::vector<PeerId> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(PeerId{Id128{mix_keys({seed, i, 0x9EE5}), mix_keys({seed, i, 0x1D})}});
  return out;
}

MappingPlan random_mapping(const std::vector<Uid>& users, const std::vector<PeerId>& peers, std::uint32_t k,
                           std::uint64_t seed) {
  if (k == 0) throw InvalidArgument("replication factor must be at least 1");
  if (k > peers.size()) throw InvalidArgument("replication factor exceeds the number of peers");
  MappingPlan plan;
  plan.kind = MappingKind::random;
  plan.replication = k;
  plan.peers = peers;
  std::vector<Uid> sorted = users;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const std::size_t p = peers.size();
  std::vector<std::vector<std::size_t>> chosen(n);
  Rng rng(mix_keys({seed, 0x7A2D}));
  for (std::uint32_t round = 0; round < k; ++round) {
    // slot i of the round goes to peer (offset + i) mod p; users are dealt in random order
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(order);
    const std::size_t offset = rng.below(p);
    std::vector<std::size_t> slot_peer(n);
    for (std::size_t i = 0; i < n; ++i) slot_peer[i] = (offset + i) % p;
    auto taken = [&](std::size_t user, std::size_t peer) {
      return std::find(chosen[user].begin(), chosen[user].end(), peer) != chosen[user].end();
    };
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken(order[i], slot_peer[i])) continue;
      // swap with another slot so that neither user holds its peer twice
      for (std::size_t tries = 0; tries < 4 * n; ++tries) {
        const std::size_t j = rng.below(n);
        if (j == i || slot_peer[i] == slot_peer[j]) continue;
        if (!taken(order[i], slot_peer[j]) && !taken(order[j], slot_peer[i])) {
          std::swap(order[i], order[j]);
          break;
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto& c = chosen[order[i]];
      if (std::find(c.begin(), c.end(), slot_peer[i]) == c.end()) {
        c.push_back(slot_peer[i]);
        continue;
      }
      for (std::size_t q = 0; q < p; ++q)
        if (std::find(c.begin(), c.end(), q) == c.end()) {
          c.push_back(q);
          break;
        }
    }
  }
  for (std::size_t u = 0; u < n; ++u) {
    auto& list = plan.assignment[sorted[u]];
    for (auto q : chosen[u]) list.push_back(peers[q]);
  }
  return plan;
}

MappingPlan social_mapping(const graph::SocialMultiGraph& g, const Communities& c, const std::vector<PeerId>& peers,
                           std::uint32_t k, std::uint64_t seed) {
  if (peers.empty()) throw InvalidArgument("social mapping needs at least one peer");
  if (k == 0 || k > peers.size()) throw InvalidArgument("replication factor must be in [1, peers]");
  if (c.label.size() != g.num_vertices()) throw InvalidArgument("community labels do not match the graph");
  MappingPlan plan;
  plan.kind = MappingKind::social;
  plan.replication = k;
  plan.peers = peers;

  Rng rng(mix_keys({seed, 0x50C1A1}));
  std::vector<std::size_t> perm(peers.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  rng.shuffle(perm);
  auto peer_of = [&](std::uint32_t community) { return perm[community % peers.size()]; };

  const auto adj = graph::undirected_view(g);
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> between;
  for (std::uint32_t v = 0; v < adj.num_vertices(); ++v)
    for (auto w : adj.neighbors(v))
      if (c.label[v] != c.label[w]) ++between[{c.label[v], c.label[w]}];
  std::vector<std::vector<std::pair<std::size_t, std::uint32_t>>> near(c.count);  // (ties, community)
  for (const auto& [cc, n] : between) near[cc.first].push_back({n, cc.second});
  for (auto& list : near)
    std::sort(list.begin(), list.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });

  for (graph::VertexId v = 0; v < g.num_vertices(); ++v) {
    const std::uint32_t own = c.label[v];
    std::vector<std::size_t> chosen{peer_of(own)};
    auto add = [&](std::size_t q) {
      if (chosen.size() < k && std::find(chosen.begin(), chosen.end(), q) == chosen.end()) chosen.push_back(q);
    };
    if (k > 1) {
      std::map<std::uint32_t, std::size_t> ties;
      for (auto w : adj.neighbors(v))
        if (c.label[w] != own) ++ties[c.label[w]];
      std::vector<std::pair<std::size_t, std::uint32_t>> ranked;
      for (const auto& [cc, n] : ties) ranked.push_back({n, cc});
      std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        const auto ia = between.find({own, a.second}), ib = between.find({own, b.second});
        const std::size_t na = ia == between.end() ? 0 : ia->second, nb = ib == between.end() ? 0 : ib->second;
        return na != nb ? na > nb : a.second < b.second;
      });
      for (const auto& [n, cc] : ranked) add(peer_of(cc));
      for (const auto& [n, cc] : near[own]) add(peer_of(cc));
      Rng fill(mix_keys({seed, v, 0xF111}));
      while (chosen.size() < k) add(fill.below(peers.size()));
    }
    auto& list = plan.assignment[g.uid(v)];
    for (auto q : chosen) list.push_back(peers[q]);
  }
  return plan;
}

MappingPlan social_mapping_betweenness(const graph::SocialMultiGraph& g, const std::vector<PeerId>& peers,
                                       std::uint32_t min_size, std::uint32_t k, std::uint64_t seed) {
  const auto c = girvan_newman(graph::undirected_view(g), static_cast<std::uint32_t>(peers.size()), min_size);
  return social_mapping(g, c, peers, k, seed);
}

MappingPlan social_mapping_louvain(const graph::SocialMultiGraph& g, double users_per_peer, std::uint32_t k,
                                   std::uint64_t seed) {
  if (users_per_peer <= 0.0) throw InvalidArgument("users per peer must be positive");
  const auto target = std::max<std::uint32_t>(
      1, static_cast<std::uint32_t>(std::floor(static_cast<double>(g.num_vertices()) / users_per_peer)));
  const auto c = recursive_louvain(graph::undirected_view(g), target, seed);
  return social_mapping(g, c, synthetic_peers(c.count, seed), k, seed);
}

void write_plan_csv(std::ostream& out, const MappingPlan& plan) {
  for (const auto& [u, ps] : plan.assignment) {
    out << u.to_string();
    for (PeerId p : ps) out << ',' << p.to_string();
    out << '\n';
  }
}

double local_tie_fraction(const graph::SocialMultiGraph& g, const MappingPlan& plan) {
  const auto adj = graph::undirected_view(g);
  std::size_t local = 0, total = 0;
  for (std::uint32_t v = 0; v < adj.num_vertices(); ++v) {
    const auto hv = plan.assignment.find(g.uid(v));
    for (auto w : adj.neighbors(v)) {
      if (w < v) continue;
      ++total;
      const auto hw = plan.assignment.find(g.uid(w));
      if (hv != plan.assignment.end() && hw != plan.assignment.end() && hv->second.front() == hw->second.front())
        ++local;
    }
  }
  return total ? static_cast<double>(local) / static_cast<double>(total) : 0.0;
}

void deploy(overlay::Network& net, const graph::SocialMultiGraph& g, const MappingPlan& plan) {
  std::map<PeerId, Uid> owner;
  for (const auto& [u, ps] : plan.assignment) owner.emplace(ps.front(), u);  // lowest home user
  for (PeerId p : plan.peers) net.add_peer(p, owner.contains(p) ? owner[p] : Uid{});
  net.load_graph(g);
  for (const auto& [u, ps] : plan.assignment) net.provision(u, ps);
  std::map<Uid, std::vector<PeerId>> contributed;
  for (const auto& [p, u] : owner) contributed[u].push_back(p);
  for (auto& [u, ps] : contributed) net.register_user(u, std::move(ps));
}

}  // namespace sks::mapping
