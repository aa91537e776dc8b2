#include "sks/graph/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>
#include <vector>

#include "sks/core/errors.hpp"
#include "sks/core/rng.hpp"
#include "sks/graph/adjacency.hpp"

namespace sks::graph {

namespace {

std::uint64_t pair_key(std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Discrete power-law sample set whose mean is close to `mean`.
std::vector<std::uint32_t> power_law_degrees(std::size_t n, double mean, double exponent, std::uint32_t max_degree,
                                             Rng& rng) {
  std::vector<double> u(n);
  for (auto& x : u) {
    x = rng.uniform01();
    while (x <= 0.0) x = rng.uniform01();
  }
  auto realize = [&](double xm) {
    std::vector<std::uint32_t> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = xm / std::pow(u[i], 1.0 / (exponent - 1.0));
      d[i] = static_cast<std::uint32_t>(std::clamp(std::floor(v), 1.0, static_cast<double>(max_degree)));
    }
    return d;
  };
  auto avg = [&](const std::vector<std::uint32_t>& d) {
    return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
  };
  double lo = 0.5, hi = static_cast<double>(max_degree);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (avg(realize(mid)) < mean) lo = mid;
    else hi = mid;
  }
  return realize(hi);
}

}  // namespace

Uid synthetic_uid(std::uint64_t seed, std::uint64_t index) {
  return Uid{Id128{mix_keys({seed, index, 0xA11CE}), mix_keys({seed, index, 0xB0B})}};
}

SocialMultiGraph community_social_graph(const CommunityGraphParams& p, std::uint64_t seed) {
  if (p.users < 2) throw InvalidArgument("community graph needs at least two users");
  Rng rng(mix_keys({seed, 0xC0FFEE}));
  const std::size_t n = p.users;
  const auto degree = power_law_degrees(n, p.avg_degree, p.degree_exponent, p.max_degree, rng);

  // Community sizes.
  std::vector<std::uint32_t> sizes;
  std::size_t total = 0;
  while (total < n) {
    const double s = std::min<double>(p.max_community, std::floor(rng.pareto(p.min_community, p.community_exponent - 1.0)));
    auto size = static_cast<std::uint32_t>(std::max<double>(p.min_community, s));
    if (total + size > n) size = static_cast<std::uint32_t>(n - total);
    sizes.push_back(size);
    total += size;
  }
  if (sizes.size() > 1 && sizes.back() < p.min_community) {
    sizes[sizes.size() - 2] += sizes.back();
    sizes.pop_back();
  }

  // Membership: high-degree users first so they land in communities large enough.
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return degree[a] > degree[b]; });
  std::vector<std::uint32_t> community(n);
  std::vector<std::uint32_t> free(sizes.begin(), sizes.end());
  std::vector<std::uint32_t> internal(n);
  for (auto v : order) {
    const auto want = static_cast<std::uint32_t>(std::lround((1.0 - p.mixing) * degree[v]));
    std::vector<std::uint32_t> fits, any;
    for (std::uint32_t c = 0; c < sizes.size(); ++c) {
      if (free[c] == 0) continue;
      any.push_back(c);
      if (sizes[c] > want) fits.push_back(c);
    }
    const auto& pool = fits.empty() ? any : fits;
    const auto c = pool[rng.below(pool.size())];
    community[v] = c;
    --free[c];
    internal[v] = std::min(want, sizes[c] - 1);
  }

  std::unordered_set<std::uint64_t> seen;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  auto try_add = [&](std::uint32_t a, std::uint32_t b) {
    if (a == b || !seen.insert(pair_key(a, b)).second) return false;
    edges.emplace_back(a, b);
    return true;
  };

  std::vector<std::vector<std::uint32_t>> members(sizes.size());
  for (std::uint32_t v = 0; v < n; ++v) members[community[v]].push_back(v);
  for (const auto& m : members) {
    std::vector<std::uint32_t> stubs;
    for (auto v : m) stubs.insert(stubs.end(), internal[v], v);
    rng.shuffle(stubs);
    for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) try_add(stubs[i], stubs[i + 1]);
  }
  std::vector<std::uint32_t> ext;
  for (std::uint32_t v = 0; v < n; ++v) ext.insert(ext.end(), degree[v] > internal[v] ? degree[v] - internal[v] : 0, v);
  rng.shuffle(ext);
  for (std::size_t i = 0; i + 1 < ext.size(); i += 2) {
    if (community[ext[i]] == community[ext[i + 1]]) {
      // one retry against a random later stub keeps the mixing close to target
      const std::size_t j = i + 1 + rng.below(ext.size() - i - 1);
      std::swap(ext[i + 1], ext[j]);
    }
    if (community[ext[i]] != community[ext[i + 1]]) try_add(ext[i], ext[i + 1]);
  }

  // No isolated users, and one connected graph.
  std::vector<std::uint32_t> deg(n, 0);
  for (auto [a, b] : edges) ++deg[a], ++deg[b];
  for (std::uint32_t v = 0; v < n; ++v) {
    if (deg[v] > 0) continue;
    const auto& m = members[community[v]];
    for (int tries = 0; tries < 64; ++tries) {
      const auto w = m.size() > 1 ? m[rng.below(m.size())] : static_cast<std::uint32_t>(rng.below(n));
      if (try_add(v, w)) {
        ++deg[v], ++deg[w];
        break;
      }
    }
  }
  {
    std::uint32_t count = 0;
    auto label = connected_components(Adjacency::from_edges(n, edges), &count);
    if (count > 1) {
      std::vector<std::vector<std::uint32_t>> comps(count);
      for (std::uint32_t v = 0; v < n; ++v) comps[label[v]].push_back(v);
      std::size_t giant = 0;
      for (std::size_t c = 1; c < comps.size(); ++c)
        if (comps[c].size() > comps[giant].size()) giant = c;
      for (std::size_t c = 0; c < comps.size(); ++c) {
        if (c == giant) continue;
        const auto a = comps[c][rng.below(comps[c].size())];
        const auto b = comps[giant][rng.below(comps[giant].size())];
        try_add(a, b);
      }
    }
  }

  SocialMultiGraph g;
  for (std::uint32_t v = 0; v < n; ++v) g.ensure_vertex(synthetic_uid(seed, v));
  for (auto [a, b] : edges) {
    g.insert_edge(synthetic_uid(seed, a), synthetic_uid(seed, b), p.label, p.initial_weight);
    g.insert_edge(synthetic_uid(seed, b), synthetic_uid(seed, a), p.label, p.initial_weight);
  }
  return g;
}

SocialMultiGraph sparse_p2p_graph(const SparseGraphParams& p, std::uint64_t seed) {
  const std::size_t n = p.users;
  if (n < 2) throw InvalidArgument("sparse graph needs at least two users");
  if (p.edges < n - 1 || p.edges > n * (n - 1) / 2) throw InvalidArgument("edge count incompatible with a connected simple graph");
  Rng rng(mix_keys({seed, 0x6E07E11A}));

  std::vector<double> weight(n);
  for (auto& w : weight) w = std::min(p.max_weight_factor, rng.pareto(1.0, p.tail_exponent - 1.0));

  std::unordered_set<std::uint64_t> seen;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(p.edges);
  auto try_add = [&](std::uint32_t a, std::uint32_t b) {
    if (a == b || !seen.insert(pair_key(a, b)).second) return false;
    edges.emplace_back(a, b);
    return true;
  };

  // Random recursive tree keeps the graph connected with low clustering.
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  for (std::size_t i = 1; i < n; ++i) try_add(order[i], order[rng.below(i)]);

  // Remaining ties between weight-proportional endpoints (Chung-Lu style).
  std::vector<double> cumulative(n);
  std::partial_sum(weight.begin(), weight.end(), cumulative.begin());
  auto draw = [&] {
    const double r = rng.uniform01() * cumulative.back();
    return static_cast<std::uint32_t>(std::upper_bound(cumulative.begin(), cumulative.end(), r) - cumulative.begin());
  };
  while (edges.size() < p.edges) try_add(draw(), draw());

  SocialMultiGraph g;
  for (std::uint32_t v = 0; v < n; ++v) g.ensure_vertex(synthetic_uid(seed, v));
  for (auto [a, b] : edges) {
    g.insert_edge(synthetic_uid(seed, a), synthetic_uid(seed, b), p.label, 1.0);
    g.insert_edge(synthetic_uid(seed, b), synthetic_uid(seed, a), p.label, 1.0);
  }
  return g;
}

}  // namespace sks::graph
