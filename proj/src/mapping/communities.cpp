#include "sks/mapping/communities.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_map>

#include "sks/core/rng.hpp"

namespace sks::mapping {

using graph::Adjacency;

namespace {

constexpr auto kNone = std::numeric_limits<std::uint32_t>::max();

using EdgeKey = std::pair<std::uint32_t, std::uint32_t>;

EdgeKey key_of(std::uint32_t a, std::uint32_t b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

// Brandes accumulation from every source in `sources`, over mutable adjacency lists.
void accumulate_betweenness(const std::vector<std::vector<std::uint32_t>>& nbr, const std::vector<std::uint32_t>& sources,
                            std::map<EdgeKey, double>& out) {
  const std::size_t n = nbr.size();
  std::vector<double> sigma(n, 0.0), delta(n, 0.0);
  std::vector<std::uint32_t> dist(n, kNone);
  std::vector<std::uint32_t> order;
  std::vector<std::vector<std::uint32_t>> pred(n);
  std::unordered_map<std::uint64_t, double> acc;
  for (auto s : sources) {
    order.clear();
    for (auto v : sources) {
      sigma[v] = 0.0;
      delta[v] = 0.0;
      dist[v] = kNone;
      pred[v].clear();
    }
    sigma[s] = 1.0;
    dist[s] = 0;
    std::size_t head = 0;
    order.push_back(s);
    while (head < order.size()) {
      const auto v = order[head++];
      for (auto w : nbr[v]) {
        if (dist[w] == kNone) {
          dist[w] = dist[v] + 1;
          order.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          pred[w].push_back(v);
        }
      }
    }
    for (std::size_t i = order.size(); i-- > 0;) {
      const auto w = order[i];
      for (auto v : pred[w]) {
        const double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
        const auto k = key_of(v, w);
        acc[(std::uint64_t{k.first} << 32) | k.second] += c;
        delta[v] += c;
      }
    }
  }
  for (const auto& [k, c] : acc) out[{static_cast<std::uint32_t>(k >> 32), static_cast<std::uint32_t>(k)}] += c / 2.0;
}

std::vector<std::uint32_t> reach(const std::vector<std::vector<std::uint32_t>>& nbr, std::uint32_t s) {
  std::vector<std::uint32_t> seen{s};
  std::vector<bool> mark(nbr.size(), false);
  mark[s] = true;
  for (std::size_t i = 0; i < seen.size(); ++i)
    for (auto w : nbr[seen[i]])
      if (!mark[w]) {
        mark[w] = true;
        seen.push_back(w);
      }
  std::sort(seen.begin(), seen.end());
  return seen;
}

// ---------------------------------------------------------------- Louvain

struct WeightedGraph {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;  // no self entries
  std::vector<double> self;                                        // A_ii
  double two_m = 0.0;

  std::size_t size() const { return adj.size(); }
};

WeightedGraph from_adjacency(const Adjacency& a) {
  WeightedGraph g;
  g.adj.resize(a.num_vertices());
  g.self.assign(a.num_vertices(), 0.0);
  for (std::uint32_t v = 0; v < a.num_vertices(); ++v)
    for (auto w : a.neighbors(v)) {
      g.adj[v].emplace_back(w, 1.0);
      g.two_m += 1.0;
    }
  return g;
}

// Local moving phase. Returns true if any node moved.
bool local_moves(const WeightedGraph& g, std::vector<std::uint32_t>& comm, Rng& rng) {
  const std::size_t n = g.size();
  std::vector<double> k(n, 0.0), tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    k[i] = g.self[i];
    for (const auto& [j, w] : g.adj[i]) k[i] += w;
    tot[comm[i]] += k[i];
  }
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  rng.shuffle(order);

  std::vector<double> link(n, 0.0);
  std::vector<std::uint32_t> touched;
  bool any = false;
  for (int pass = 0; pass < 1000; ++pass) {
    bool moved = false;
    for (auto i : order) {
      const auto own = comm[i];
      touched.clear();
      for (const auto& [j, w] : g.adj[i]) {
        const auto c = comm[j];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += w;
      }
      tot[own] -= k[i];
      double best_gain = link[own] - tot[own] * k[i] / g.two_m;
      auto best = own;
      std::sort(touched.begin(), touched.end());
      for (auto c : touched) {
        const double gain = link[c] - tot[c] * k[i] / g.two_m;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best = c;
        }
      }
      tot[best] += k[i];
      for (auto c : touched) link[c] = 0.0;
      link[own] = 0.0;
      if (best != own) {
        comm[i] = best;
        moved = true;
        any = true;
      }
    }
    if (!moved) break;
  }
  return any;
}

WeightedGraph aggregate(const WeightedGraph& g, const std::vector<std::uint32_t>& comm, std::uint32_t count) {
  WeightedGraph out;
  out.adj.resize(count);
  out.self.assign(count, 0.0);
  out.two_m = g.two_m;
  std::vector<std::map<std::uint32_t, double>> links(count);
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.self[comm[i]] += g.self[i];
    for (const auto& [j, w] : g.adj[i]) {
      if (comm[i] == comm[j])
        out.self[comm[i]] += w;
      else
        links[comm[i]][comm[j]] += w;
    }
  }
  for (std::uint32_t c = 0; c < count; ++c) out.adj[c].assign(links[c].begin(), links[c].end());
  return out;
}

std::uint32_t dense(std::vector<std::uint32_t>& comm) {
  std::unordered_map<std::uint32_t, std::uint32_t> remap;
  for (auto& c : comm) c = remap.emplace(c, static_cast<std::uint32_t>(remap.size())).first->second;
  return static_cast<std::uint32_t>(remap.size());
}

std::vector<std::uint32_t> louvain_raw(const Adjacency& a, std::uint64_t seed) {
  const std::size_t n = a.num_vertices();
  std::vector<std::uint32_t> label(n);
  std::iota(label.begin(), label.end(), 0u);
  WeightedGraph g = from_adjacency(a);
  if (g.two_m == 0.0) return label;
  Rng rng(mix_keys({seed, 0x10f1a}));
  for (int level = 0; level < 64; ++level) {
    std::vector<std::uint32_t> comm(g.size());
    std::iota(comm.begin(), comm.end(), 0u);
    if (!local_moves(g, comm, rng)) break;
    const std::uint32_t count = dense(comm);
    for (auto& l : label) l = comm[l];
    if (count == g.size()) break;
    g = aggregate(g, comm, count);
  }
  return label;
}

Adjacency induced(const Adjacency& a, const std::vector<std::uint32_t>& vertices) {
  std::unordered_map<std::uint32_t, std::uint32_t> index;
  for (std::uint32_t i = 0; i < vertices.size(); ++i) index.emplace(vertices[i], i);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  for (std::uint32_t i = 0; i < vertices.size(); ++i)
    for (auto w : a.neighbors(vertices[i]))
      if (auto it = index.find(w); it != index.end() && i < it->second) edges.emplace_back(i, it->second);
  return Adjacency::from_edges(vertices.size(), std::move(edges));
}

// Two halves along BFS order, restarting in each unvisited component.
std::vector<std::uint32_t> bfs_halves(const Adjacency& a) {
  const std::size_t n = a.num_vertices();
  std::vector<std::uint32_t> order;
  std::vector<bool> seen(n, false);
  for (std::uint32_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    seen[s] = true;
    std::size_t head = order.size();
    order.push_back(s);
    while (head < order.size()) {
      const auto v = order[head++];
      for (auto w : a.neighbors(v))
        if (!seen[w]) {
          seen[w] = true;
          order.push_back(w);
        }
    }
  }
  std::vector<std::uint32_t> part(n, 0);
  for (std::size_t i = n / 2; i < n; ++i) part[order[i]] = 1;
  return part;
}

}  // namespace

std::vector<std::vector<std::uint32_t>> Communities::members() const {
  std::vector<std::vector<std::uint32_t>> out(count);
  for (std::uint32_t v = 0; v < label.size(); ++v) out[label[v]].push_back(v);
  return out;
}

Communities canonical(const std::vector<std::uint32_t>& raw) {
  Communities c;
  c.label = raw;
  c.count = dense(c.label);
  return c;
}

std::map<std::pair<std::uint32_t, std::uint32_t>, double> edge_betweenness(const Adjacency& adj) {
  std::vector<std::vector<std::uint32_t>> nbr(adj.num_vertices());
  for (std::uint32_t v = 0; v < adj.num_vertices(); ++v) nbr[v].assign(adj.neighbors(v).begin(), adj.neighbors(v).end());
  std::vector<std::uint32_t> all(adj.num_vertices());
  std::iota(all.begin(), all.end(), 0u);
  std::map<EdgeKey, double> out;
  for (std::uint32_t v = 0; v < adj.num_vertices(); ++v)
    for (auto w : nbr[v])
      if (v < w) out[{v, w}] = 0.0;
  accumulate_betweenness(nbr, all, out);
  return out;
}

Communities girvan_newman(const Adjacency& adj, std::uint32_t target, std::uint32_t min_size) {
  const std::size_t n = adj.num_vertices();
  std::vector<std::vector<std::uint32_t>> nbr(n);
  for (std::uint32_t v = 0; v < n; ++v) nbr[v].assign(adj.neighbors(v).begin(), adj.neighbors(v).end());

  std::uint32_t count = 0;
  std::vector<std::uint32_t> comp = graph::connected_components(adj, &count);
  std::map<EdgeKey, double> bet;
  std::set<EdgeKey> kept;  // edges whose removal would cut off a too-small piece

  auto recompute = [&](const std::vector<std::uint32_t>& vertices) {
    for (auto v : vertices)
      for (auto w : nbr[v])
        if (v < w) bet[{v, w}] = 0.0;
    accumulate_betweenness(nbr, vertices, bet);
  };
  {
    std::vector<std::vector<std::uint32_t>> groups(count);
    for (std::uint32_t v = 0; v < n; ++v) groups[comp[v]].push_back(v);
    for (const auto& g : groups) recompute(g);
  }
  auto unlink = [&](std::uint32_t a, std::uint32_t b) {
    nbr[a].erase(std::find(nbr[a].begin(), nbr[a].end(), b));
    nbr[b].erase(std::find(nbr[b].begin(), nbr[b].end(), a));
  };

  bool reached = true;
  while (count < target) {
    const EdgeKey* best = nullptr;
    double best_value = -1.0;
    for (const auto& [e, value] : bet)
      if (value > best_value && !kept.contains(e)) {
        best_value = value;
        best = &e;
      }
    if (!best) {
      reached = false;
      break;
    }
    const auto [a, b] = *best;
    unlink(a, b);
    auto side_a = reach(nbr, a);
    if (std::binary_search(side_a.begin(), side_a.end(), b)) {
      bet.erase({a, b});
      recompute(side_a);
      continue;
    }
    auto side_b = reach(nbr, b);
    if (std::min(side_a.size(), side_b.size()) < min_size) {
      nbr[a].push_back(b);
      nbr[b].push_back(a);
      std::sort(nbr[a].begin(), nbr[a].end());
      std::sort(nbr[b].begin(), nbr[b].end());
      kept.insert({a, b});
      continue;
    }
    bet.erase({a, b});
    for (auto v : side_b) comp[v] = count;
    ++count;
    recompute(side_a);
    recompute(side_b);
  }
  Communities c = canonical(comp);
  c.reached_target = reached;
  return c;
}

double modularity(const Adjacency& adj, const std::vector<std::uint32_t>& label) {
  const double two_m = static_cast<double>(2 * adj.num_edges());
  if (two_m == 0.0) return 0.0;
  std::map<std::uint32_t, double> in, tot;
  for (std::uint32_t v = 0; v < adj.num_vertices(); ++v) {
    tot[label[v]] += adj.degree(v);
    for (auto w : adj.neighbors(v))
      if (label[w] == label[v]) in[label[v]] += 1.0;
  }
  double q = 0.0;
  for (const auto& [c, t] : tot) q += in[c] / two_m - (t / two_m) * (t / two_m);
  return q;
}

Communities louvain(const Adjacency& adj, std::uint64_t seed) { return canonical(louvain_raw(adj, seed)); }

Communities recursive_louvain(const Adjacency& adj, std::uint32_t target, std::uint64_t seed) {
  const std::size_t n = adj.num_vertices();
  target = static_cast<std::uint32_t>(std::min<std::size_t>(std::max<std::uint32_t>(target, 1), n));
  auto parts = louvain(adj, seed).members();

  // Louvain may already overshoot on graphs with many components.
  auto by_size = [&](std::size_t x, std::size_t y) {
    return parts[x].size() != parts[y].size() ? parts[x].size() > parts[y].size() : parts[x][0] < parts[y][0];
  };
  auto merge_down = [&](std::vector<std::vector<std::uint32_t>>& group, std::size_t keep, const Adjacency& g) {
    std::vector<std::uint32_t> owner(g.num_vertices(), kNone);
    for (std::uint32_t i = 0; i < group.size(); ++i)
      for (auto v : group[i]) owner[v] = i;
    while (group.size() > keep) {
      std::size_t small = 0;
      for (std::size_t i = 1; i < group.size(); ++i)
        if (group[i].size() < group[small].size()) small = i;
      std::map<std::uint32_t, std::size_t> ties;
      for (auto v : group[small])
        for (auto w : g.neighbors(v))
          if (owner[w] != small) ++ties[owner[w]];
      std::size_t into = small == 0 ? 1 : 0;
      std::size_t most = 0;
      for (const auto& [o, t] : ties)
        if (t > most) {
          most = t;
          into = o;
        }
      if (most == 0)
        for (std::size_t i = 0; i < group.size(); ++i)
          if (i != small && group[i].size() < group[into].size()) into = i;
      group[into].insert(group[into].end(), group[small].begin(), group[small].end());
      std::sort(group[into].begin(), group[into].end());
      for (auto v : group[small]) owner[v] = static_cast<std::uint32_t>(into);
      group.erase(group.begin() + static_cast<std::ptrdiff_t>(small));
      for (auto& o : owner)
        if (o != kNone && o > small) --o;
    }
  };
  if (parts.size() > target) merge_down(parts, target, adj);

  auto bigger = [&](std::size_t x, std::size_t y) { return by_size(y, x); };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(bigger)> largest(bigger);
  for (std::size_t i = 0; i < parts.size(); ++i) largest.push(i);
  std::size_t count = parts.size();
  std::uint64_t round = 0;
  while (count < target && !largest.empty()) {
    const std::size_t pick = largest.top();
    largest.pop();
    auto& members = parts[pick];
    if (members.size() < 2) break;
    const auto sub = induced(adj, members);
    auto split = louvain(sub, mix_keys({seed, ++round})).members();
    if (split.size() < 2) split = canonical(bfs_halves(sub)).members();
    const std::size_t room = target - count + 1;
    if (split.size() > room) merge_down(split, room, sub);
    std::vector<std::vector<std::uint32_t>> mapped;
    for (const auto& s : split) {
      std::vector<std::uint32_t> m;
      for (auto i : s) m.push_back(members[i]);
      mapped.push_back(std::move(m));
    }
    members = std::move(mapped[0]);
    largest.push(pick);
    for (std::size_t i = 1; i < mapped.size(); ++i) {
      parts.push_back(std::move(mapped[i]));
      largest.push(parts.size() - 1);
    }
    count = parts.size();
  }

  std::vector<std::uint32_t> raw(n, 0);
  std::sort(parts.begin(), parts.end(), [](const auto& x, const auto& y) { return x[0] < y[0]; });
  for (std::uint32_t i = 0; i < parts.size(); ++i)
    for (auto v : parts[i]) raw[v] = i;
  Communities c = canonical(raw);
  c.reached_target = c.count == target;
  return c;
}

}  // namespace sks::mapping
