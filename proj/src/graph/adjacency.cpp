#include "sks/graph/adjacency.hpp"

#include <algorithm>
#include <deque>

namespace sks::graph {

Adjacency Adjacency::from_edges(std::size_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> both;
  both.reserve(edges.size() * 2);
  for (auto [a, b] : edges) {
    if (a == b) continue;
    both.emplace_back(a, b);
    both.emplace_back(b, a);
  }
  std::sort(both.begin(), both.end());
  both.erase(std::unique(both.begin(), both.end()), both.end());
  Adjacency adj;
  adj.offsets_.assign(n + 1, 0);
  for (auto [a, b] : both) ++adj.offsets_[a + 1];
  for (std::size_t i = 0; i < n; ++i) adj.offsets_[i + 1] += adj.offsets_[i];
  adj.targets_.reserve(both.size());
  for (auto [a, b] : both) adj.targets_.push_back(b);
  return adj;
}

Adjacency undirected_view(const SocialMultiGraph& g) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(g.num_edges());
  for (VertexId v = 0; v < g.num_vertices(); ++v)
    for (const auto& e : g.out_edges(v)) edges.emplace_back(v, e.target);
  return Adjacency::from_edges(g.num_vertices(), std::move(edges));
}

std::vector<std::uint32_t> connected_components(const Adjacency& adj, std::uint32_t* count) {
  constexpr auto kUnset = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> label(adj.num_vertices(), kUnset);
  std::uint32_t next = 0;
  std::deque<std::uint32_t> queue;
  for (std::uint32_t s = 0; s < adj.num_vertices(); ++s) {
    if (label[s] != kUnset) continue;
    label[s] = next;
    queue.push_back(s);
    while (!queue.empty()) {
      const auto v = queue.front();
      queue.pop_front();
      for (auto w : adj.neighbors(v))
        if (label[w] == kUnset) {
          label[w] = next;
          queue.push_back(w);
        }
    }
    ++next;
  }
  if (count) *count = next;
  return label;
}

std::vector<std::uint32_t> largest_component(const Adjacency& adj) {
  std::uint32_t count = 0;
  const auto label = connected_components(adj, &count);
  std::vector<std::size_t> sizes(count, 0);
  for (auto l : label) ++sizes[l];
  std::uint32_t best = 0;
  for (std::uint32_t c = 1; c < count; ++c)
    if (sizes[c] > sizes[best]) best = c;
  std::vector<std::uint32_t> out;
  for (std::uint32_t v = 0; v < label.size(); ++v)
    if (label[v] == best) out.push_back(v);
  return out;
}

SocialMultiGraph symmetrized_largest_component(const SocialMultiGraph& g, const std::string& label) {
  const auto adj = undirected_view(g);
  const auto keep = largest_component(adj);
  std::vector<bool> in(adj.num_vertices(), false);
  for (auto v : keep) in[v] = true;
  SocialMultiGraph out;
  for (auto v : keep) out.ensure_vertex(g.uid(v));
  for (auto v : keep)
    for (auto w : adj.neighbors(v))
      if (in[w]) out.insert_edge(g.uid(v), g.uid(w), label, 1.0);
  return out;
}

}  // namespace sks::graph
