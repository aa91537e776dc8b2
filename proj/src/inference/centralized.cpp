#include "sks/inference/centralized.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "sks/core/errors.hpp"

namespace sks::inference {

using graph::SocialMultiGraph;
using graph::VertexId;

namespace {

constexpr std::uint32_t kUnseen = std::numeric_limits<std::uint32_t>::max();

acp::Verdict check(const AccessGate& gate, AccessRequest req) {
  if (!gate) return acp::Verdict{true, acp::Stage::label_rules, std::nullopt, 0.0};
  return gate(req);
}

std::optional<graph::LabelId> wanted_label(const SocialMultiGraph& g, const std::optional<std::string>& label,
                                           bool* impossible) {
  *impossible = false;
  if (!label) return std::nullopt;
  auto id = g.find_label(*label);
  if (!id) *impossible = true;
  return id;
}

std::vector<Uid> chain_to(const SocialMultiGraph& g, const std::vector<VertexId>& parent, VertexId v) {
  std::vector<Uid> chain;
  for (VertexId p = parent[v]; p != kUnseen; p = parent[p]) chain.push_back(g.uid(p));
  std::reverse(chain.begin(), chain.end());
  return chain;
}

struct Bfs {
  std::vector<std::uint32_t> depth;
  std::vector<VertexId> parent;
  std::vector<VertexId> order;  // discovered vertices, ego excluded
};

Bfs bounded_bfs(const SocialMultiGraph& g, Uid ego, const std::optional<std::string>& label, double min_weight,
                std::uint32_t radius, SimTime now, const AccessGate& gate) {
  const VertexId root = g.require(ego);
  Bfs r;
  r.depth.assign(g.num_vertices(), kUnseen);
  r.parent.assign(g.num_vertices(), kUnseen);
  const auto root_verdict = check(gate, {ego, acp::DataRequest::edges(label, min_weight), {}, {}});
  if (!root_verdict.granted) throw AccessDenied("owner " + ego.to_string() + " denies edge access");
  bool impossible = false;
  const auto lid = wanted_label(g, label, &impossible);
  if (impossible) return r;

  std::deque<VertexId> queue{root};
  r.depth[root] = 0;
  while (!queue.empty()) {
    const VertexId u = queue.front();
    queue.pop_front();
    if (r.depth[u] >= radius) continue;
    double floor = min_weight;
    if (u == root) {
      floor = std::max(floor, root_verdict.weight_floor);
    } else if (gate) {
      const auto v = gate({g.uid(u), acp::DataRequest::edges(label, min_weight), chain_to(g, r.parent, u), {}});
      if (!v.granted) continue;
      floor = std::max(floor, v.weight_floor);
    }
    for (const auto& e : g.out_edges(u)) {
      if (lid && e.label != *lid) continue;
      if (r.depth[e.target] != kUnseen) continue;
      if (g.effective_weight(u, e, now) < floor) continue;
      r.depth[e.target] = r.depth[u] + 1;
      r.parent[e.target] = u;
      r.order.push_back(e.target);
      queue.push_back(e.target);
    }
  }
  return r;
}

}  // namespace

PolicyGate::PolicyGate(const SocialMultiGraph& graph, const std::unordered_map<Uid, acp::AccessPolicy>& policies,
                       SimTime now, Uid originator, PeerId originator_peer, std::string application,
                       std::optional<GeoPoint> originator_location)
    : graph_(&graph),
      policies_(&policies),
      now_(now),
      originator_(originator),
      originator_peer_(originator_peer),
      application_(std::move(application)),
      originator_location_(originator_location) {}

acp::Verdict PolicyGate::operator()(const AccessRequest& req) const {
  const auto it = policies_->find(req.owner);
  if (it == policies_->end()) return acp::Verdict{true, acp::Stage::label_rules, std::nullopt, 0.0};
  acp::RequestContext ctx;
  ctx.originator_user = originator_;
  ctx.originator_peer = originator_peer_;
  ctx.application = application_;
  ctx.intermediate_users = req.intermediate_users;
  ctx.intermediate_peers = req.intermediate_peers;
  ctx.originator_location = originator_location_;
  const auto* g = graph_;
  const Uid owner = req.owner, originator = originator_;
  const SimTime now = now_;
  ctx.path_distance = [g, owner, originator, now](const acp::PathConstraint& c) {
    return constrained_distance(*g, owner, originator, c, now);
  };
  return acp::evaluate(it->second, ctx, req.data);
}

std::optional<std::uint32_t> constrained_distance(const SocialMultiGraph& g, Uid from, Uid to,
                                                  const acp::PathConstraint& c, SimTime now) {
  if (from == to) return 0;
  const auto s = g.find(from);
  const auto t = g.find(to);
  if (!s || !t) return std::nullopt;
  bool impossible = false;
  const auto lid = wanted_label(g, c.label, &impossible);
  if (impossible) return std::nullopt;
  std::vector<std::uint32_t> depth(g.num_vertices(), kUnseen);
  std::deque<VertexId> queue{*s};
  depth[*s] = 0;
  while (!queue.empty()) {
    const VertexId u = queue.front();
    queue.pop_front();
    if (depth[u] >= c.max_hops) continue;
    for (const auto& e : g.out_edges(u)) {
      if (lid && e.label != *lid) continue;
      if (depth[e.target] != kUnseen) continue;
      if (g.effective_weight(u, e, now) < c.min_weight) continue;
      depth[e.target] = depth[u] + 1;
      if (e.target == *t) return depth[e.target];
      queue.push_back(e.target);
    }
  }
  return std::nullopt;
}

bool relation_test(const SocialMultiGraph& g, Uid ego, Uid alter, const std::optional<std::string>& label,
                   double min_weight, SimTime now, const AccessGate& gate) {
  const VertexId v = g.require(ego);
  const auto verdict = check(gate, {ego, acp::DataRequest::edges(label, min_weight), {}, {}});
  if (!verdict.granted) throw AccessDenied("owner " + ego.to_string() + " denies edge access");
  const auto target = g.find(alter);
  if (!target) return false;
  bool impossible = false;
  const auto lid = wanted_label(g, label, &impossible);
  if (impossible) return false;
  const double floor = std::max(min_weight, verdict.weight_floor);
  for (const auto& e : g.out_edges(v))
    if (e.target == *target && (!lid || e.label == *lid) && g.effective_weight(v, e, now) >= floor) return true;
  return false;
}

std::vector<ScoredUser> top_relations(const SocialMultiGraph& g, Uid ego, const std::optional<std::string>& label,
                                      std::uint32_t n, SimTime now, const AccessGate& gate) {
  const VertexId v = g.require(ego);
  const auto verdict = check(gate, {ego, acp::DataRequest::edges(label), {}, {}});
  if (!verdict.granted) throw AccessDenied("owner " + ego.to_string() + " denies edge access");
  bool impossible = false;
  const auto lid = wanted_label(g, label, &impossible);
  if (impossible) return {};
  std::map<Uid, double> best;
  for (const auto& e : g.out_edges(v)) {
    if (lid && e.label != *lid) continue;
    const double w = g.effective_weight(v, e, now);
    if (w < verdict.weight_floor) continue;
    auto [it, fresh] = best.emplace(g.uid(e.target), w);
    if (!fresh) it->second = std::max(it->second, w);
  }
  std::vector<ScoredUser> out;
  for (const auto& [u, w] : best) out.push_back({u, w});
  std::stable_sort(out.begin(), out.end(), [](const ScoredUser& a, const ScoredUser& b) { return a.score > b.score; });
  if (out.size() > n) out.resize(n);
  return out;
}

std::vector<std::pair<Uid, double>> neighbor_sums(const SocialMultiGraph& g, VertexId v, SimTime now, double floor) {
  std::map<Uid, double> sums;
  for (const auto& e : g.out_edges(v)) {
    if (e.target == v) continue;
    const double w = g.effective_weight(v, e, now);
    if (w < floor) continue;
    sums[g.uid(e.target)] += w;
  }
  return {sums.begin(), sums.end()};
}

std::map<Uid, double> normalize(const std::vector<std::pair<Uid, double>>& sums) {
  double max = 0.0;
  for (const auto& [u, s] : sums) max = std::max(max, s);
  std::map<Uid, double> out;
  // all-zero weights: every neighbor ties for the maximum
  for (const auto& [u, s] : sums) out.emplace(u, max > 0.0 ? s / max : 1.0);
  return out;
}

double normalized_weight(const SocialMultiGraph& g, Uid i, Uid j, SimTime now) {
  const auto nw = normalize(neighbor_sums(g, g.require(i), now));
  const auto it = nw.find(j);
  if (it == nw.end()) throw UndefinedPair(j.to_string() + " is not an out-neighbor of " + i.to_string());
  return it->second;
}

std::vector<StrengthPath> strength_paths(const SocialMultiGraph& g, Uid ego, Uid alter, SimTime now,
                                         const AccessGate& gate) {
  const VertexId vi = g.require(ego);
  const auto verdict = check(gate, {ego, acp::DataRequest::edges(std::nullopt), {}, {}});
  if (!verdict.granted) throw AccessDenied("owner " + ego.to_string() + " denies edge access");
  const auto nw_i = normalize(neighbor_sums(g, vi, now, verdict.weight_floor));
  std::vector<StrengthPath> paths;
  if (auto it = nw_i.find(alter); it != nw_i.end()) paths.push_back({std::nullopt, it->second});
  for (const auto& [j, nw_ij] : nw_i) {
    if (j == alter) continue;
    const VertexId vj = *g.find(j);
    const auto vv = check(gate, {j, acp::DataRequest::edges(std::nullopt), {ego}, {}});
    if (!vv.granted) continue;
    const auto sums = neighbor_sums(g, vj, now, vv.weight_floor);
    const auto nw_j = normalize(sums);
    if (auto it = nw_j.find(alter); it != nw_j.end()) paths.push_back({j, std::min(nw_ij, it->second)});
  }
  return paths;
}

double fold_strength(const std::vector<StrengthPath>& paths) {
  double keep = 1.0;
  for (const auto& p : paths) keep *= 1.0 - p.nw / 2.0;
  return 1.0 - keep;
}

double social_strength(const SocialMultiGraph& g, Uid ego, Uid alter, SimTime now, const AccessGate& gate) {
  return fold_strength(strength_paths(g, ego, alter, now, gate));
}

std::vector<ScoredUser> neighborhood(const SocialMultiGraph& g, Uid ego, const std::optional<std::string>& label,
                                     double min_weight, std::uint32_t radius, SimTime now, const AccessGate& gate) {
  const auto bfs = bounded_bfs(g, ego, label, min_weight, radius, now, gate);
  std::vector<ScoredUser> out;
  out.reserve(bfs.order.size());
  for (VertexId v : bfs.order) out.push_back({g.uid(v), static_cast<double>(bfs.depth[v])});
  std::sort(out.begin(), out.end(), [](const ScoredUser& a, const ScoredUser& b) {
    return a.score != b.score ? a.score < b.score : a.uid < b.uid;
  });
  return out;
}

bool location_matches(const graph::VertexAttributes& who, const GeoPoint& ego_location, double distance_m,
                      std::optional<SimTime> fresh_after, double* meters) {
  if (!who.location || !who.location_timestamp) return false;
  if (fresh_after && *who.location_timestamp < *fresh_after) return false;
  const double d = great_circle_meters(ego_location, *who.location);
  if (meters) *meters = d;
  return d <= distance_m;
}

std::vector<ScoredUser> proximity(const SocialMultiGraph& g, Uid ego, const std::optional<std::string>& label,
                                  double min_weight, std::uint32_t radius, double distance_m,
                                  std::optional<SimTime> fresh_after, SimTime now, const AccessGate& gate) {
  const auto& ego_attrs = g.attributes(g.require(ego));
  if (!ego_attrs.location) throw InvalidArgument("ego " + ego.to_string() + " has no location");
  const auto bfs = bounded_bfs(g, ego, label, min_weight, radius, now, gate);
  std::vector<ScoredUser> out;
  for (VertexId v : bfs.order) {
    double meters = 0.0;
    if (!location_matches(g.attributes(v), *ego_attrs.location, distance_m, fresh_after, &meters)) continue;
    if (gate && !gate({g.uid(v), acp::DataRequest::location(), chain_to(g, bfs.parent, v), {}}).granted) continue;
    out.push_back({g.uid(v), meters});
  }
  std::sort(out.begin(), out.end(), [](const ScoredUser& a, const ScoredUser& b) {
    return a.score != b.score ? a.score < b.score : a.uid < b.uid;
  });
  return out;
}

InferenceResult evaluate(const SocialMultiGraph& g, const InferenceParams& p, SimTime now, const AccessGate& gate) {
  validate(p);
  InferenceResult r;
  try {
    switch (p.kind) {
      case InferenceKind::relation_test:
        r.value = relation_test(g, p.ego, *p.alter, p.label, p.min_weight, now, gate);
        break;
      case InferenceKind::top_relations:
        r.value = top_relations(g, p.ego, p.label, *p.n, now, gate);
        break;
      case InferenceKind::neighborhood:
        r.value = neighborhood(g, p.ego, p.label, p.min_weight, *p.radius, now, gate);
        break;
      case InferenceKind::proximity:
        r.value = proximity(g, p.ego, p.label, p.min_weight, *p.radius, *p.distance_m, p.timestamp, now, gate);
        break;
      case InferenceKind::social_strength:
        r.value = social_strength(g, p.ego, *p.alter, now, gate);
        break;
    }
  } catch (const AccessDenied&) {
    r.outcome = Outcome::access_denied;
    r.value = std::monostate{};
  }
  return r;
}

}  // namespace sks::inference
