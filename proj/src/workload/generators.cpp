#include "sks/workload/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sks/core/errors.hpp"

namespace sks::workload {

namespace {

std::vector<std::vector<graph::VertexId>> rank_groups(const graph::SocialMultiGraph& g, std::size_t groups) {
  const std::size_t n = g.num_vertices();
  if (n == 0) throw InvalidArgument("workload needs a non-empty graph");
  if (groups == 0) throw InvalidArgument("at least one degree group is required");
  std::vector<std::pair<std::size_t, graph::VertexId>> ranked;
  ranked.reserve(n);
  for (graph::VertexId v = 0; v < n; ++v) ranked.push_back({g.neighbors(v).size(), v});
  std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : g.uid(a.second) < g.uid(b.second);
  });
  groups = std::min(groups, n);
  std::vector<std::vector<graph::VertexId>> out(groups);
  for (std::size_t i = 0; i < n; ++i) out[i * groups / n].push_back(ranked[i].second);
  return out;
}

std::vector<SimTime> arrivals(std::size_t count, const Schedule& when, std::uint64_t seed) {
  std::vector<SimTime> out(count, when.start);
  if (when.mean_gap <= SimDuration::zero()) return out;
  Rng rng(mix_keys({seed, 0xA77}));
  SimTime t = when.start;
  for (auto& at : out) {
    at = t;
    t += from_seconds(rng.exponential(to_seconds(when.mean_gap)));
  }
  return out;
}

}  // namespace

DegreeRankModel DegreeRankModel::zipf(const graph::SocialMultiGraph& g, std::size_t groups, double zipf_s) {
  DegreeRankModel m;
  m.groups = rank_groups(g, groups);
  double total = 0.0;
  for (std::size_t i = 0; i < m.groups.size(); ++i) {
    m.probability.push_back(1.0 / std::pow(static_cast<double>(i + 1), zipf_s));
    total += m.probability.back();
  }
  for (auto& p : m.probability) p /= total;
  return m;
}

DegreeRankModel DegreeRankModel::from_cdf(const graph::SocialMultiGraph& g, const std::vector<double>& cdf) {
  DegreeRankModel m;
  m.groups = rank_groups(g, cdf.size());
  if (m.groups.size() != cdf.size()) throw InvalidArgument("group CDF has more entries than there are users");
  double prev = 0.0;
  for (double c : cdf) {
    if (!(c >= prev) || c > 1.0 + 1e-9) throw InvalidArgument("group CDF must be non-decreasing within [0,1]");
    m.probability.push_back(c - prev);
    prev = c;
  }
  if (std::abs(prev - 1.0) > 1e-9) throw InvalidArgument("group CDF must end at 1");
  return m;
}

std::size_t DegreeRankModel::group_of(graph::VertexId v) const {
  for (std::size_t i = 0; i < groups.size(); ++i)
    if (std::find(groups[i].begin(), groups[i].end(), v) != groups[i].end()) return i;
  throw InvalidArgument("vertex is not ranked");
}

SourceSampler::SourceSampler(const DegreeRankModel& model, std::uint64_t seed)
    : model_(&model), rng_(mix_keys({seed, 0x5A5})), pools_(model.groups.size()) {}

graph::VertexId SourceSampler::next() {
  const std::size_t g = rng_.pick_weighted(model_->probability);
  auto& pool = pools_[g];
  if (pool.empty()) {
    pool = model_->groups[g];
    std::reverse(pool.begin(), pool.end());
  }
  const std::size_t i = rng_.below(pool.size());
  std::swap(pool[i], pool.back());
  const auto v = pool.back();
  pool.pop_back();
  return v;
}

std::vector<graph::EdgeUpdateRecord> gen_weight_updates(const DegreeRankModel& model, const graph::SocialMultiGraph& g,
                                                        std::size_t count, std::uint64_t seed, const Schedule& when,
                                                        double delta) {
  if (g.num_edges() == 0) throw InvalidArgument("weight updates need at least one edge");
  SourceSampler sampler(model, seed);
  Rng pick(mix_keys({seed, 0xA17E}));
  const auto times = arrivals(count, when, seed);
  std::map<Uid, std::uint64_t> seq;
  std::vector<graph::EdgeUpdateRecord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    graph::VertexId ego = sampler.next();
    auto nbrs = g.neighbors(ego);
    while (nbrs.empty()) {
      ego = sampler.next();
      nbrs = g.neighbors(ego);
    }
    const auto alter = nbrs[pick.below(nbrs.size())];
    // the heaviest label towards alter carries the interaction
    std::string label;
    double best = -1.0;
    for (const auto& [name, w] : g.labels_between(g.uid(ego), g.uid(alter), when.start))
      if (w > best) best = w, label = name;
    auto [it, fresh] = seq.emplace(g.uid(ego), g.last_seq(g.uid(ego)));
    graph::EdgeUpdateRecord rec;
    rec.seq = ++it->second;
    rec.ego = g.uid(ego);
    rec.alter = g.uid(alter);
    rec.label = label;
    rec.op = graph::UpdateOp::adjust_weight;
    rec.value = delta;
    rec.issued_at = times[i];
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<inference::RequestLine> gen_neighborhood_requests(const DegreeRankModel& model,
                                                              const graph::SocialMultiGraph& g, std::size_t count,
                                                              std::uint64_t seed, const NeighborhoodOptions& opts,
                                                              const Schedule& when, std::uint64_t first_id) {
  if (opts.min_radius < 1 || opts.max_radius < opts.min_radius) throw InvalidArgument("bad radius range");
  if (!(opts.max_chi >= 0.0 && opts.max_chi <= 1.0)) throw InvalidArgument("chi bound must lie in [0,1]");
  SourceSampler sampler(model, seed);
  Rng rng(mix_keys({seed, 0x4E1}));
  const auto times = arrivals(count, when, seed);
  std::vector<inference::RequestLine> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    inference::RequestLine r;
    r.id = first_id + i;
    r.at = times[i];
    auto& p = r.params;
    p.kind = inference::InferenceKind::neighborhood;
    p.ego = g.uid(sampler.next());
    p.radius = opts.min_radius + static_cast<std::uint32_t>(rng.below(opts.max_radius - opts.min_radius + 1));
    p.min_weight = rng.uniform(0.0, opts.max_chi);
    p.label = opts.label;
    p.timeout = opts.timeout;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::uint32_t> strength_budgets(std::size_t sources, double exponent, std::uint64_t seed) {
  if (!(exponent > 0.0)) throw InvalidArgument("budget exponent must be positive");
  Rng rng(mix_keys({seed, 0xB0D6}));
  std::vector<std::uint32_t> out(sources);
  for (auto& b : out) b = static_cast<std::uint32_t>(std::min(1e9, std::ceil(rng.pareto(1.0, exponent))));
  return out;
}

std::vector<inference::RequestLine> gen_strength_requests(const graph::SocialMultiGraph& g, std::size_t count,
                                                          std::uint64_t seed, double budget_exponent,
                                                          SimDuration timeout, const Schedule& when,
                                                          std::uint64_t first_id) {
  const std::size_t n = g.num_vertices();
  if (n < 2) throw InvalidArgument("strength requests need at least two users");
  std::vector<graph::VertexId> order(n);
  for (graph::VertexId v = 0; v < n; ++v) order[v] = v;
  Rng rng(mix_keys({seed, 0x57E}));
  const auto times = arrivals(count, when, seed);
  std::vector<inference::RequestLine> out;
  out.reserve(count);
  std::size_t next_source = n;
  std::uint64_t round = 0;
  std::uint32_t left = 0;
  graph::VertexId src = 0;
  while (out.size() < count) {
    if (left == 0) {
      if (next_source == n) {
        rng.shuffle(order);
        next_source = 0;
        ++round;
      }
      src = order[next_source++];
      left = strength_budgets(1, budget_exponent, mix_keys({seed, round, src}))[0];
    }
    auto dst = static_cast<graph::VertexId>(rng.below(n - 1));
    if (dst >= src) ++dst;
    inference::RequestLine r;
    r.id = first_id + out.size();
    r.at = times[out.size()];
    r.params.kind = inference::InferenceKind::social_strength;
    r.params.ego = g.uid(src);
    r.params.alter = g.uid(dst);
    r.params.timeout = timeout;
    out.push_back(std::move(r));
    --left;
  }
  return out;
}

}  // namespace sks::workload
