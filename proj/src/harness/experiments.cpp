#include <algorithm>
#include <cmath>
#include <ostream>

#include "sks/graph/adjacency.hpp"
#include "sks/harness/experiment.hpp"
#include "sks/inference/distributed.hpp"
#include "sks/workload/generators.hpp"

namespace sks::harness {

namespace {

struct Workload {
  std::vector<inference::RequestLine> requests;
  std::vector<graph::EdgeUpdateRecord> updates;
};

Workload make_workload(const ExperimentSpec& spec, const graph::SocialMultiGraph& g) {
  const auto& w = spec.workload;
  const auto model = w.group_cdf.empty() ? workload::DegreeRankModel::zipf(g, w.groups, w.zipf_s)
                                         : workload::DegreeRankModel::from_cdf(g, w.group_cdf);
  const workload::Schedule when{at_seconds(1.0), from_millis(w.interarrival_ms)};
  Workload out;
  workload::NeighborhoodOptions nopt;
  nopt.min_radius = w.min_radius;
  nopt.max_radius = w.max_radius;
  nopt.max_chi = w.max_chi;
  nopt.label = w.label;
  if (w.neighborhood > 0)
    out.requests = workload::gen_neighborhood_requests(model, g, w.neighborhood, mix_keys({spec.seed, 1}), nopt, when);
  if (w.strength > 0) {
    auto s = workload::gen_strength_requests(g, w.strength, mix_keys({spec.seed, 2}), w.budget_exponent,
                                             kInfiniteDuration, when, w.neighborhood + 1);
    out.requests.insert(out.requests.end(), s.begin(), s.end());
  }
  std::stable_sort(out.requests.begin(), out.requests.end(),
                   [](const auto& a, const auto& b) { return a.at != b.at ? a.at < b.at : a.id < b.id; });
  if (w.updates > 0) out.updates = workload::gen_weight_updates(model, g, w.updates, mix_keys({spec.seed, 3}), when);
  return out;
}

std::vector<PeerId> performance_peers(const ExperimentSpec& spec, std::size_t users) {
  const std::size_t count =
      spec.mapping.peers.value_or(static_cast<std::size_t>(static_cast<double>(users) / spec.mapping.base_density));
  return mapping::synthetic_peers(std::max<std::size_t>(1, count), mix_keys({spec.seed, 0x9EE5}));
}

mapping::Communities detect(const graph::SocialMultiGraph& g, const MappingSpec& m, std::size_t count,
                            std::uint64_t seed, std::ostream* log) {
  const auto adj = graph::undirected_view(g);
  auto c = m.algorithm == "louvain"
               ? mapping::recursive_louvain(adj, static_cast<std::uint32_t>(count), seed)
               : mapping::girvan_newman(adj, static_cast<std::uint32_t>(count), m.min_community_size);
  if (!c.reached_target && log)
    *log << "warning: community detection stopped at " << c.count << " of " << count << " communities\n";
  return c;
}

Cell simulate(const ExperimentSpec& spec, const graph::SocialMultiGraph& g, const mapping::MappingPlan& plan,
              double n, double timeout_s, const Workload& work) {
  auto cfg = spec.sim;
  cfg.seed = spec.seed;
  overlay::Network net(cfg);
  mapping::deploy(net, g, plan);
  SimTime last = kSimEpoch;
  for (const auto& r : work.requests) last = std::max(last, r.at);
  for (const auto& rec : work.updates) {
    net.loop().at(rec.issued_at, [&net, rec]() { net.append_record(rec); });
    last = std::max(last, rec.issued_at);
  }
  if (!work.updates.empty()) net.start_polling(last + scale_budget(cfg.poll_period, 2));

  inference::DistributedExecutor ex(net);
  for (auto r : work.requests) {
    r.params.timeout = from_seconds(timeout_s);
    ex.submit(r);
  }
  net.loop().run();

  if (net.trust_violations() != 0)
    throw InvariantViolation("trust: a peer read data of a user it does not serve (" +
                             std::to_string(net.trust_violations()) + " reads)");
  Cell cell;
  cell.mapping = std::string(mapping::to_string(plan.kind));
  cell.n = n;
  cell.k = plan.replication;
  cell.timeout_s = timeout_s;
  cell.local_ties = mapping::local_tie_fraction(g, plan);
  std::map<PeerId, std::uint64_t> served;
  for (const auto* rec : ex.records()) {
    if (!rec->finished) throw InvariantViolation("termination: request " + std::to_string(rec->id) + " never finished");
    const auto& res = rec->result;
    if (!(res.completion >= 0.0 && res.completion <= 1.0))
      throw InvariantViolation("completion of request " + std::to_string(rec->id) + " outside [0,1]");
    RequestRow row;
    row.mapping = cell.mapping;
    row.n = n;
    row.k = cell.k;
    row.timeout_s = timeout_s;
    row.id = rec->id;
    row.kind = rec->params.kind;
    row.ego = rec->params.ego;
    row.radius = rec->params.radius.value_or(0);
    row.outcome = res.outcome;
    row.completion = res.completion;
    row.elapsed_ms = to_millis(res.elapsed);
    row.messages = res.messages_sent;
    row.serving_peers = res.distinct_serving_peers();
    if (const auto* us = res.users()) row.result_size = us->size();
    else if (!std::holds_alternative<std::monostate>(res.value)) row.result_size = 1;
    cell.requests.push_back(row);
    for (PeerId p : rec->secondary_peers) ++served[p];
  }
  std::sort(cell.requests.begin(), cell.requests.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  for (const auto& [p, users] : plan.users_by_peer())
    cell.peers.push_back(PeerRow{p, users.size(), served.contains(p) ? served[p] : 0});
  cell.stats = net.stats();
  return cell;
}

}  // namespace

std::vector<Cell> run_performance(const ExperimentSpec& spec, const graph::SocialMultiGraph& g, std::ostream* log,
                                  const mapping::Communities* given) {
  const auto work = make_workload(spec, g);
  const auto users = g.vertex_uids();
  const auto peers = performance_peers(spec, users.size());
  std::optional<mapping::Communities> communities;
  if (given) communities = *given;
  std::vector<double> timeouts = spec.timeouts_s;
  if (spec.kind == ExperimentKind::performance) timeouts.resize(1);

  std::vector<Cell> cells;
  for (auto kind : spec.mapping.kinds) {
    if (kind == mapping::MappingKind::social && !communities) {
      if (log) *log << "detecting " << peers.size() << " communities (" << spec.mapping.algorithm << ")\n";
      communities = detect(g, spec.mapping, peers.size(), spec.seed, log);
    }
    for (double n : spec.mapping.users_per_peer) {
      const auto k = mapping::replication_for(n, spec.mapping.base_density);
      const auto plan = kind == mapping::MappingKind::random
                            ? mapping::random_mapping(users, peers, k, spec.seed)
                            : mapping::social_mapping(g, *communities, peers, k, spec.seed);
      for (double t : timeouts) {
        if (log) *log << "cell mapping=" << mapping::to_string(kind) << " N=" << n << " K=" << k << " T=" << t << "\n";
        cells.push_back(simulate(spec, g, plan, n, t, work));
      }
    }
  }
  return cells;
}

mapping::MappingPlan influence_plan(const graph::SocialMultiGraph& g, mapping::MappingKind kind, double n,
                                    const MappingSpec& m, std::uint64_t seed) {
  const auto count =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(static_cast<double>(g.num_vertices()) / n)));
  const auto peers = mapping::synthetic_peers(count, mix_keys({seed, 0x1F1}));
  if (kind == mapping::MappingKind::random) return mapping::random_mapping(g.vertex_uids(), peers, 1, seed);
  return mapping::social_mapping(g, detect(g, m, count, seed, nullptr), peers, 1, seed);
}

namespace {

graph::SocialMultiGraph influence_graph(const graph::SocialMultiGraph& g) {
  return graph::symmetrized_largest_component(g, "tie");
}

void ledger_rows(std::vector<InfluenceRow>& out, const ExperimentSpec& spec, const std::string& mapping, double n,
                 std::uint32_t hops, const resilience::InfluenceLedger& ledger) {
  for (PeerId p : ledger.peers) {
    InfluenceRow row;
    row.graph = spec.graph.name;
    row.mapping = mapping;
    row.n = n;
    row.hops = hops;
    row.id = p.to_string();
    row.influence = ledger.influence(p);
    out.push_back(row);
  }
}

resilience::InfluenceLedger ledger_for(const ExperimentSpec& spec, const graph::SocialMultiGraph& g,
                                       const mapping::MappingPlan& plan, std::uint32_t hops, std::ostream* log) {
  if (log) *log << "influence mapping=" << mapping::to_string(plan.kind) << " peers=" << plan.peers.size()
                << " hops=" << hops << "\n";
  resilience::InfluenceOptions opts;
  opts.hops = hops;
  opts.seed = spec.seed;
  auto ledger = resilience::run_influence_experiment(g, plan, opts);
  for (double x : ledger.influences())
    if (!(x >= 0.0 && x <= 1.0)) throw InvariantViolation("influence outside [0,1]");
  return ledger;
}

}  // namespace

std::vector<InfluenceRow> run_influence(const ExperimentSpec& spec, const graph::SocialMultiGraph& g,
                                        std::ostream* log) {
  const auto sym = influence_graph(g);
  std::vector<InfluenceRow> out;
  for (double n : spec.influence.users_per_peer)
    for (auto kind : spec.mapping.kinds) {
      const auto plan = influence_plan(sym, kind, n, spec.mapping, spec.seed);
      for (auto hops : spec.influence.hops)
        ledger_rows(out, spec, std::string(mapping::to_string(kind)), n, hops, ledger_for(spec, sym, plan, hops, log));
    }
  return out;
}

std::vector<InfluenceRow> run_collusion(const ExperimentSpec& spec, const graph::SocialMultiGraph& g,
                                        std::ostream* log) {
  const auto sym = influence_graph(g);
  const auto& cs = spec.collusion;
  std::vector<InfluenceRow> out;
  for (auto kind : spec.mapping.kinds) {
    const auto plan = influence_plan(sym, kind, cs.users_per_peer, spec.mapping, spec.seed);
    const std::string mname(mapping::to_string(kind));
    for (auto hops : cs.hops) {
      const auto ledger = ledger_for(spec, sym, plan, hops, log);
      ledger_rows(out, spec, mname, cs.users_per_peer, hops, ledger);
      for (auto ckind : cs.kinds)
        for (double c : cs.fractions)
          for (std::uint32_t rep = 0; rep < cs.repetitions; ++rep) {
            resilience::CollusionConfig cfg{ckind, cs.seed_fraction, c, mix_keys({spec.seed, rep, 0xC0})};
            const auto sets = resilience::build_collusion(plan, sym, cfg);
            if (sets.random_fill && log)
              *log << "warning: social collusion ran out of adjacent peers (C=" << c << ", rep " << rep
                   << "), filled randomly\n";
            for (std::size_t i = 0; i < sets.sets.size(); ++i) {
              InfluenceRow row;
              row.graph = spec.graph.name;
              row.mapping = mname;
              row.n = cs.users_per_peer;
              row.hops = hops;
              row.collusion = std::string(resilience::to_string(ckind));
              row.c = c;
              row.repetition = rep;
              row.id = "set-" + std::to_string(i);
              row.influence = resilience::set_influence(ledger, sets.sets[i]);
              double sum = 0.0;
              for (PeerId p : sets.sets[i]) sum += ledger.influence(p);
              row.member_mean = sum / static_cast<double>(sets.sets[i].size());
              out.push_back(row);
            }
          }
    }
  }
  return out;
}

double percentile(std::vector<double> xs, double q) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(xs.size())));
  return xs[std::min(xs.size() - 1, rank == 0 ? 0 : rank - 1)];
}

}  // namespace sks::harness
