#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

#include "sks/harness/experiment.hpp"

namespace sks::harness {

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

double mean(const std::vector<double>& xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  return out;
}

std::string request_class(const RequestRow& r) {
  if (r.kind == inference::InferenceKind::neighborhood || r.kind == inference::InferenceKind::proximity)
    return std::string(inference::to_string(r.kind)) + "-" + std::to_string(r.radius);
  return std::string(inference::to_string(r.kind));
}

std::string cell_key(const Cell& c) {
  return c.mapping + "," + num(c.n) + "," + std::to_string(c.k) + "," + num(c.timeout_s);
}

void write_performance(const std::vector<Cell>& cells, const std::filesystem::path& dir) {
  auto req = open_out(dir / "requests.csv");
  req << "mapping,N,K,T_s,request_id,kind,ego,radius,outcome,completion,elapsed_ms,messages,serving_peer_count,"
         "result_size\n";
  auto peers = open_out(dir / "peers.csv");
  peers << "mapping,N,K,T_s,peer_id,users,secondary_served\n";
  auto sum = open_out(dir / "summary.csv");
  sum << "mapping,N,K,T_s,class,requests,mean_completion,p50_completion,mean_elapsed_ms,p50_elapsed_ms,"
         "p90_elapsed_ms,p99_elapsed_ms,mean_messages,total_messages,mean_serving_peers,mean_result_size\n";
  auto cdf = open_out(dir / "completion_cdf.csv");
  cdf << "mapping,N,K,T_s,class,completion,fraction_at_or_below\n";
  auto net = open_out(dir / "cells.csv");
  net << "mapping,N,K,T_s,local_tie_fraction,messages_sent,messages_delivered,messages_dropped,request_messages,"
         "background_messages\n";
  std::ostringstream table;
  table << std::left << std::setw(8) << "mapping" << std::setw(6) << "N" << std::setw(4) << "K" << std::setw(7)
        << "T_s" << std::setw(16) << "class" << std::setw(8) << "count" << std::setw(11) << "completion"
        << std::setw(11) << "p50_ms" << std::setw(11) << "p99_ms" << std::setw(11) << "messages" << "\n";

  for (const auto& c : cells) {
    const auto key = cell_key(c);
    std::map<std::string, std::vector<const RequestRow*>> classes;
    std::uint64_t request_messages = 0;
    for (const auto& r : c.requests) {
      req << key << ',' << r.id << ',' << inference::to_string(r.kind) << ',' << r.ego.to_string() << ',' << r.radius
          << ',' << inference::to_string(r.outcome) << ',' << num(r.completion) << ',' << num(r.elapsed_ms) << ','
          << r.messages << ',' << r.serving_peers << ',' << r.result_size << '\n';
      classes[request_class(r)].push_back(&r);
      classes["all"].push_back(&r);
      request_messages += r.messages;
    }
    for (const auto& p : c.peers)
      peers << key << ',' << p.peer.to_string() << ',' << p.users << ',' << p.secondary_served << '\n';
    for (const auto& [name, rows] : classes) {
      std::vector<double> comp, ms, msgs, serving, size;
      for (const auto* r : rows) {
        comp.push_back(r->completion);
        ms.push_back(r->elapsed_ms);
        msgs.push_back(static_cast<double>(r->messages));
        serving.push_back(static_cast<double>(r->serving_peers));
        size.push_back(static_cast<double>(r->result_size));
      }
      const double total = std::accumulate(msgs.begin(), msgs.end(), 0.0);
      sum << key << ',' << name << ',' << rows.size() << ',' << num(mean(comp)) << ',' << num(percentile(comp, 0.5))
          << ',' << num(mean(ms)) << ',' << num(percentile(ms, 0.5)) << ',' << num(percentile(ms, 0.9)) << ','
          << num(percentile(ms, 0.99)) << ',' << num(mean(msgs)) << ',' << num(total) << ',' << num(mean(serving))
          << ',' << num(mean(size)) << '\n';
      for (int i = 0; i <= 20; ++i) {
        const double x = i / 20.0;
        const auto below = std::count_if(comp.begin(), comp.end(), [&](double v) { return v <= x + 1e-12; });
        cdf << key << ',' << name << ',' << num(x) << ',' << num(static_cast<double>(below) / comp.size()) << '\n';
      }
      table << std::left << std::setw(8) << c.mapping << std::setw(6) << num(c.n) << std::setw(4) << c.k
            << std::setw(7) << num(c.timeout_s) << std::setw(16) << name << std::setw(8) << rows.size()
            << std::setw(11) << num(std::round(mean(comp) * 1e4) / 1e4) << std::setw(11)
            << num(std::round(percentile(ms, 0.5))) << std::setw(11) << num(std::round(percentile(ms, 0.99)))
            << std::setw(11) << num(total) << "\n";
    }
    net << key << ',' << num(c.local_ties) << ',' << c.stats.sent << ',' << c.stats.delivered << ','
        << c.stats.dropped << ',' << request_messages << ',' << (c.stats.sent - request_messages) << '\n';
  }
  auto txt = open_out(dir / "summary.txt");
  txt << table.str();
}

void write_influence(const std::vector<InfluenceRow>& rows, const std::filesystem::path& dir) {
  auto raw = open_out(dir / "influence.csv");
  raw << "graph,mapping,N,K,hops,collusion_kind,C,repetition,peer_or_set_id,influence,member_mean_influence\n";
  using Key = std::tuple<std::string, std::string, double, std::uint32_t, std::uint32_t, std::string, double>;
  std::map<Key, std::vector<const InfluenceRow*>> groups;
  for (const auto& r : rows) {
    raw << r.graph << ',' << r.mapping << ',' << num(r.n) << ',' << r.k << ',' << r.hops << ',' << r.collusion << ','
        << num(r.c) << ',' << r.repetition << ',' << r.id << ',' << num(r.influence) << ','
        << (r.collusion == "none" ? std::string() : num(r.member_mean)) << '\n';
    groups[Key{r.graph, r.mapping, r.n, r.k, r.hops, r.collusion, r.c}].push_back(&r);
  }

  auto sum = open_out(dir / "summary.csv");
  sum << "graph,mapping,N,K,hops,collusion_kind,C,samples,mean,ci95_half_width,p50,p90,max,member_mean,"
         "member_ci95_half_width\n";
  auto cdf = open_out(dir / "influence_cdf.csv");
  cdf << "graph,mapping,N,K,hops,influence,fraction_at_or_below\n";
  std::ostringstream table;
  table << std::left << std::setw(10) << "mapping" << std::setw(6) << "N" << std::setw(6) << "hops" << std::setw(10)
        << "collusion" << std::setw(6) << "C" << std::setw(18) << "mean" << std::setw(18) << "ci95" << "\n";
  for (const auto& [key, members] : groups) {
    const auto& [graph, mapping, n, k, hops, collusion, c] = key;
    std::vector<double> values, reps, member_reps;
    if (collusion == "none") {
      for (const auto* r : members) values.push_back(r->influence);
      reps = values;
    } else {
      std::map<std::uint32_t, std::vector<const InfluenceRow*>> by_rep;
      for (const auto* r : members) {
        by_rep[r->repetition].push_back(r);
        values.push_back(r->influence);
      }
      for (const auto& [rep, sets] : by_rep) {
        double s = 0.0, m = 0.0;
        for (const auto* r : sets) s += r->influence, m += r->member_mean;
        reps.push_back(s / static_cast<double>(sets.size()));
        member_reps.push_back(m / static_cast<double>(sets.size()));
      }
    }
    const auto ci = resilience::mean_ci95(reps);
    const auto mci = resilience::mean_ci95(member_reps);
    const std::string prefix = graph + "," + mapping + "," + num(n) + "," + std::to_string(k) + "," +
                               std::to_string(hops);
    sum << prefix << ',' << collusion << ',' << num(c) << ',' << reps.size() << ',' << num(ci.mean) << ','
        << num(ci.half_width) << ',' << num(percentile(values, 0.5)) << ',' << num(percentile(values, 0.9)) << ','
        << num(*std::max_element(values.begin(), values.end())) << ','
        << (member_reps.empty() ? std::string() : num(mci.mean)) << ','
        << (member_reps.empty() ? std::string() : num(mci.half_width)) << '\n';
    if (collusion == "none") {
      std::sort(values.begin(), values.end());
      for (std::size_t i = 0; i < values.size(); ++i)
        if (i + 1 == values.size() || values[i + 1] != values[i])
          cdf << prefix << ',' << num(values[i]) << ',' << num(static_cast<double>(i + 1) / values.size()) << '\n';
    }
    table << std::left << std::setw(10) << mapping << std::setw(6) << num(n) << std::setw(6) << hops << std::setw(10)
          << collusion << std::setw(6) << num(c) << std::setw(18) << num(ci.mean) << std::setw(18)
          << num(ci.half_width) << "\n";
  }
  auto txt = open_out(dir / "summary.txt");
  txt << table.str();
}

}  // namespace

void run(const ExperimentSpec& spec, const std::string& out_dir, std::ostream* log) {
  const auto diag = validate(spec);
  if (!diag.empty()) throw InvalidArgument("spec is invalid: " + diag.front());
  const std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  const auto g = load_graph(spec.graph, spec.seed);
  if (log) *log << "graph " << spec.graph.name << ": " << g.num_vertices() << " users, " << g.num_edges() << " edges\n";
  switch (spec.kind) {
    case ExperimentKind::performance:
    case ExperimentKind::timeout_tradeoff:
      write_performance(run_performance(spec, g, log), dir);
      break;
    case ExperimentKind::influence:
      write_influence(run_influence(spec, g, log), dir);
      break;
    case ExperimentKind::collusion:
      write_influence(run_collusion(spec, g, log), dir);
      break;
  }
}

}  // namespace sks::harness
