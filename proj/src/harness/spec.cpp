#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sks/graph/io.hpp"
#include "sks/harness/experiment.hpp"

namespace sks::harness {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// "value   ; note" -> "value"; a ';' or '#' counts only after whitespace
std::string strip_comment(const std::string& s) {
  for (std::size_t i = 1; i < s.size(); ++i)
    if ((s[i] == ';' || s[i] == '#') && (s[i - 1] == ' ' || s[i - 1] == '\t')) return trim(s.substr(0, i));
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

std::uint64_t to_u64(const std::string& s) {
  if (s.empty() || s[0] == '-') throw std::invalid_argument(s);
  std::size_t used = 0;
  const auto v = std::stoull(s, &used, 0);
  if (used != s.size()) throw std::invalid_argument(s);
  return v;
}

std::uint32_t to_u32(const std::string& s) {
  const auto v = to_u64(s);
  if (v > std::numeric_limits<std::uint32_t>::max()) throw std::out_of_range(s);
  return static_cast<std::uint32_t>(v);
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw std::invalid_argument(s);
}

template <class T, class F>
std::vector<T> to_list(const std::string& s, F one) {
  std::vector<T> out;
  for (const auto& item : split_list(s)) out.push_back(one(item));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

using Setter = std::function<void(ExperimentSpec&, const std::string&)>;

std::map<std::string, Setter> setters(const std::string& base_dir) {
  std::map<std::string, Setter> m;
  // experiment
  m["experiment.kind"] = [](ExperimentSpec& s, const std::string& v) {
    auto k = parse_experiment_kind(v);
    if (!k) throw std::invalid_argument("unknown experiment kind '" + v + "'");
    s.kind = *k;
  };
  m["experiment.seed"] = [](ExperimentSpec& s, const std::string& v) { s.seed = to_u64(v); };
  m["experiment.output"] = [](ExperimentSpec& s, const std::string& v) { s.output = v; };
  // graph
  m["graph.name"] = [](ExperimentSpec& s, const std::string& v) { s.graph.name = v; };
  m["graph.file"] = [base_dir](ExperimentSpec& s, const std::string& v) {
    const std::filesystem::path p(v);
    s.graph.file = p.is_absolute() ? v : (std::filesystem::path(base_dir) / p).lexically_normal().string();
  };
  m["graph.generator"] = [](ExperimentSpec& s, const std::string& v) { s.graph.generator = v; };
  m["graph.users"] = [](ExperimentSpec& s, const std::string& v) {
    s.graph.community.users = s.graph.sparse.users = to_u64(v);
  };
  m["graph.edges"] = [](ExperimentSpec& s, const std::string& v) { s.graph.sparse.edges = to_u64(v); };
  m["graph.avg_degree"] = [](ExperimentSpec& s, const std::string& v) { s.graph.community.avg_degree = to_double(v); };
  m["graph.degree_exponent"] = [](ExperimentSpec& s, const std::string& v) {
    s.graph.community.degree_exponent = to_double(v);
  };
  m["graph.max_degree"] = [](ExperimentSpec& s, const std::string& v) { s.graph.community.max_degree = to_u32(v); };
  m["graph.min_community"] = [](ExperimentSpec& s, const std::string& v) {
    s.graph.community.min_community = to_u32(v);
  };
  m["graph.max_community"] = [](ExperimentSpec& s, const std::string& v) {
    s.graph.community.max_community = to_u32(v);
  };
  m["graph.mixing"] = [](ExperimentSpec& s, const std::string& v) { s.graph.community.mixing = to_double(v); };
  m["graph.tail_exponent"] = [](ExperimentSpec& s, const std::string& v) { s.graph.sparse.tail_exponent = to_double(v); };
  m["graph.label"] = [](ExperimentSpec& s, const std::string& v) { s.graph.community.label = s.graph.sparse.label = v; };
  m["graph.initial_weight"] = [](ExperimentSpec& s, const std::string& v) {
    s.graph.community.initial_weight = to_double(v);
  };
  // mapping
  m["mapping.kinds"] = [](ExperimentSpec& s, const std::string& v) {
    s.mapping.kinds = to_list<mapping::MappingKind>(v, [](const std::string& x) {
      auto k = mapping::parse_mapping_kind(x);
      if (!k) throw std::invalid_argument("unknown mapping kind '" + x + "'");
      return *k;
    });
  };
  m["mapping.users_per_peer"] = [](ExperimentSpec& s, const std::string& v) {
    s.mapping.users_per_peer = to_list<double>(v, to_double);
  };
  m["mapping.base_density"] = [](ExperimentSpec& s, const std::string& v) { s.mapping.base_density = to_double(v); };
  m["mapping.peers"] = [](ExperimentSpec& s, const std::string& v) { s.mapping.peers = to_u64(v); };
  m["mapping.algorithm"] = [](ExperimentSpec& s, const std::string& v) { s.mapping.algorithm = v; };
  m["mapping.min_community_size"] = [](ExperimentSpec& s, const std::string& v) {
    s.mapping.min_community_size = to_u32(v);
  };
  // sim
  m["sim.latency"] = [](ExperimentSpec& s, const std::string& v) {
    const auto d = s.sim.latency;
    if (v == "wide-area") {
      s.sim.latency = overlay::LatencyModel::wide_area(SimDuration{250'000});
    } else if (!overlay::parse_latency_kind(v, &s.sim.latency.kind)) {
      throw std::invalid_argument("unknown latency model '" + v + "'");
    }
    s.sim.latency.seed = d.seed;
  };
  m["sim.rtt_ms"] = [](ExperimentSpec& s, const std::string& v) {
    s.sim.latency = overlay::LatencyModel::wide_area(from_millis(to_double(v)));
  };
  m["sim.constant_ms"] = [](ExperimentSpec& s, const std::string& v) { s.sim.latency.constant = from_millis(to_double(v)); };
  m["sim.lo_ms"] = [](ExperimentSpec& s, const std::string& v) { s.sim.latency.lo = from_millis(to_double(v)); };
  m["sim.hi_ms"] = [](ExperimentSpec& s, const std::string& v) { s.sim.latency.hi = from_millis(to_double(v)); };
  m["sim.churn"] = [](ExperimentSpec& s, const std::string& v) { s.sim.churn = to_double(v); };
  m["sim.churn_tick_s"] = [](ExperimentSpec& s, const std::string& v) { s.sim.churn_tick = from_seconds(to_double(v)); };
  m["sim.churn_flip_rate"] = [](ExperimentSpec& s, const std::string& v) { s.sim.churn_flip_rate = to_double(v); };
  m["sim.poll_period_s"] = [](ExperimentSpec& s, const std::string& v) { s.sim.poll_period = from_seconds(to_double(v)); };
  m["sim.dht_hop_base"] = [](ExperimentSpec& s, const std::string& v) { s.sim.dht_hop_base = to_double(v); };
  m["sim.connect_timeout_s"] = [](ExperimentSpec& s, const std::string& v) {
    s.sim.connect_timeout = from_seconds(to_double(v));
  };
  m["sim.tpl_cache"] = [](ExperimentSpec& s, const std::string& v) { s.sim.tpl_cache = to_bool(v); };
  m["sim.tpl_ttl_s"] = [](ExperimentSpec& s, const std::string& v) { s.sim.tpl_ttl = from_seconds(to_double(v)); };
  // inference
  m["inference.timeout_s"] = [](ExperimentSpec& s, const std::string& v) { s.timeouts_s = {to_double(v)}; };
  m["inference.timeouts_s"] = [](ExperimentSpec& s, const std::string& v) { s.timeouts_s = to_list<double>(v, to_double); };
  // workload
  m["workload.neighborhood"] = [](ExperimentSpec& s, const std::string& v) { s.workload.neighborhood = to_u64(v); };
  m["workload.strength"] = [](ExperimentSpec& s, const std::string& v) { s.workload.strength = to_u64(v); };
  m["workload.updates"] = [](ExperimentSpec& s, const std::string& v) { s.workload.updates = to_u64(v); };
  m["workload.hops"] = [](ExperimentSpec& s, const std::string& v) {
    const auto r = to_list<std::uint32_t>(v, to_u32);
    if (r.size() > 2) throw std::invalid_argument("hops takes one value or a min,max pair");
    s.workload.min_radius = r.front();
    s.workload.max_radius = r.back();
  };
  m["workload.max_chi"] = [](ExperimentSpec& s, const std::string& v) { s.workload.max_chi = to_double(v); };
  m["workload.label"] = [](ExperimentSpec& s, const std::string& v) { s.workload.label = v; };
  m["workload.groups"] = [](ExperimentSpec& s, const std::string& v) { s.workload.groups = to_u64(v); };
  m["workload.zipf_s"] = [](ExperimentSpec& s, const std::string& v) { s.workload.zipf_s = to_double(v); };
  m["workload.group_cdf"] = [](ExperimentSpec& s, const std::string& v) {
    s.workload.group_cdf = to_list<double>(v, to_double);
  };
  m["workload.interarrival_ms"] = [](ExperimentSpec& s, const std::string& v) {
    s.workload.interarrival_ms = to_double(v);
  };
  m["workload.budget_exponent"] = [](ExperimentSpec& s, const std::string& v) {
    s.workload.budget_exponent = to_double(v);
  };
  // influence
  m["influence.hops"] = [](ExperimentSpec& s, const std::string& v) { s.influence.hops = to_list<std::uint32_t>(v, to_u32); };
  m["influence.users_per_peer"] = [](ExperimentSpec& s, const std::string& v) {
    s.influence.users_per_peer = to_list<double>(v, to_double);
  };
  // collusion
  m["collusion.seed_fraction"] = [](ExperimentSpec& s, const std::string& v) { s.collusion.seed_fraction = to_double(v); };
  m["collusion.fractions"] = [](ExperimentSpec& s, const std::string& v) {
    s.collusion.fractions = to_list<double>(v, to_double);
  };
  m["collusion.kinds"] = [](ExperimentSpec& s, const std::string& v) {
    s.collusion.kinds = to_list<resilience::CollusionKind>(v, [](const std::string& x) {
      auto k = resilience::parse_collusion_kind(x);
      if (!k) throw std::invalid_argument("unknown collusion kind '" + x + "'");
      return *k;
    });
  };
  m["collusion.repetitions"] = [](ExperimentSpec& s, const std::string& v) { s.collusion.repetitions = to_u32(v); };
  m["collusion.hops"] = [](ExperimentSpec& s, const std::string& v) { s.collusion.hops = to_list<std::uint32_t>(v, to_u32); };
  m["collusion.users_per_peer"] = [](ExperimentSpec& s, const std::string& v) {
    s.collusion.users_per_peer = to_double(v);
  };
  return m;
}

// rtt_ms replaces the whole latency model, so it has to run before the
// individual fields that may refine it
int key_order(const std::string& key) {
  if (key == "sim.latency") return 0;
  if (key == "sim.rtt_ms") return 1;
  return 2;
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::performance: return "performance";
    case ExperimentKind::timeout_tradeoff: return "timeout-tradeoff";
    case ExperimentKind::influence: return "influence";
    case ExperimentKind::collusion: return "collusion";
  }
  return "?";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view s) {
  if (s == "performance") return ExperimentKind::performance;
  if (s == "timeout-tradeoff") return ExperimentKind::timeout_tradeoff;
  if (s == "influence") return ExperimentKind::influence;
  if (s == "collusion") return ExperimentKind::collusion;
  return std::nullopt;
}

SpecLoad parse_spec(std::istream& in, const std::string& base_dir) {
  SpecLoad out;
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    out.errors.push_back("line " + std::to_string(e.line()) + ": " + e.message());
    return out;
  }
  const auto table = setters(base_dir);
  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      out.errors.push_back("key '" + section + "' is outside any section");
      continue;
    }
    for (const auto& [key, value] : body) entries.push_back({section + "." + key, strip_comment(trim(value.data()))});
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return key_order(a.first) < key_order(b.first); });
  out.spec.sim.latency.seed = 0;
  for (const auto& [key, value] : entries) {
    const auto it = table.find(key);
    if (it == table.end()) {
      out.errors.push_back("unknown key '" + key + "'");
      continue;
    }
    try {
      it->second(out.spec, value);
    } catch (const std::exception& e) {
      out.errors.push_back(key + ": bad value '" + value + "' (" + e.what() + ")");
    }
  }
  if (out.spec.graph.name.empty())
    out.spec.graph.name = out.spec.graph.file.empty() ? out.spec.graph.generator
                                                      : std::filesystem::path(out.spec.graph.file).stem().string();
  return out;
}

SpecLoad load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    SpecLoad out;
    out.errors.push_back("cannot open spec file '" + path + "'");
    return out;
  }
  return parse_spec(in, std::filesystem::path(path).parent_path().string());
}

namespace {

std::size_t expected_users(const GraphSource& g, std::vector<std::string>& diag) {
  if (!g.file.empty()) {
    if (!std::filesystem::exists(g.file)) {
      diag.push_back("graph file '" + g.file + "' does not exist");
      return 0;
    }
    try {
      return graph::read_edge_list_file(g.file).num_vertices();
    } catch (const std::exception& e) {
      diag.push_back("graph file '" + g.file + "' does not parse: " + e.what());
      return 0;
    }
  }
  if (g.generator == "community") return g.community.users;
  if (g.generator == "sparse") return g.sparse.users;
  diag.push_back("unknown graph generator '" + g.generator + "' (community or sparse)");
  return 0;
}

void check_fraction(std::vector<std::string>& diag, const std::string& what, double v, double lo = 0.0,
                    double hi = 1.0) {
  if (!(v >= lo && v <= hi))
    diag.push_back(what + " = " + std::to_string(v) + " is outside [" + std::to_string(lo) + ", " +
                   std::to_string(hi) + "]");
}

}  // namespace

std::vector<std::string> validate(const ExperimentSpec& s) {
  std::vector<std::string> diag;
  const std::size_t users = expected_users(s.graph, diag);
  if (s.graph.file.empty()) {
    if (users < 2) diag.push_back("graph needs at least 2 users");
    if (s.graph.generator == "community") {
      const auto& c = s.graph.community;
      if (!(c.avg_degree > 0.0)) diag.push_back("graph.avg_degree must be positive");
      if (c.min_community == 0 || c.max_community < c.min_community)
        diag.push_back("graph community size range is empty");
      check_fraction(diag, "graph.mixing", c.mixing);
      check_fraction(diag, "graph.initial_weight", c.initial_weight);
    } else if (s.graph.generator == "sparse") {
      if (s.graph.sparse.edges + 1 < s.graph.sparse.users) diag.push_back("sparse graph needs edges >= users - 1");
    }
  }

  const auto& m = s.mapping;
  if (m.kinds.empty()) diag.push_back("mapping.kinds is empty");
  if (m.algorithm != "betweenness" && m.algorithm != "louvain")
    diag.push_back("mapping.algorithm must be betweenness or louvain");
  if (!(m.base_density > 0.0)) diag.push_back("mapping.base_density must be positive");

  const bool perf = s.kind == ExperimentKind::performance || s.kind == ExperimentKind::timeout_tradeoff;
  if (perf) {
    const std::size_t peers = m.peers.value_or(
        m.base_density > 0.0 ? static_cast<std::size_t>(static_cast<double>(users) / m.base_density) : 0);
    if (users > 0 && peers == 0) diag.push_back("mapping leaves no peers");
    for (double n : m.users_per_peer) {
      if (!(n > 0.0)) {
        diag.push_back("mapping.users_per_peer must be positive");
        continue;
      }
      if (m.base_density > 0.0 && users > 0) {
        const auto k = mapping::replication_for(n, m.base_density);
        if (k > peers)
          diag.push_back("N = " + std::to_string(n) + " needs K = " + std::to_string(k) + " replicas but only " +
                         std::to_string(peers) + " peers exist");
      }
    }
    const auto& w = s.workload;
    if (w.neighborhood + w.strength == 0) diag.push_back("workload issues no requests");
    if (w.min_radius < 1 || w.max_radius < w.min_radius) diag.push_back("workload.hops must satisfy 1 <= min <= max");
    check_fraction(diag, "workload.max_chi", w.max_chi);
    if (w.groups == 0) diag.push_back("workload.groups must be positive");
    if (!w.group_cdf.empty()) {
      double prev = 0.0;
      for (double c : w.group_cdf) {
        if (c < prev || c > 1.0 + 1e-9) diag.push_back("workload.group_cdf must be non-decreasing within [0,1]");
        prev = c;
      }
      if (std::abs(prev - 1.0) > 1e-9) diag.push_back("workload.group_cdf must end at 1");
    }
    if (!(w.interarrival_ms >= 0.0)) diag.push_back("workload.interarrival_ms must be >= 0");
    if (!(w.budget_exponent > 0.0)) diag.push_back("workload.budget_exponent must be positive");
    if (s.timeouts_s.empty()) diag.push_back("inference.timeouts_s is empty");
    for (double t : s.timeouts_s)
      if (!(t > 0.0)) diag.push_back("timeout " + std::to_string(t) + " must be positive (or inf)");
    check_fraction(diag, "sim.churn", s.sim.churn, 0.0, 0.99);
    if (s.sim.churn_tick <= SimDuration::zero()) diag.push_back("sim.churn_tick_s must be positive");
    if (!(s.sim.dht_hop_base > 1.0)) diag.push_back("sim.dht_hop_base must exceed 1");
    if (s.sim.connect_timeout <= SimDuration::zero()) diag.push_back("sim.connect_timeout_s must be positive");
  }
  if (s.kind == ExperimentKind::influence) {
    if (s.influence.hops.empty()) diag.push_back("influence.hops is empty");
    for (auto h : s.influence.hops)
      if (h < 1) diag.push_back("influence.hops values must be >= 1");
    for (double n : s.influence.users_per_peer)
      if (!(n >= 1.0)) diag.push_back("influence.users_per_peer values must be >= 1");
  }
  if (s.kind == ExperimentKind::collusion) {
    const auto& c = s.collusion;
    check_fraction(diag, "collusion.seed_fraction", c.seed_fraction);
    for (double f : c.fractions) check_fraction(diag, "collusion fraction", f, c.seed_fraction, 1.0);
    if (c.kinds.empty()) diag.push_back("collusion.kinds is empty");
    if (c.repetitions == 0) diag.push_back("collusion.repetitions must be positive");
    for (auto h : c.hops)
      if (h < 1) diag.push_back("collusion.hops values must be >= 1");
    if (!(c.users_per_peer >= 1.0)) diag.push_back("collusion.users_per_peer must be >= 1");
  }
  return diag;
}

std::vector<std::string> validate_file(const std::string& path) {
  auto load = load_spec(path);
  auto diag = load.errors;
  if (diag.empty()) diag = validate(load.spec);
  return diag;
}

graph::SocialMultiGraph load_graph(const GraphSource& src, std::uint64_t seed) {
  if (!src.file.empty()) return graph::read_edge_list_file(src.file);
  if (src.generator == "community") return graph::community_social_graph(src.community, seed);
  if (src.generator == "sparse") return graph::sparse_p2p_graph(src.sparse, seed);
  throw InvalidArgument("unknown graph generator '" + src.generator + "'");
}

}  // namespace sks::harness
