#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sks/core/errors.hpp"
#include "sks/graph/generators.hpp"
#include "sks/inference/params.hpp"
#include "sks/mapping/plan.hpp"
#include "sks/overlay/network.hpp"
#include "sks/resilience/influence.hpp"

namespace sks::harness {

/// A run broke one of the simulator's invariants; the message names it.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

enum class ExperimentKind { performance, timeout_tradeoff, influence, collusion };
std::string_view to_string(ExperimentKind k);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view s);

struct GraphSource {
  std::string name;  // defaults to the file stem or generator name
  std::string file;  // edge list; empty means generated
  std::string generator = "community";
  graph::CommunityGraphParams community;
  graph::SparseGraphParams sparse;
};

struct MappingSpec {
  std::vector<mapping::MappingKind> kinds{mapping::MappingKind::random, mapping::MappingKind::social};
  std::vector<double> users_per_peer{10.0};  // N
  double base_density = 10.0;                // N at K = 1
  std::optional<std::size_t> peers;          // default: users / base_density
  std::string algorithm = "betweenness";     // or "louvain"
  std::uint32_t min_community_size = 5;
};

struct WorkloadSpec {
  std::size_t neighborhood = 0;
  std::size_t strength = 0;
  std::size_t updates = 0;
  std::uint32_t min_radius = 1;
  std::uint32_t max_radius = 3;
  double max_chi = 0.1;
  std::optional<std::string> label;
  std::size_t groups = 10;
  double zipf_s = 1.0;
  std::vector<double> group_cdf;  // overrides the Zipf weights when set
  double interarrival_ms = 50.0;
  double budget_exponent = 1.5;
};

struct InfluenceSpec {
  std::vector<std::uint32_t> hops{2, 3};
  std::vector<double> users_per_peer{10.0};
};

struct CollusionSpec {
  double seed_fraction = 0.01;
  std::vector<double> fractions{0.1, 0.2, 0.3, 0.4, 0.5};
  std::vector<resilience::CollusionKind> kinds{resilience::CollusionKind::random, resilience::CollusionKind::social};
  std::uint32_t repetitions = 10;
  std::vector<std::uint32_t> hops{2, 3};
  double users_per_peer = 10.0;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::performance;
  std::uint64_t seed = 1;
  std::string output = "out";
  GraphSource graph;
  MappingSpec mapping;
  overlay::SimConfig sim;
  /// One cell per value; performance runs use only the first.
  std::vector<double> timeouts_s{std::numeric_limits<double>::infinity()};
  WorkloadSpec workload;
  InfluenceSpec influence;
  CollusionSpec collusion;
};

struct SpecLoad {
  ExperimentSpec spec;
  std::vector<std::string> errors;  // syntax, unknown keys and unparsable values
};

/// INI text; relative graph paths resolve against `base_dir`.
SpecLoad parse_spec(std::istream& in, const std::string& base_dir = ".");
SpecLoad load_spec(const std::string& path);

/// Static checks: files exist and parse, parameters in range, mappings
/// feasible. Empty when the spec can run.
std::vector<std::string> validate(const ExperimentSpec& spec);
/// Parse errors followed by validate()'s diagnostics.
std::vector<std::string> validate_file(const std::string& path);

graph::SocialMultiGraph load_graph(const GraphSource& src, std::uint64_t seed);

struct RequestRow {
  std::string mapping;
  double n = 0.0;
  std::uint32_t k = 1;
  double timeout_s = 0.0;
  std::uint64_t id = 0;
  inference::InferenceKind kind = inference::InferenceKind::neighborhood;
  Uid ego;
  std::uint32_t radius = 0;
  inference::Outcome outcome = inference::Outcome::ok;
  double completion = 0.0;
  double elapsed_ms = 0.0;
  std::uint64_t messages = 0;
  std::size_t serving_peers = 0;
  std::size_t result_size = 0;
};

struct PeerRow {
  PeerId peer;
  std::size_t users = 0;
  std::uint64_t secondary_served = 0;
};

struct Cell {
  std::string mapping;
  double n = 0.0;
  std::uint32_t k = 1;
  double timeout_s = 0.0;
  double local_ties = 0.0;
  std::vector<RequestRow> requests;
  std::vector<PeerRow> peers;
  overlay::MessageStats stats;
};

/// Every (mapping kind, N, T) cell of a performance or timeout-tradeoff spec.
/// All cells replay the same workload, churn and latency draws. Social
/// cells use `communities` when given instead of detecting them on `g`.
std::vector<Cell> run_performance(const ExperimentSpec& spec, const graph::SocialMultiGraph& g,
                                  std::ostream* log = nullptr, const mapping::Communities* communities = nullptr);

struct InfluenceRow {
  std::string graph;
  std::string mapping;
  double n = 0.0;
  std::uint32_t k = 1;
  std::uint32_t hops = 0;
  std::string collusion = "none";
  double c = 0.0;
  std::uint32_t repetition = 0;
  std::string id;  // peer id or set-<i>
  double influence = 0.0;
  double member_mean = 0.0;  // sets only: mean individual influence of members
};

/// Builds the influence plan for one N: one community per N users, K = 1.
mapping::MappingPlan influence_plan(const graph::SocialMultiGraph& g, mapping::MappingKind kind, double n,
                                    const MappingSpec& m, std::uint64_t seed);

std::vector<InfluenceRow> run_influence(const ExperimentSpec& spec, const graph::SocialMultiGraph& g,
                                        std::ostream* log = nullptr);
std::vector<InfluenceRow> run_collusion(const ExperimentSpec& spec, const graph::SocialMultiGraph& g,
                                        std::ostream* log = nullptr);

/// Runs the experiment and writes its CSVs and summary.txt under `out_dir`.
/// Throws on bad input and InvariantViolation on a broken invariant.
void run(const ExperimentSpec& spec, const std::string& out_dir, std::ostream* log = nullptr);

/// Nearest-rank percentile of unsorted values; 0 for an empty input.
double percentile(std::vector<double> xs, double q);

}  // namespace sks::harness
