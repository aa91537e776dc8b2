// Command-line driver: run and validate experiment specs, and evaluate
// request files against a graph with the centralized engine.
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sks/graph/io.hpp"
#include "sks/harness/experiment.hpp"
#include "sks/inference/centralized.hpp"

namespace {

using nlohmann::json;

json to_json(const sks::inference::RequestLine& r, const sks::inference::InferenceResult& res) {
  json j;
  j["id"] = r.id;
  j["kind"] = std::string(sks::inference::to_string(r.params.kind));
  j["ego"] = r.params.ego.to_string();
  j["outcome"] = std::string(sks::inference::to_string(res.outcome));
  if (const auto* b = std::get_if<bool>(&res.value)) j["value"] = *b;
  if (const auto* d = std::get_if<double>(&res.value)) j["value"] = *d;
  if (const auto* us = res.users()) {
    j["value"] = json::array();
    for (const auto& u : *us) j["value"].push_back({{"uid", u.uid.to_string()}, {"score", u.score}});
  }
  return j;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, std::optional<std::string> out) {
  auto load = sks::harness::load_spec(path);
  auto diag = load.errors;
  if (diag.empty()) diag = sks::harness::validate(load.spec);
  if (!diag.empty()) {
    for (const auto& d : diag) std::cerr << path << ": " << d << "\n";
    return 2;
  }
  auto spec = load.spec;
  if (seed) spec.seed = *seed;
  const std::string dir = out.value_or(spec.output);
  try {
    sks::harness::run(spec, dir, &std::cerr);
  } catch (const sks::harness::InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return 3;
  }
  std::cerr << "results written to " << dir << "\n";
  return 0;
}

int cmd_validate(const std::string& path) {
  const auto diag = sks::harness::validate_file(path);
  for (const auto& d : diag) std::cout << path << ": " << d << "\n";
  if (diag.empty()) std::cout << path << ": ok\n";
  return diag.empty() ? 0 : 1;
}

int cmd_oracle(const std::string& graph_path, const std::string& request_path) {
  const auto g = sks::graph::read_edge_list_file(graph_path);
  std::ifstream in(request_path);
  if (!in) throw sks::Error("cannot open request file '" + request_path + "'");
  for (const auto& r : sks::inference::read_requests(in)) {
    const auto res = sks::inference::evaluate(g, r.params, r.at);
    std::cout << to_json(r, res).dump() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"social knowledge service simulator"};
  app.require_subcommand(1);

  std::string spec_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  auto* run = app.add_subcommand("run", "run an experiment spec");
  run->add_option("spec", spec_path, "experiment spec (INI)")->required();
  run->add_option("--seed", seed, "override the spec's seed");
  run->add_option("--out", out, "output directory");

  auto* validate = app.add_subcommand("validate", "check a spec without running it");
  validate->add_option("spec", spec_path, "experiment spec (INI)")->required();

  std::string graph_path, request_path;
  auto* oracle = app.add_subcommand("oracle", "evaluate requests with the centralized engine");
  oracle->add_option("graph", graph_path, "edge list")->required();
  oracle->add_option("requests", request_path, "one JSON request per line")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(spec_path, seed, out);
    if (*validate) return cmd_validate(spec_path);
    if (*oracle) return cmd_oracle(graph_path, request_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
