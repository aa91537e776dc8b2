#include "sks/graph/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

#include "sks/core/errors.hpp"

namespace sks::graph {

namespace {

Uid parse_uid_or_throw(const std::string& token, std::size_t line) {
  if (auto u = Uid::parse(token)) return *u;
  throw ParseError(line, "bad uid '" + token + "'");
}

Uid json_uid(const nlohmann::json& j, const char* key, std::size_t line) {
  if (!j.contains(key)) throw ParseError(line, std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (v.is_number_unsigned()) return Uid::from_u64(v.get<std::uint64_t>());
  if (v.is_string()) return parse_uid_or_throw(v.get<std::string>(), line);
  throw ParseError(line, std::string("field '") + key + "' is not a uid");
}

}  // namespace

SocialMultiGraph read_edge_list(std::istream& in) {
  SocialMultiGraph g;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    std::string ego, alter, label;
    if (!(ls >> ego)) continue;
    double weight = 0.0;
    if (!(ls >> alter >> label >> weight)) throw ParseError(line, "expected 'ego alter label weight [last_interaction]'");
    if (weight < 0.0 || weight > 1.0) throw ParseError(line, "weight outside [0,1]");
    double last = 0.0;
    std::string extra;
    if (ls >> extra) {
      try {
        last = std::stod(extra);
      } catch (const std::exception&) {
        throw ParseError(line, "bad last_interaction '" + extra + "'");
      }
    }
    g.insert_edge(parse_uid_or_throw(ego, line), parse_uid_or_throw(alter, line), label, weight, at_seconds(last));
  }
  return g;
}

SocialMultiGraph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph file " + path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const SocialMultiGraph& g) {
  out << "# ego alter label weight last_interaction_s\n";
  out << std::setprecision(17);
  for (const auto& e : g.edges()) {
    out << e.ego.to_string() << ' ' << e.alter.to_string() << ' ' << e.label << ' ' << e.weight << ' '
        << to_seconds(e.last_interaction - kSimEpoch) << '\n';
  }
}

std::string to_json_line(const EdgeUpdateRecord& rec) {
  nlohmann::ordered_json j;
  j["seq"] = rec.seq;
  j["ego"] = rec.ego.to_string();
  j["alter"] = rec.alter.to_string();
  j["label"] = rec.label;
  j["op"] = std::string(to_string(rec.op));
  j["value"] = rec.value;
  j["issued_at"] = to_seconds(rec.issued_at - kSimEpoch);
  if (rec.location) {
    j["lat"] = rec.location->lat;
    j["lon"] = rec.location->lon;
  }
  return j.dump();
}

std::vector<EdgeUpdateRecord> read_update_log(std::istream& in) {
  std::vector<EdgeUpdateRecord> out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line, e.what());
    }
    EdgeUpdateRecord rec;
    try {
      rec.seq = j.at("seq").get<std::uint64_t>();
      rec.ego = json_uid(j, "ego", line);
      const auto op = parse_update_op(j.at("op").get<std::string>());
      if (!op) throw ParseError(line, "unknown op");
      rec.op = *op;
      if (rec.op != UpdateOp::set_location) {
        rec.alter = json_uid(j, "alter", line);
        rec.label = j.at("label").get<std::string>();
      }
      rec.value = j.value("value", 0.0);
      rec.issued_at = at_seconds(j.value("issued_at", 0.0));
      if (j.contains("lat") && j.contains("lon")) rec.location = GeoPoint{j["lat"].get<double>(), j["lon"].get<double>()};
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line, e.what());
    }
    out.push_back(std::move(rec));
  }
  return out;
}

void write_update_log(std::ostream& out, const std::vector<EdgeUpdateRecord>& records) {
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

}  // namespace sks::graph
