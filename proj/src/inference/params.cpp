#include "sks/inference/params.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include "json.hpp"
#include "sks/core/errors.hpp"

namespace sks::inference {

namespace {

constexpr std::pair<InferenceKind, std::string_view> kKindNames[] = {
    {InferenceKind::relation_test, "relation_test"},   {InferenceKind::top_relations, "top_relations"},
    {InferenceKind::neighborhood, "neighborhood"},     {InferenceKind::proximity, "proximity"},
    {InferenceKind::social_strength, "social_strength"},
};

Uid uid_field(const nlohmann::json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || !j[key].is_string()) throw ParseError(line, std::string("missing string field '") + key + "'");
  auto u = Uid::parse(j[key].get<std::string>());
  if (!u) throw ParseError(line, std::string("bad uid in '") + key + "'");
  return *u;
}

}  // namespace

std::string_view to_string(InferenceKind k) {
  for (auto [kind, name] : kKindNames)
    if (kind == k) return name;
  return "?";
}

std::optional<InferenceKind> parse_kind(std::string_view s) {
  for (auto [kind, name] : kKindNames)
    if (name == s) return kind;
  return std::nullopt;
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::ok: return "ok";
    case Outcome::access_denied: return "access_denied";
    case Outcome::service_unavailable: return "service_unavailable";
  }
  return "?";
}

void validate(const InferenceParams& p) {
  if (!(p.min_weight >= 0.0 && p.min_weight <= 1.0)) throw InvalidArgument("min_weight must lie in [0,1]");
  if (p.timeout < SimDuration::zero()) throw InvalidArgument("timeout must be non-negative");
  switch (p.kind) {
    case InferenceKind::relation_test:
      if (!p.alter) throw InvalidArgument("relation_test needs alter");
      break;
    case InferenceKind::top_relations:
      if (!p.n || *p.n == 0) throw InvalidArgument("top_relations needs n >= 1");
      break;
    case InferenceKind::neighborhood:
      if (!p.radius || *p.radius == 0) throw InvalidArgument("neighborhood needs radius >= 1");
      break;
    case InferenceKind::proximity:
      if (!p.radius || *p.radius == 0) throw InvalidArgument("proximity needs radius >= 1");
      if (!p.distance_m || !(*p.distance_m >= 0.0)) throw InvalidArgument("proximity needs distance_m >= 0");
      break;
    case InferenceKind::social_strength:
      if (!p.alter) throw InvalidArgument("social_strength needs alter");
      if (*p.alter == p.ego) throw InvalidArgument("social_strength needs ego != alter");
      break;
  }
}

std::uint32_t budget_levels(const InferenceParams& p) {
  switch (p.kind) {
    case InferenceKind::neighborhood: return p.radius.value_or(1);
    // frontier users still have to be visited for their locations
    case InferenceKind::proximity: return p.radius.value_or(1) + 1;
    case InferenceKind::social_strength: return 2;
    default: return 1;
  }
}

SimDuration secondary_budget(SimDuration timeout, std::uint32_t levels, std::uint32_t hop) {
  return scale_budget(timeout, static_cast<std::int64_t>(levels) - static_cast<std::int64_t>(hop) - 1);
}

std::size_t InferenceResult::distinct_serving_peers() const {
  return std::set<PeerId>(serving_peers.begin(), serving_peers.end()).size();
}

std::vector<RequestLine> read_requests(std::istream& in) {
  std::vector<RequestLine> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(line_no, e.what());
    }
    if (!j.is_object()) throw ParseError(line_no, "expected a JSON object");
    RequestLine r;
    r.id = j.value("id", static_cast<std::uint64_t>(out.size()));
    auto& p = r.params;
    const auto kind = parse_kind(j.value("kind", std::string()));
    if (!kind) throw ParseError(line_no, "unknown or missing kind");
    p.kind = *kind;
    p.ego = uid_field(j, "ego", line_no);
    try {
      if (j.contains("alter")) p.alter = uid_field(j, "alter", line_no);
      if (j.contains("originator")) p.originator = uid_field(j, "originator", line_no);
      if (j.contains("label") && !j["label"].is_null()) p.label = j["label"].get<std::string>();
      p.min_weight = j.value("chi", 0.0);
      if (j.contains("n")) p.n = j["n"].get<std::uint32_t>();
      if (j.contains("radius")) p.radius = j["radius"].get<std::uint32_t>();
      if (j.contains("distance_m")) p.distance_m = j["distance_m"].get<double>();
      if (j.contains("timestamp_s")) p.timestamp = at_seconds(j["timestamp_s"].get<double>());
      if (j.contains("timeout_s")) {
        const auto& t = j["timeout_s"];
        if (t.is_null() || (t.is_string() && t.get<std::string>() == "inf"))
          p.timeout = kInfiniteDuration;
        else
          p.timeout = from_seconds(t.get<double>());
      }
      p.application = j.value("application", p.application);
      r.at = at_seconds(j.value("at_s", 0.0));
      if (j.contains("entry")) {
        auto e = PeerId::parse(j["entry"].get<std::string>());
        if (!e) throw ParseError(line_no, "bad peer id in 'entry'");
        r.entry = *e;
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, e.what());
    }
    try {
      validate(p);
    } catch (const InvalidArgument& e) {
      throw ParseError(line_no, e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_request(std::ostream& out, const RequestLine& r) {
  nlohmann::ordered_json j;
  const auto& p = r.params;
  j["id"] = r.id;
  j["kind"] = std::string(to_string(p.kind));
  j["ego"] = p.ego.to_string();
  if (p.alter) j["alter"] = p.alter->to_string();
  if (p.label) j["label"] = *p.label;
  j["chi"] = p.min_weight;
  if (p.n) j["n"] = *p.n;
  if (p.radius) j["radius"] = *p.radius;
  if (p.distance_m) j["distance_m"] = *p.distance_m;
  if (p.timestamp) j["timestamp_s"] = to_seconds(p.timestamp->time_since_epoch());
  if (p.timeout == kInfiniteDuration)
    j["timeout_s"] = "inf";
  else
    j["timeout_s"] = to_seconds(p.timeout);
  if (p.originator) j["originator"] = p.originator->to_string();
  j["application"] = p.application;
  j["at_s"] = to_seconds(r.at.time_since_epoch());
  if (r.entry) j["entry"] = r.entry->to_string();
  out << j.dump() << '\n';
}

}  // namespace sks::inference
