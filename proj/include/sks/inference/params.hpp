#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sks/core/ids.hpp"
#include "sks/core/time.hpp"

namespace sks::inference {

enum class InferenceKind { relation_test, top_relations, neighborhood, proximity, social_strength };

std::string_view to_string(InferenceKind k);
std::optional<InferenceKind> parse_kind(std::string_view s);

struct InferenceParams {
  InferenceKind kind = InferenceKind::neighborhood;
  Uid ego;
  std::optional<Uid> alter;
  std::optional<std::string> label;  // nullopt: any label
  double min_weight = 0.0;           // chi
  std::optional<std::uint32_t> n;
  std::optional<std::uint32_t> radius;
  std::optional<double> distance_m;
  /// Locations recorded before this instant are stale.
  std::optional<SimTime> timestamp;
  /// Per-hop budget; kInfiniteDuration waits for everything.
  SimDuration timeout = kInfiniteDuration;

  /// Who is asking (defaults to ego) and through which application.
  std::optional<Uid> originator;
  std::string application = "sks";

  Uid originator_user() const { return originator.value_or(ego); }
};

/// Throws InvalidArgument when a kind's required fields are missing or out of range.
void validate(const InferenceParams& p);

/// Number of timeout levels the request spans (n in the T*(n-k) budget rule).
std::uint32_t budget_levels(const InferenceParams& p);

/// Time a secondary request sent from a task at `hop` may take:
/// T * (levels - hop - 1), saturating for an infinite T.
SimDuration secondary_budget(SimDuration timeout, std::uint32_t levels, std::uint32_t hop);

struct ScoredUser {
  Uid uid;
  double score = 0.0;  // hops, weight or meters depending on the kind

  bool operator==(const ScoredUser&) const = default;
};

enum class Outcome { ok, access_denied, service_unavailable };
std::string_view to_string(Outcome o);

using ResultValue = std::variant<std::monostate, bool, double, std::vector<ScoredUser>>;

struct InferenceResult {
  Outcome outcome = Outcome::ok;
  ResultValue value;
  double completion = 1.0;
  std::vector<PeerId> serving_peers;  // one entry per task served, sorted
  std::uint64_t messages_sent = 0;
  SimDuration elapsed{0};
  bool partial = false;

  const std::vector<ScoredUser>* users() const { return std::get_if<std::vector<ScoredUser>>(&value); }
  std::size_t distinct_serving_peers() const;
};

/// One request per line, as JSON objects. Fields: kind, ego, alter, label,
/// chi, n, radius, distance_m, timestamp_s, timeout_s ("inf" or number),
/// originator, application, plus the scheduling fields id, at_s, entry.
struct RequestLine {
  std::uint64_t id = 0;
  InferenceParams params;
  SimTime at{};
  std::optional<PeerId> entry;
};

std::vector<RequestLine> read_requests(std::istream& in);
void write_request(std::ostream& out, const RequestLine& r);

}  // namespace sks::inference
