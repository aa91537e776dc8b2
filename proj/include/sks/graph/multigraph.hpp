#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sks/core/geo.hpp"
#include "sks/core/ids.hpp"
#include "sks/core/time.hpp"

namespace sks::graph {

using VertexId = std::uint32_t;
using LabelId = std::uint32_t;

struct VertexAttributes {
  Uid uid;
  std::optional<GeoPoint> location;
  std::optional<SimTime> location_timestamp;  // present iff location is
  double aging_decrement = 0.10;
  SimDuration aging_period = kOneWeek;
};

/// Value view of one labeled edge.
struct SocialEdge {
  Uid ego;
  Uid alter;
  std::string label;
  double weight = 0.0;
  SimTime last_interaction{};

  bool operator==(const SocialEdge&) const = default;
};

enum class UpdateOp {
  create,
  remove,
  adjust_weight,  // additive delta
  set_weight,     // absolute value, for replaying traces
  set_location,   // vertex attribute of the ego; alter and label unused
};

std::string_view to_string(UpdateOp op);
std::optional<UpdateOp> parse_update_op(std::string_view s);

/// One append-only record from a user's personal aggregator.
struct EdgeUpdateRecord {
  std::uint64_t seq = 0;
  Uid ego;
  Uid alter;
  std::string label;
  UpdateOp op = UpdateOp::create;
  double value = 0.0;
  SimTime issued_at{};
  std::optional<GeoPoint> location;

  bool operator==(const EdgeUpdateRecord&) const = default;
};

struct ApplyOutcome {
  bool changed = false;
  bool missing_edge = false;  // remove/adjust of an edge that does not exist
};

/// Directed, labeled, weighted multigraph over user UIDs. At most one edge
/// per (ego, alter, label). Weights stay in [0,1]; aging is multiplicative and
/// applied lazily on read through effective_weight().
class SocialMultiGraph {
 public:
  struct OutEdge {
    VertexId target;
    LabelId label;
    double weight;
    SimTime last_interaction;
    SimTime aging_anchor;  // instant from which idle periods are counted
  };

  VertexId ensure_vertex(Uid uid);
  std::optional<VertexId> find(Uid uid) const;
  bool contains(Uid uid) const { return index_.contains(uid); }
  /// Throws UnknownUser.
  VertexId require(Uid uid) const;

  std::size_t num_vertices() const { return attrs_.size(); }
  std::size_t num_edges() const { return edge_count_; }

  const VertexAttributes& attributes(VertexId v) const { return attrs_[v]; }
  VertexAttributes& attributes(VertexId v) { return attrs_[v]; }
  Uid uid(VertexId v) const { return attrs_[v].uid; }

  std::span<const OutEdge> out_edges(VertexId v) const { return out_[v]; }
  /// One entry per incoming labeled edge.
  std::span<const VertexId> in_sources(VertexId v) const { return in_[v]; }

  LabelId intern_label(std::string_view name);
  std::optional<LabelId> find_label(std::string_view name) const;
  const std::string& label_name(LabelId id) const { return labels_[id]; }
  std::size_t num_labels() const { return labels_.size(); }

  /// Upsert used by loaders; bypasses the update log sequence.
  void insert_edge(Uid ego, Uid alter, std::string_view label, double weight, SimTime last_interaction = {});
  bool remove_edge(Uid ego, Uid alter, std::string_view label);
  void set_location(Uid uid, GeoPoint where, SimTime at);

  /// Applies one log record. Throws ReplayGap unless rec.seq is exactly one
  /// past the highest sequence number applied for rec.ego.
  ApplyOutcome apply_update(const EdgeUpdateRecord& rec);
  std::uint64_t last_seq(Uid ego) const;

  /// Materializes aging up to `now`; idempotent for a fixed `now`.
  void age_edges(SimTime now);

  double effective_weight(VertexId ego, const OutEdge& e, SimTime now) const;

  /// Weight of (ego -> alter, label) after lazy aging; nullopt if absent.
  std::optional<double> weight(Uid ego, Uid alter, std::string_view label, SimTime now) const;
  /// One (label, weight) per labeled edge from ego to alter, sorted by label.
  std::vector<std::pair<std::string, double>> labels_between(Uid ego, Uid alter, SimTime now) const;
  /// Distinct out-neighbors, ascending by Uid.
  std::vector<VertexId> neighbors(VertexId v) const;

  /// All edges sorted by (ego, alter, label).
  std::vector<SocialEdge> edges() const;
  /// All vertex UIDs, ascending.
  std::vector<Uid> vertex_uids() const;

  /// Induced subgraph over `users` plus every edge incident to them and the
  /// boundary vertices those edges touch. Throws UnknownUser.
  SocialMultiGraph snapshot_subgraph(std::span<const Uid> users) const;

  /// Replaces `uid`'s attributes, out-edges and sequence number with exact
  /// copies from `src`. Edge targets are created as bare vertices if absent.
  void import_user(const SocialMultiGraph& src, Uid uid);

 private:
  OutEdge* find_out(VertexId ego, VertexId alter, LabelId label);
  void erase_in(VertexId target, VertexId source);

  std::vector<VertexAttributes> attrs_;
  std::vector<std::vector<OutEdge>> out_;
  std::vector<std::vector<VertexId>> in_;
  std::vector<std::uint64_t> last_seq_;
  std::unordered_map<Uid, VertexId> index_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, LabelId> label_index_;
  std::size_t edge_count_ = 0;
};

/// Same vertices, attributes and edges (weights compared exactly).
bool same_content(const SocialMultiGraph& a, const SocialMultiGraph& b);

}  // namespace sks::graph
