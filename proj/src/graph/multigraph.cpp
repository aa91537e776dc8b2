#include "sks/graph/multigraph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "sks/core/errors.hpp"

namespace sks::graph {

namespace {

double clamp_weight(double w) {
  if (std::isnan(w)) throw InvalidArgument("edge weight is NaN");
  return std::clamp(w, 0.0, 1.0);
}

}  // namespace

std::string_view to_string(UpdateOp op) {
  switch (op) {
    case UpdateOp::create: return "create";
    case UpdateOp::remove: return "remove";
    case UpdateOp::adjust_weight: return "adjust-weight";
    case UpdateOp::set_weight: return "set-weight";
    case UpdateOp::set_location: return "set-location";
  }
  return "?";
}

std::optional<UpdateOp> parse_update_op(std::string_view s) {
  if (s == "create") return UpdateOp::create;
  if (s == "remove") return UpdateOp::remove;
  if (s == "adjust-weight" || s == "adjust") return UpdateOp::adjust_weight;
  if (s == "set-weight" || s == "set") return UpdateOp::set_weight;
  if (s == "set-location") return UpdateOp::set_location;
  return std::nullopt;
}

VertexId SocialMultiGraph::ensure_vertex(Uid uid) {
  if (auto it = index_.find(uid); it != index_.end()) return it->second;
  const auto v = static_cast<VertexId>(attrs_.size());
  VertexAttributes a;
  a.uid = uid;
  attrs_.push_back(a);
  out_.emplace_back();
  in_.emplace_back();
  last_seq_.push_back(0);
  index_.emplace(uid, v);
  return v;
}

std::optional<VertexId> SocialMultiGraph::find(Uid uid) const {
  if (auto it = index_.find(uid); it != index_.end()) return it->second;
  return std::nullopt;
}

VertexId SocialMultiGraph::require(Uid uid) const {
  if (auto v = find(uid)) return *v;
  throw UnknownUser("unknown user " + uid.to_string());
}

LabelId SocialMultiGraph::intern_label(std::string_view name) {
  if (auto it = label_index_.find(std::string(name)); it != label_index_.end()) return it->second;
  const auto id = static_cast<LabelId>(labels_.size());
  labels_.emplace_back(name);
  label_index_.emplace(labels_.back(), id);
  return id;
}

std::optional<LabelId> SocialMultiGraph::find_label(std::string_view name) const {
  if (auto it = label_index_.find(std::string(name)); it != label_index_.end()) return it->second;
  return std::nullopt;
}

SocialMultiGraph::OutEdge* SocialMultiGraph::find_out(VertexId ego, VertexId alter, LabelId label) {
  for (auto& e : out_[ego])
    if (e.target == alter && e.label == label) return &e;
  return nullptr;
}

void SocialMultiGraph::erase_in(VertexId target, VertexId source) {
  auto& in = in_[target];
  if (auto it = std::find(in.begin(), in.end(), source); it != in.end()) in.erase(it);
}

void SocialMultiGraph::insert_edge(Uid ego, Uid alter, std::string_view label, double weight, SimTime last) {
  const double w = clamp_weight(weight);
  const VertexId a = ensure_vertex(ego);
  const VertexId b = ensure_vertex(alter);
  const LabelId l = intern_label(label);
  if (auto* e = find_out(a, b, l)) {
    e->weight = w;
    e->last_interaction = last;
    e->aging_anchor = last;
    return;
  }
  out_[a].push_back(OutEdge{b, l, w, last, last});
  in_[b].push_back(a);
  ++edge_count_;
}

bool SocialMultiGraph::remove_edge(Uid ego, Uid alter, std::string_view label) {
  const auto a = find(ego);
  const auto b = find(alter);
  const auto l = find_label(label);
  if (!a || !b || !l) return false;
  auto& out = out_[*a];
  auto it = std::find_if(out.begin(), out.end(), [&](const OutEdge& e) { return e.target == *b && e.label == *l; });
  if (it == out.end()) return false;
  out.erase(it);
  erase_in(*b, *a);
  --edge_count_;
  return true;
}

void SocialMultiGraph::set_location(Uid uid, GeoPoint where, SimTime at) {
  auto& a = attrs_[ensure_vertex(uid)];
  a.location = where;
  a.location_timestamp = at;
}

std::uint64_t SocialMultiGraph::last_seq(Uid ego) const {
  if (auto v = find(ego)) return last_seq_[*v];
  return 0;
}

ApplyOutcome SocialMultiGraph::apply_update(const EdgeUpdateRecord& rec) {
  const std::uint64_t expected = last_seq(rec.ego) + 1;
  if (rec.seq != expected) {
    throw ReplayGap("record seq " + std::to_string(rec.seq) + " for " + rec.ego.to_string() + ", expected " +
                    std::to_string(expected));
  }
  if (std::isnan(rec.value)) throw InvalidArgument("update value is NaN");
  const VertexId ego = ensure_vertex(rec.ego);
  last_seq_[ego] = rec.seq;

  ApplyOutcome out;
  if (rec.op == UpdateOp::set_location) {
    if (!rec.location) throw InvalidArgument("set-location record without coordinates");
    set_location(rec.ego, *rec.location, rec.issued_at);
    out.changed = true;
    return out;
  }

  const VertexId alter = ensure_vertex(rec.alter);
  const LabelId label = intern_label(rec.label);
  OutEdge* e = find_out(ego, alter, label);
  switch (rec.op) {
    case UpdateOp::create:
    case UpdateOp::set_weight:
      if (e) {
        e->weight = clamp_weight(rec.value);
        e->last_interaction = e->aging_anchor = rec.issued_at;
      } else {
        out_[ego].push_back(OutEdge{alter, label, clamp_weight(rec.value), rec.issued_at, rec.issued_at});
        in_[alter].push_back(ego);
        ++edge_count_;
      }
      out.changed = true;
      break;
    case UpdateOp::adjust_weight:
      if (!e) {
        out.missing_edge = true;
        break;
      }
      e->weight = clamp_weight(effective_weight(ego, *e, rec.issued_at) + rec.value);
      e->last_interaction = e->aging_anchor = rec.issued_at;
      out.changed = true;
      break;
    case UpdateOp::remove:
      if (!e) {
        out.missing_edge = true;
        break;
      }
      out.changed = remove_edge(rec.ego, rec.alter, rec.label);
      break;
    case UpdateOp::set_location:
      break;
  }
  return out;
}

double SocialMultiGraph::effective_weight(VertexId ego, const OutEdge& e, SimTime now) const {
  if (now <= e.aging_anchor || e.weight == 0.0) return e.weight;
  const auto& a = attrs_[ego];
  if (a.aging_period <= SimDuration::zero() || a.aging_decrement <= 0.0) return e.weight;
  const auto periods = (now - e.aging_anchor) / a.aging_period;
  if (periods == 0) return e.weight;
  const double factor = std::pow(1.0 - std::min(a.aging_decrement, 1.0), static_cast<double>(periods));
  const double w = e.weight * factor;
  // The connection never completely disappears.
  return w > 0.0 ? w : std::numeric_limits<double>::denorm_min();
}

void SocialMultiGraph::age_edges(SimTime now) {
  for (VertexId v = 0; v < out_.size(); ++v) {
    const auto& a = attrs_[v];
    if (a.aging_period <= SimDuration::zero()) continue;
    for (auto& e : out_[v]) {
      if (now <= e.aging_anchor) continue;
      const auto periods = (now - e.aging_anchor) / a.aging_period;
      if (periods == 0) continue;
      e.weight = effective_weight(v, e, now);
      e.aging_anchor += a.aging_period * periods;
    }
  }
}

std::optional<double> SocialMultiGraph::weight(Uid ego, Uid alter, std::string_view label, SimTime now) const {
  const auto a = find(ego);
  const auto b = find(alter);
  const auto l = find_label(label);
  if (!a || !b || !l) return std::nullopt;
  for (const auto& e : out_[*a])
    if (e.target == *b && e.label == *l) return effective_weight(*a, e, now);
  return std::nullopt;
}

std::vector<std::pair<std::string, double>> SocialMultiGraph::labels_between(Uid ego, Uid alter, SimTime now) const {
  std::vector<std::pair<std::string, double>> out;
  const auto a = find(ego);
  const auto b = find(alter);
  if (!a || !b) return out;
  for (const auto& e : out_[*a])
    if (e.target == *b) out.emplace_back(labels_[e.label], effective_weight(*a, e, now));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<VertexId> SocialMultiGraph::neighbors(VertexId v) const {
  std::vector<VertexId> out;
  out.reserve(out_[v].size());
  for (const auto& e : out_[v]) out.push_back(e.target);
  std::sort(out.begin(), out.end(), [&](VertexId x, VertexId y) { return attrs_[x].uid < attrs_[y].uid; });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<SocialEdge> SocialMultiGraph::edges() const {
  std::vector<SocialEdge> out;
  out.reserve(edge_count_);
  for (VertexId v = 0; v < out_.size(); ++v)
    for (const auto& e : out_[v])
      out.push_back(SocialEdge{attrs_[v].uid, attrs_[e.target].uid, labels_[e.label], e.weight, e.last_interaction});
  std::sort(out.begin(), out.end(), [](const SocialEdge& x, const SocialEdge& y) {
    return std::tie(x.ego, x.alter, x.label) < std::tie(y.ego, y.alter, y.label);
  });
  return out;
}

std::vector<Uid> SocialMultiGraph::vertex_uids() const {
  std::vector<Uid> out;
  out.reserve(attrs_.size());
  for (const auto& a : attrs_) out.push_back(a.uid);
  std::sort(out.begin(), out.end());
  return out;
}

SocialMultiGraph SocialMultiGraph::snapshot_subgraph(std::span<const Uid> users) const {
  std::vector<VertexId> members;
  members.reserve(users.size());
  for (Uid u : users) members.push_back(require(u));
  std::sort(members.begin(), members.end(), [&](VertexId x, VertexId y) { return attrs_[x].uid < attrs_[y].uid; });
  members.erase(std::unique(members.begin(), members.end()), members.end());

  SocialMultiGraph sub;
  auto copy_vertex = [&](VertexId v) {
    const VertexId nv = sub.ensure_vertex(attrs_[v].uid);
    sub.attrs_[nv] = attrs_[v];
    return nv;
  };
  auto copy_edge = [&](VertexId from, const OutEdge& e) {
    const VertexId a = copy_vertex(from);
    const VertexId b = copy_vertex(e.target);
    const LabelId l = sub.intern_label(labels_[e.label]);
    if (sub.find_out(a, b, l)) return;
    sub.out_[a].push_back(OutEdge{b, l, e.weight, e.last_interaction, e.aging_anchor});
    sub.in_[b].push_back(a);
    ++sub.edge_count_;
  };
  for (VertexId v : members) {
    const VertexId nv = copy_vertex(v);
    sub.last_seq_[nv] = last_seq_[v];
  }
  for (VertexId v : members) {
    for (const auto& e : out_[v]) copy_edge(v, e);
    for (VertexId src : in_[v])
      for (const auto& e : out_[src])
        if (e.target == v) copy_edge(src, e);
  }
  return sub;
}

void SocialMultiGraph::import_user(const SocialMultiGraph& src, Uid uid) {
  const VertexId sv = src.require(uid);
  const VertexId v = ensure_vertex(uid);
  for (const auto& e : out_[v]) erase_in(e.target, v);
  edge_count_ -= out_[v].size();
  out_[v].clear();
  attrs_[v] = src.attrs_[sv];
  last_seq_[v] = src.last_seq_[sv];
  for (const auto& e : src.out_[sv]) {
    const VertexId t = ensure_vertex(src.attrs_[e.target].uid);
    const LabelId l = intern_label(src.labels_[e.label]);
    out_[v].push_back(OutEdge{t, l, e.weight, e.last_interaction, e.aging_anchor});
    in_[t].push_back(v);
    ++edge_count_;
  }
}

bool same_content(const SocialMultiGraph& a, const SocialMultiGraph& b) {
  if (a.num_vertices() != b.num_vertices() || a.num_edges() != b.num_edges()) return false;
  for (Uid u : a.vertex_uids()) {
    const auto vb = b.find(u);
    if (!vb) return false;
    const auto& x = a.attributes(*a.find(u));
    const auto& y = b.attributes(*vb);
    if (x.location != y.location || x.location_timestamp != y.location_timestamp ||
        x.aging_decrement != y.aging_decrement || x.aging_period != y.aging_period)
      return false;
  }
  return a.edges() == b.edges();
}

}  // namespace sks::graph
