#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sks/core/geo.hpp"
#include "sks/core/ids.hpp"

namespace sks::acp {

/// Boolean tree over atoms of one kind.
template <class Atom>
struct Expr {
  enum class Op { atom, all_of, any_of, negate };
  Op op = Op::atom;
  Atom atom{};
  std::vector<Expr> children;

  static Expr leaf(Atom a) { return Expr{Op::atom, std::move(a), {}}; }
  static Expr combine(Op op, std::vector<Expr> children) { return Expr{op, Atom{}, std::move(children)}; }

  bool operator==(const Expr&) const = default;
};

/// Social data object selectors (the left-hand side of a rule).
struct ObjectAtom {
  enum class Kind { edge_label, edge_weight, location, any };
  Kind kind = Kind::any;
  std::string label;  // edge_label
  double weight = 0;  // edge_weight: weights >= this may be disclosed

  bool operator==(const ObjectAtom&) const = default;
};

struct Place {
  std::string name;
  GeoPoint center;
  double radius_m = 0.0;

  bool operator==(const Place&) const = default;
};

/// Requirement atoms (the right-hand side of a rule).
struct SpecAtom {
  enum class Kind {
    social_distance,     // rho
    edge_label,          // gamma
    edge_weight,         // y
    originator_user,     // B
    originator_peer,     // P
    intermediate_user,   // C
    intermediate_peer,   // M
    application,         // S
    originator_location, // L
    any,                 // *
  };
  Kind kind = Kind::any;
  std::uint32_t hops = 0;
  std::string text;  // label or application name
  double weight = 0;
  Uid user;
  PeerId peer;
  Place place;

  bool operator==(const SpecAtom&) const = default;
};

using ObjectExpr = Expr<ObjectAtom>;
using SpecExpr = Expr<SpecAtom>;

struct Rule {
  ObjectExpr objects;
  SpecExpr spec;

  /// Rules that select by label or location are checked before rules that
  /// select by weight alone.
  bool weight_only() const;

  bool operator==(const Rule&) const = default;
};

/// Whitelist rules plus an overriding blacklist (B/P/C/M atoms).
struct AccessPolicy {
  Uid owner;
  std::vector<Rule> rules;
  std::vector<SpecAtom> blacklist;

  /// `<*> :: <*>`: everything disclosed to everyone not blacklisted.
  static AccessPolicy permissive(Uid owner);

  bool operator==(const AccessPolicy&) const = default;
};

/// Resolves principal names used in policy text.
struct Directory {
  std::map<std::string, Uid> users;
  std::map<std::string, PeerId> peers;
  std::map<std::string, Place> places;

  std::string user_name(Uid u) const;
  std::string peer_name(PeerId p) const;
};

/// Throws ParseError carrying the 1-based line number.
AccessPolicy parse_policy(std::string_view text, Uid owner, const Directory& dir = {});
AccessPolicy parse_policy_file(const std::string& path, Uid owner, const Directory& dir = {});

/// Canonical text; parse_policy(to_text(p)) == p.
std::string to_text(const AccessPolicy& policy, const Directory& dir = {});

// ---------------------------------------------------------------------------
// Evaluation

/// Path requirement checked against the owner's social neighborhood.
struct PathConstraint {
  std::uint32_t max_hops = 1;
  std::optional<std::string> label;
  double min_weight = 0.0;
};

struct RequestContext {
  Uid originator_user;
  PeerId originator_peer;
  std::string application;
  std::vector<Uid> intermediate_users;
  std::vector<PeerId> intermediate_peers;
  /// Hops from the owner to the originator over any label.
  std::optional<std::uint32_t> social_distance;
  std::optional<GeoPoint> originator_location;
  /// Hops from the owner to the originator over edges satisfying the
  /// label/weight part of the constraint (nullopt: unreachable).
  std::function<std::optional<std::uint32_t>(const PathConstraint&)> path_distance;
};

/// What a request wants to read from the owner.
struct DataRequest {
  enum class Kind { edges, location };
  Kind kind = Kind::edges;
  std::optional<std::string> label;  // nullopt: edges of any label
  double min_weight = 0.0;

  static DataRequest edges(std::optional<std::string> label, double min_weight = 0.0) {
    return DataRequest{Kind::edges, std::move(label), min_weight};
  }
  static DataRequest location() { return DataRequest{Kind::location, std::nullopt, 0.0}; }
};

enum class Stage { blacklist, owner, label_rules, weight_rules, no_rule };

struct Verdict {
  bool granted = false;
  Stage stage = Stage::no_rule;
  std::optional<std::size_t> rule;
  /// Edges lighter than this are withheld even when granted.
  double weight_floor = 0.0;
};

/// Blacklist, then owner self-access, then label rules, then weight rules.
Verdict evaluate(const AccessPolicy& policy, const RequestContext& ctx, const DataRequest& requested);

bool blacklisted(const AccessPolicy& policy, const RequestContext& ctx);

}  // namespace sks::acp
