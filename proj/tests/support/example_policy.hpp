#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sks/acp/policy.hpp"
#include "sks/core/rng.hpp"
#include "sks/inference/centralized.hpp"

// Bob's example policy set, a companion policy for the atoms the example does
// not use, and a scripted set of contexts with verdicts worked out by hand
// rule by rule.
namespace sks::example_policy {

inline const char* kBobPolicy =
    "<χ=0.3> :: <ρ=1 AND S=SofaSurfer>\n"
    "<Δ> :: <B=mom OR B=dad OR B=brother>\n"
    "<α=Skype> :: <ρ=2 AND γ=Skype AND y=0.2>\n"
    "<α=Facebook AND χ=0.2> :: <ρ=1 AND γ=Facebook>\n"
    "<α=LinkedIn> :: <(ρ=2 AND γ=LinkedIn) OR S=CallCensor>\n"
    "---\n"
    "<blacklist> :: <B=Alice OR B=Gary OR C=Alice>\n";

inline const char* kCompanionPolicy =
    "<α=Work> :: <P=laptop AND NOT M=relay>\n"
    "<Δ> :: <L=office>\n"
    "---\n"
    "<blacklist> :: <P=stolen OR M=tap>\n";

inline const std::vector<std::string> kNames{"Bob",   "Alice", "Gary", "mom",  "dad",  "brother", "Carol", "Dave",
                                             "Erin",  "Frank", "Gina", "Hank", "Ivan", "Jack",    "Kim",   "Lee"};

inline Uid user(const std::string& name) {
  for (std::size_t i = 0; i < kNames.size(); ++i)
    if (kNames[i] == name) return Uid::from_u64(100 + i);
  return Uid::from_u64(999);
}

inline PeerId peer(const std::string& name) { return PeerId::from_u64(mix_keys({std::hash<std::string>{}(name)}) | 1); }

inline const GeoPoint kOffice{40.7423, -74.1793};

inline acp::Directory directory() {
  acp::Directory d;
  for (const auto& n : kNames) d.users[n] = user(n);
  for (const char* p : {"laptop", "relay", "stolen", "tap", "phone"}) d.peers[p] = peer(p);
  d.places["office"] = acp::Place{"office", kOffice, 500.0};
  return d;
}

/// Bob's neighborhood: co-workers over LinkedIn, friends over Facebook,
/// chat contacts over Skype, family.
inline graph::SocialMultiGraph bob_graph() {
  graph::SocialMultiGraph g;
  auto tie = [&](const char* a, const char* b, const char* label, double w) { g.insert_edge(user(a), user(b), label, w); };
  tie("Bob", "Carol", "LinkedIn", 0.5);
  tie("Carol", "Dave", "LinkedIn", 0.5);
  tie("Carol", "Lee", "Facebook", 0.5);
  tie("Bob", "Alice", "LinkedIn", 0.6);
  tie("Bob", "Erin", "Facebook", 0.6);
  tie("Erin", "Frank", "Facebook", 0.5);
  tie("Bob", "Gina", "Skype", 0.3);
  tie("Gina", "Hank", "Skype", 0.25);
  tie("Bob", "Ivan", "Skype", 0.1);
  tie("Ivan", "Jack", "Skype", 0.5);
  tie("Bob", "mom", "Facebook", 0.9);
  tie("Bob", "dad", "Facebook", 0.8);
  tie("Bob", "brother", "Facebook", 0.7);
  tie("Bob", "Gary", "Facebook", 0.4);
  g.ensure_vertex(user("Kim"));
  return g;
}

struct Case {
  std::string what;
  bool companion = false;  // evaluate against the companion policy
  std::string originator;
  std::string application = "sks";
  std::string from_peer = "phone";
  std::vector<std::string> via_users;
  std::vector<std::string> via_peers;
  std::optional<GeoPoint> at;
  acp::DataRequest data;
  // expected verdict
  bool granted = false;
  acp::Stage stage = acp::Stage::no_rule;
  std::optional<std::size_t> rule;
  double floor = 0.0;
};

inline acp::DataRequest edges(const char* label) {
  return acp::DataRequest::edges(label ? std::optional<std::string>(label) : std::nullopt);
}

inline std::vector<Case> cases() {
  using acp::Stage;
  const GeoPoint far{40.7580, -73.9855};  // about 17 km from the office
  const GeoPoint near{40.7440, -74.1780};
  return {
      {"blacklisted originator, label request", false, "Alice", "sks", "phone", {}, {}, {}, edges("LinkedIn"),
       false, Stage::blacklist, {}, 0},
      {"blacklisted originator, location", false, "Alice", "CallCensor", "phone", {}, {}, {},
       acp::DataRequest::location(), false, Stage::blacklist, {}, 0},
      {"blacklist beats a matching Facebook rule", false, "Gary", "sks", "phone", {}, {}, {}, edges("Facebook"),
       false, Stage::blacklist, {}, 0},
      {"blacklisted intermediate user", false, "Carol", "sks", "phone", {"Alice"}, {}, {}, edges("LinkedIn"), false,
       Stage::blacklist, {}, 0},
      {"LinkedIn co-worker, 1 hop", false, "Carol", "sks", "phone", {}, {}, {}, edges("LinkedIn"), true,
       Stage::label_rules, 4, 0},
      {"co-worker of co-worker over LinkedIn", false, "Dave", "sks", "phone", {}, {}, {}, edges("LinkedIn"), true,
       Stage::label_rules, 4, 0},
      {"2 hops but not all over LinkedIn", false, "Lee", "sks", "phone", {}, {}, {}, edges("LinkedIn"), false,
       Stage::no_rule, {}, 0},
      {"CallCensor application, 2 hops mixed labels", false, "Lee", "CallCensor", "phone", {}, {}, {},
       edges("LinkedIn"), true, Stage::label_rules, 4, 0},
      {"CallCensor application, unconnected user", false, "Kim", "CallCensor", "phone", {}, {}, {}, edges("LinkedIn"),
       true, Stage::label_rules, 4, 0},
      {"CallCensor does not open Facebook", false, "Kim", "CallCensor", "phone", {}, {}, {}, edges("Facebook"), false,
       Stage::no_rule, {}, 0},
      {"Facebook friend, 1 hop", false, "Erin", "sks", "phone", {}, {}, {}, edges("Facebook"), true,
       Stage::label_rules, 3, 0.2},
      {"Facebook friend of friend, rule needs 1 hop", false, "Frank", "sks", "phone", {}, {}, {}, edges("Facebook"),
       false, Stage::no_rule, {}, 0},
      {"Skype 2 hops, every tie >= 0.2", false, "Hank", "sks", "phone", {}, {}, {}, edges("Skype"), true,
       Stage::label_rules, 2, 0},
      {"Skype 2 hops through a 0.1 tie", false, "Jack", "sks", "phone", {}, {}, {}, edges("Skype"), false,
       Stage::no_rule, {}, 0},
      {"Skype 1 hop", false, "Gina", "sks", "phone", {}, {}, {}, edges("Skype"), true, Stage::label_rules, 2, 0},
      {"family reads location", false, "mom", "sks", "phone", {}, {}, {}, acp::DataRequest::location(), true,
       Stage::label_rules, 1, 0},
      {"brother reads location", false, "brother", "sks", "phone", {}, {}, {}, acp::DataRequest::location(), true,
       Stage::label_rules, 1, 0},
      {"friend cannot read location", false, "Erin", "CallCensor", "phone", {}, {}, {},
       acp::DataRequest::location(), false, Stage::no_rule, {}, 0},
      {"weight rule for any label", false, "Erin", "SofaSurfer", "phone", {}, {}, {}, edges(nullptr), true,
       Stage::weight_rules, 0, 0.3},
      {"label rules are checked before weight rules", false, "Erin", "SofaSurfer", "phone", {}, {}, {},
       edges("Facebook"), true, Stage::label_rules, 3, 0.2},
      {"weight rule needs 1 hop", false, "Frank", "SofaSurfer", "phone", {}, {}, {}, edges(nullptr), false,
       Stage::no_rule, {}, 0},
      {"owner reads own data", false, "Bob", "sks", "phone", {}, {}, {}, acp::DataRequest::location(), true,
       Stage::owner, {}, 0},
      {"originator peer allowed", true, "Kim", "sks", "laptop", {}, {}, {}, edges("Work"), true, Stage::label_rules,
       0, 0},
      {"excluded intermediate peer", true, "Kim", "sks", "laptop", {}, {"relay"}, {}, edges("Work"), false,
       Stage::no_rule, {}, 0},
      {"other originator peer", true, "Kim", "sks", "phone", {}, {}, {}, edges("Work"), false, Stage::no_rule, {}, 0},
      {"originator inside the office", true, "Kim", "sks", "phone", {}, {}, near, acp::DataRequest::location(), true,
       Stage::label_rules, 1, 0},
      {"originator far from the office", true, "Kim", "sks", "phone", {}, {}, far, acp::DataRequest::location(),
       false, Stage::no_rule, {}, 0},
      {"originator without a location", true, "Kim", "sks", "phone", {}, {}, {}, acp::DataRequest::location(), false,
       Stage::no_rule, {}, 0},
      {"blacklisted originator peer", true, "Kim", "sks", "stolen", {}, {}, near, acp::DataRequest::location(), false,
       Stage::blacklist, {}, 0},
      {"blacklisted intermediate peer", true, "Kim", "sks", "laptop", {}, {"tap"}, {}, edges("Work"), false,
       Stage::blacklist, {}, 0},
  };
}

/// Context whose distances are measured on `g` from Bob to the originator.
inline acp::RequestContext context(const Case& c, const graph::SocialMultiGraph& g) {
  acp::RequestContext ctx;
  ctx.originator_user = user(c.originator);
  ctx.originator_peer = peer(c.from_peer);
  ctx.application = c.application;
  for (const auto& n : c.via_users) ctx.intermediate_users.push_back(user(n));
  for (const auto& n : c.via_peers) ctx.intermediate_peers.push_back(peer(n));
  ctx.originator_location = c.at;
  const Uid owner = user("Bob"), who = user(c.originator);
  ctx.social_distance = inference::constrained_distance(g, owner, who, acp::PathConstraint{64, std::nullopt, 0.0}, {});
  ctx.path_distance = [&g, owner, who](const acp::PathConstraint& pc) {
    return inference::constrained_distance(g, owner, who, pc, {});
  };
  return ctx;
}

}  // namespace sks::example_policy
