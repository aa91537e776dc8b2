#include <gtest/gtest.h>

#include <sstream>

#include "sks/core/errors.hpp"
#include "sks/core/rng.hpp"
#include "sks/graph/adjacency.hpp"
#include "sks/graph/generators.hpp"
#include "sks/graph/io.hpp"
#include "sks/graph/multigraph.hpp"

namespace sks::graph {
namespace {

const Uid a = Uid::from_u64(1), b = Uid::from_u64(2), c = Uid::from_u64(3), d = Uid::from_u64(4),
          e = Uid::from_u64(5);

EdgeUpdateRecord rec(std::uint64_t seq, Uid ego, Uid alter, std::string label, UpdateOp op, double value,
                     SimTime at = {}) {
  EdgeUpdateRecord r;
  r.seq = seq;
  r.ego = ego;
  r.alter = alter;
  r.label = std::move(label);
  r.op = op;
  r.value = value;
  r.issued_at = at;
  return r;
}

TEST(Multigraph, CreateOnEmptyGraph) {
  SocialMultiGraph g;
  g.apply_update(rec(1, a, b, "Facebook", UpdateOp::create, 0.1));
  EXPECT_EQ(g.num_edges(), 1u);
  EXPECT_EQ(g.num_vertices(), 2u);  // alter created implicitly
  EXPECT_DOUBLE_EQ(*g.weight(a, b, "Facebook", {}), 0.1);
}

TEST(Multigraph, IncrementsClampAtOne) {
  SocialMultiGraph g;
  g.apply_update(rec(1, a, b, "Facebook", UpdateOp::create, 0.1));
  for (std::uint64_t i = 0; i < 95; ++i) g.apply_update(rec(i + 2, a, b, "Facebook", UpdateOp::adjust_weight, 0.01));
  EXPECT_EQ(*g.weight(a, b, "Facebook", {}), 1.0);
  g.apply_update(rec(97, a, b, "Facebook", UpdateOp::adjust_weight, -5.0));
  EXPECT_EQ(*g.weight(a, b, "Facebook", {}), 0.0);
}

TEST(Multigraph, RemoveAndMissingRemove) {
  SocialMultiGraph g;
  g.apply_update(rec(1, a, b, "Facebook", UpdateOp::create, 0.1));
  auto out = g.apply_update(rec(2, a, b, "Facebook", UpdateOp::remove, 0));
  EXPECT_TRUE(out.changed);
  EXPECT_FALSE(g.weight(a, b, "Facebook", {}).has_value());
  out = g.apply_update(rec(3, a, b, "Facebook", UpdateOp::remove, 0));
  EXPECT_FALSE(out.changed);
  EXPECT_TRUE(out.missing_edge);
}

TEST(Multigraph, ReplayGapRejected) {
  SocialMultiGraph g;
  g.apply_update(rec(1, a, b, "x", UpdateOp::create, 0.2));
  EXPECT_THROW(g.apply_update(rec(3, a, b, "x", UpdateOp::adjust_weight, 0.1)), ReplayGap);
  EXPECT_THROW(g.apply_update(rec(1, a, b, "x", UpdateOp::adjust_weight, 0.1)), ReplayGap);
  EXPECT_EQ(g.last_seq(a), 1u);
  // sequence numbers are per ego
  EXPECT_NO_THROW(g.apply_update(rec(1, b, a, "x", UpdateOp::create, 0.2)));
}

TEST(Multigraph, OneWeightPerLabel) {
  SocialMultiGraph g;
  g.insert_edge(a, b, "LinkedIn", 0.4);
  g.insert_edge(a, b, "Facebook", 0.7);
  const auto ls = g.labels_between(a, b, {});
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0], (std::pair<std::string, double>{"Facebook", 0.7}));
  EXPECT_EQ(ls[1], (std::pair<std::string, double>{"LinkedIn", 0.4}));
  EXPECT_EQ(g.neighbors(*g.find(a)).size(), 1u);
}

TEST(Aging, NoIdleWeeksIsIdentity) {
  SocialMultiGraph g;
  g.insert_edge(a, b, "x", 0.5);
  EXPECT_DOUBLE_EQ(*g.weight(a, b, "x", kSimEpoch + kOneWeek - SimDuration{1}), 0.5);
}

TEST(Aging, TwoIdleWeeks) {
  SocialMultiGraph g;
  g.insert_edge(a, b, "x", 0.5);
  const SimTime now = kSimEpoch + 2 * kOneWeek;
  EXPECT_NEAR(*g.weight(a, b, "x", now), 0.405, 1e-12);
  g.age_edges(now);
  EXPECT_NEAR(*g.weight(a, b, "x", now), 0.405, 1e-12);
  g.age_edges(now);  // idempotent for a fixed instant
  EXPECT_NEAR(*g.weight(a, b, "x", now), 0.405, 1e-12);
}

TEST(Aging, PerUserDecrement) {
  SocialMultiGraph g;
  g.insert_edge(a, b, "x", 1.0);
  g.attributes(*g.find(a)).aging_decrement = 0.05;
  EXPECT_NEAR(*g.weight(a, b, "x", kSimEpoch + kOneWeek), 0.95, 1e-12);
}

TEST(Aging, NeverReachesZero) {
  SocialMultiGraph g;
  g.insert_edge(a, b, "x", 0.01);
  g.attributes(*g.find(a)).aging_decrement = 1.0;
  const SimTime t = kSimEpoch + 5000 * kOneWeek;
  EXPECT_GT(*g.weight(a, b, "x", t), 0.0);
  g.age_edges(t);
  EXPECT_GT(*g.weight(a, b, "x", t), 0.0);
}

// Applying an update at `now` and aging to `now` commute.
TEST(Aging, CommutesWithUpdateAtSameInstant) {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    SocialMultiGraph g1;
    g1.insert_edge(a, b, "x", rng.uniform(0.0, 1.0));
    SocialMultiGraph g2 = g1;
    const SimTime now = kSimEpoch + SimDuration{static_cast<std::int64_t>(rng.below(10 * kOneWeek.count()))};
    const auto r = rec(1, a, b, "x", UpdateOp::adjust_weight, rng.uniform(-0.2, 0.2), now);
    g1.apply_update(r);
    g1.age_edges(now);
    g2.age_edges(now);
    g2.apply_update(r);
    EXPECT_NEAR(*g1.weight(a, b, "x", now), *g2.weight(a, b, "x", now), 1e-12);
  }
}

// Random update logs: weights stay in [0,1] and replay is deterministic.
TEST(Multigraph, RandomLogsKeepWeightsInRangeAndReplayExactly) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Rng rng(seed);
    std::vector<EdgeUpdateRecord> log;
    std::map<Uid, std::uint64_t> seq;
    SimTime t{};
    for (int i = 0; i < 300; ++i) {
      const Uid ego = Uid::from_u64(1 + rng.below(6));
      const Uid alter = Uid::from_u64(1 + rng.below(6));
      const auto op = static_cast<UpdateOp>(rng.below(4));
      t += SimDuration{static_cast<std::int64_t>(rng.below(3 * kOneWeek.count() / 2))};
      log.push_back(rec(++seq[ego], ego, alter, rng.bernoulli(0.5) ? "p" : "q", op, rng.uniform(-0.5, 1.5), t));
    }
    SocialMultiGraph g1, g2;
    for (const auto& r : log) {
      g1.apply_update(r);
      for (const auto& edge : g1.edges()) {
        const double w = *g1.weight(edge.ego, edge.alter, edge.label, t);
        ASSERT_GE(w, 0.0);
        ASSERT_LE(w, 1.0);
      }
    }
    for (const auto& r : log) g2.apply_update(r);
    EXPECT_TRUE(same_content(g1, g2));
  }
}

SocialMultiGraph fig_peer_graph() {
  // a, b, c trust the peer; d and e are only socially connected to them
  SocialMultiGraph g;
  g.insert_edge(a, b, "f", 0.5);
  g.insert_edge(b, c, "f", 0.5);
  g.insert_edge(c, d, "f", 0.5);
  g.insert_edge(a, e, "f", 0.5);
  g.insert_edge(d, e, "f", 0.5);
  return g;
}

TEST(Snapshot, AllUsersIsIdentity) {
  const auto g = fig_peer_graph();
  const auto users = g.vertex_uids();
  EXPECT_TRUE(same_content(g.snapshot_subgraph(users), g));
}

TEST(Snapshot, InducedStar) {
  SocialMultiGraph g;
  g.insert_edge(a, b, "f", 0.5);
  g.insert_edge(a, c, "f", 0.5);
  g.insert_edge(b, c, "f", 0.5);
  const std::vector<Uid> users{a};
  const auto s = g.snapshot_subgraph(users);
  EXPECT_EQ(s.vertex_uids(), (std::vector<Uid>{a, b, c}));
  EXPECT_EQ(s.num_edges(), 2u);
  EXPECT_FALSE(s.weight(b, c, "f", {}).has_value());
}

TEST(Snapshot, BoundaryUsersIncluded) {
  const auto g = fig_peer_graph();
  const std::vector<Uid> trusted{a, b, c};
  const auto s = g.snapshot_subgraph(trusted);
  EXPECT_EQ(s.vertex_uids(), (std::vector<Uid>{a, b, c, d, e}));
  EXPECT_FALSE(s.weight(d, e, "f", {}).has_value());
  EXPECT_TRUE(s.weight(c, d, "f", {}).has_value());
  const std::vector<Uid> unknown{Uid::from_u64(99)};
  EXPECT_THROW(g.snapshot_subgraph(unknown), UnknownUser);
}

TEST(EdgeListIo, RoundTrip) {
  auto g = community_social_graph(CommunityGraphParams{.users = 120}, 4);
  g.insert_edge(a, Uid::from_u64(0xabcdef), "LinkedIn", 0.25, at_seconds(30));
  std::stringstream ss;
  write_edge_list(ss, g);
  const auto back = read_edge_list(ss);
  EXPECT_EQ(back.edges(), g.edges());
}

TEST(EdgeListIo, CommentsHexAndErrors) {
  std::istringstream in("# header\n0x1 2 Facebook 0.5\n2 0X1 Facebook 0.25 60 # trailing\n\n");
  const auto g = read_edge_list(in);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_DOUBLE_EQ(*g.weight(a, b, "Facebook", {}), 0.5);
  std::istringstream bad("1 2 Facebook\n");
  EXPECT_THROW(read_edge_list(bad), ParseError);
}

TEST(UpdateLogIo, RoundTrip) {
  std::vector<EdgeUpdateRecord> log{rec(1, a, b, "Facebook", UpdateOp::create, 0.1, at_seconds(1)),
                                    rec(2, a, b, "Facebook", UpdateOp::adjust_weight, 0.01, at_seconds(2.5)),
                                    rec(3, a, b, "Facebook", UpdateOp::remove, 0, at_seconds(4))};
  auto loc = rec(4, a, {}, "", UpdateOp::set_location, 0, at_seconds(5));
  loc.location = GeoPoint{48.85, 2.35};
  log.push_back(loc);
  std::stringstream ss;
  write_update_log(ss, log);
  EXPECT_EQ(read_update_log(ss), log);
}

TEST(Components, LargestComponentAndSymmetrize) {
  SocialMultiGraph g;
  g.insert_edge(a, b, "f", 0.3);
  g.insert_edge(c, b, "g", 0.3);
  g.insert_edge(d, e, "f", 0.3);
  std::uint32_t count = 0;
  const auto adj = undirected_view(g);
  connected_components(adj, &count);
  EXPECT_EQ(count, 2u);
  const auto sym = symmetrized_largest_component(g, "tie");
  EXPECT_EQ(sym.vertex_uids(), (std::vector<Uid>{a, b, c}));
  EXPECT_EQ(sym.num_edges(), 4u);
  EXPECT_EQ(*sym.weight(b, c, "tie", {}), 1.0);
}

TEST(Generators, CommunityGraphIsSymmetricAndDeterministic) {
  const CommunityGraphParams p{.users = 300};
  const auto g = community_social_graph(p, 8);
  EXPECT_TRUE(same_content(g, community_social_graph(p, 8)));
  EXPECT_EQ(g.num_vertices(), 300u);
  for (const auto& edge : g.edges()) ASSERT_TRUE(g.weight(edge.alter, edge.ego, edge.label, {}).has_value());
  const double mean_degree = static_cast<double>(g.num_edges()) / 300.0;
  EXPECT_GT(mean_degree, 0.75 * p.avg_degree);
  EXPECT_LE(mean_degree, p.avg_degree);
}

TEST(Generators, SparseGraphMatchesRequestedSize) {
  const SparseGraphParams p{.users = 2000, .edges = 7400};
  const auto g = sparse_p2p_graph(p, 2);
  EXPECT_EQ(g.num_vertices(), 2000u);
  EXPECT_EQ(undirected_view(g).num_edges(), 7400u);
  EXPECT_EQ(largest_component(undirected_view(g)).size(), 2000u);
}

}  // namespace
}  // namespace sks::graph
