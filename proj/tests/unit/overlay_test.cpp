#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "sks/core/errors.hpp"
#include "sks/core/rng.hpp"
#include "sks/inference/distributed.hpp"
#include "sks/overlay/network.hpp"
#include "support/world.hpp"

namespace sks::overlay {
namespace {

const Uid alice = Uid::from_u64(0xa1), bob = Uid::from_u64(0xb0);

PeerId pid(std::uint64_t i) { return PeerId::from_u64(0x1000 + i); }

std::unique_ptr<Network> small_net(std::size_t peers, std::uint64_t seed = 3) {
  auto net = std::make_unique<Network>(testing::quiet_config(seed));
  for (std::size_t i = 0; i < peers; ++i) net->add_peer(pid(i), Uid::from_u64(0x500 + i));
  graph::SocialMultiGraph g;
  g.insert_edge(alice, bob, "f", 0.5);
  g.insert_edge(bob, alice, "f", 0.5);
  net->load_graph(g);
  return net;
}

TEST(Registry, RoundTripRejoinAndMissing) {
  auto net = small_net(3);
  net->register_user(alice, {pid(0), pid(1)});
  const auto before = *net->lookup(alice);
  EXPECT_EQ(before.peers, (std::vector<PeerId>{pid(0), pid(1)}));
  EXPECT_EQ(before.endpoints[1], net->peer(pid(1)).address);
  EXPECT_THROW(net->register_user(alice, {pid(2)}), Error);
  EXPECT_FALSE(net->lookup(bob).has_value());

  net->set_online(pid(1), false);
  net->set_online(pid(1), true);
  const auto after = *net->lookup(alice);
  EXPECT_NE(after.endpoints[1], before.endpoints[1]);
  EXPECT_EQ(after.endpoints[1], net->peer(pid(1)).address);
  EXPECT_EQ(after.endpoints[0], before.endpoints[0]);
  EXPECT_NE(after.integrity_tag, before.integrity_tag);
}

TEST(Handshake, ChargesInviteAcceptKeysSubscribe) {
  auto net = small_net(4);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto sent = net->stats().sent;
    EXPECT_EQ(net->handshake_add_trusted(alice, pid(i)), HandshakeOutcome::joined);
    EXPECT_EQ(net->stats().sent - sent, 4u);
    EXPECT_EQ(net->group(alice)->members.size(), i + 1);
    EXPECT_TRUE(net->serves(pid(i), alice));
  }
  EXPECT_EQ(net->stats().by_kind.at(MsgKind::invite), 3u);
  EXPECT_EQ(net->stats().by_kind.at(MsgKind::subscribe), 3u);
  EXPECT_EQ(net->group(alice)->handle, "Trusted_Peer_Group" + alice.to_string());
}

TEST(Handshake, OfflineDeclinedAndRepeated) {
  auto net = small_net(4);
  net->handshake_add_trusted(alice, pid(0));
  const auto sent = net->stats().sent;
  EXPECT_EQ(net->handshake_add_trusted(alice, pid(0)), HandshakeOutcome::already_member);
  EXPECT_EQ(net->stats().sent, sent);
  net->set_online(pid(1), false);
  EXPECT_EQ(net->handshake_add_trusted(alice, pid(1)), HandshakeOutcome::offline);
  net->peer(pid(2)).accepts_invites = false;
  EXPECT_EQ(net->handshake_add_trusted(alice, pid(2)), HandshakeOutcome::declined);
  EXPECT_EQ(net->group(alice)->members, (std::vector<PeerId>{pid(0)}));
}

TEST(Removal, RotatesKeysAndChargesUnicastsPlusMulticast) {
  for (auto who : {Initiator::owner, Initiator::peer}) {
    auto net = small_net(5);
    for (std::size_t i = 0; i < 4; ++i) net->handshake_add_trusted(alice, pid(i));
    const auto epoch = net->group(alice)->key_epoch;
    const auto sent = net->stats().sent;
    EXPECT_TRUE(net->remove_trusted(alice, pid(2), who));
    EXPECT_EQ(net->stats().sent - sent, 3u + 1u);  // three remaining members
    EXPECT_EQ(net->group(alice)->key_epoch, epoch + 1);
    EXPECT_FALSE(net->serves(pid(2), alice));
    EXPECT_TRUE(net->serves(pid(0), alice));
    EXPECT_FALSE(net->remove_trusted(alice, pid(2), who));
    EXPECT_EQ(net->group(alice)->members, (std::vector<PeerId>{pid(0), pid(1), pid(3)}));
  }
}

TEST(Removal, GroupOfThree) {
  auto net = small_net(3);
  for (std::size_t i = 0; i < 3; ++i) net->handshake_add_trusted(alice, pid(i));
  const auto sent = net->stats().sent;
  net->remove_trusted(alice, pid(0), Initiator::owner);
  EXPECT_EQ(net->stats().by_kind.at(MsgKind::key_update), 2u);
  EXPECT_EQ(net->stats().by_kind.at(MsgKind::removal_notice), 1u);
  EXPECT_EQ(net->stats().sent - sent, 3u);
}

TEST(Tpl, ColdResolveThenCacheHit) {
  auto net = small_net(6);
  for (std::size_t i = 0; i < 3; ++i) net->handshake_add_trusted(alice, pid(i));
  const auto sent = net->stats().sent;
  const auto tpl = net->resolve_tpl_now(pid(5), alice, true);
  EXPECT_EQ(net->stats().sent - sent, net->dht_hops() + 3u);
  ASSERT_EQ(tpl.entries.size(), 3u);
  for (std::size_t i = 1; i < tpl.entries.size(); ++i) EXPECT_LE(tpl.entries[i - 1].latency, tpl.entries[i].latency);

  const auto again = net->resolve_tpl_now(pid(5), alice, true);
  EXPECT_EQ(net->stats().sent - sent, net->dht_hops() + 3u);
  ASSERT_EQ(again.entries.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(again.entries[i].peer, tpl.entries[i].peer);
}

TEST(Tpl, OnlyOnlineMembersAnswer) {
  auto net = small_net(6);
  for (std::size_t i = 0; i < 3; ++i) net->handshake_add_trusted(alice, pid(i));
  net->set_online(pid(1), false);
  const auto sent = net->stats().sent;
  EXPECT_EQ(net->resolve_tpl_now(pid(5), alice, false).entries.size(), 2u);
  EXPECT_EQ(net->stats().sent - sent, net->dht_hops() + 2u);
  net->set_online(pid(0), false);
  net->set_online(pid(2), false);
  EXPECT_TRUE(net->resolve_tpl_now(pid(5), alice, false).entries.empty());
}

TEST(Tpl, RemovalInvalidatesCachedEntries) {
  auto net = small_net(6);
  for (std::size_t i = 0; i < 3; ++i) net->handshake_add_trusted(alice, pid(i));
  net->resolve_tpl_now(pid(5), alice, true);
  ASSERT_NE(net->cached_tpl(pid(5), alice), nullptr);
  net->remove_trusted(alice, pid(1), Initiator::owner);
  EXPECT_EQ(net->cached_tpl(pid(5), alice), nullptr);
}

TEST(DhtHops, LogBase16) {
  EXPECT_EQ(dht_lookup_hops(1, 16), 1u);
  EXPECT_EQ(dht_lookup_hops(16, 16), 1u);
  EXPECT_EQ(dht_lookup_hops(17, 16), 2u);
  EXPECT_EQ(dht_lookup_hops(256, 16), 2u);
  EXPECT_EQ(dht_lookup_hops(257, 16), 3u);
}

testing::World two_user_world() {
  graph::SocialMultiGraph g;
  g.insert_edge(alice, bob, "f", 0.5);
  g.insert_edge(bob, alice, "f", 0.5);
  mapping::MappingPlan plan;
  plan.peers = {pid(0), pid(1), pid(2), pid(3)};
  plan.assignment[alice] = {pid(0), pid(1)};
  plan.assignment[bob] = {pid(2)};
  return testing::make_world(std::move(g), std::move(plan), testing::quiet_config(5));
}

inference::InferenceParams one_hop(Uid ego) {
  inference::InferenceParams p;
  p.kind = inference::InferenceKind::neighborhood;
  p.ego = ego;
  p.radius = 1;
  return p;
}

TEST(Availability, NoOnlineTrustedPeerMeansServiceUnavailable) {
  auto w = two_user_world();
  inference::DistributedExecutor ex(*w.net);
  EXPECT_EQ(ex.execute(one_hop(alice), pid(3)).outcome, inference::Outcome::ok);
  w.net->set_online(pid(0), false);
  EXPECT_EQ(ex.execute(one_hop(alice), pid(3)).outcome, inference::Outcome::ok);
  w.net->set_online(pid(1), false);
  EXPECT_EQ(ex.execute(one_hop(alice), pid(3)).outcome, inference::Outcome::service_unavailable);
  w.net->set_online(pid(1), true);
  const auto back = ex.execute(one_hop(alice), pid(3));
  EXPECT_EQ(back.outcome, inference::Outcome::ok);
  EXPECT_EQ(back.completion, 1.0);
}

TEST(Availability, RemovingEveryMemberMakesUserUnavailable) {
  auto w = two_user_world();
  inference::DistributedExecutor ex(*w.net);
  w.net->remove_trusted(alice, pid(0), Initiator::owner);
  w.net->remove_trusted(alice, pid(1), Initiator::peer);
  EXPECT_TRUE(w.net->group(alice)->members.empty());
  EXPECT_EQ(ex.execute(one_hop(alice), pid(3)).outcome, inference::Outcome::service_unavailable);
  EXPECT_EQ(w.net->trust_violations(), 0u);
}

graph::EdgeUpdateRecord bump(Uid ego, Uid alter, std::uint64_t seq, SimTime at) {
  graph::EdgeUpdateRecord r;
  r.seq = seq;
  r.ego = ego;
  r.alter = alter;
  r.label = "f";
  r.op = graph::UpdateOp::adjust_weight;
  r.value = 0.01;
  r.issued_at = at;
  return r;
}

TEST(Polling, AppliesExactlyTheNewRecords) {
  auto w = two_user_world();
  for (std::uint64_t s = 1; s <= 5; ++s) w.net->append_record(bump(alice, bob, s, w.net->now()));
  EXPECT_EQ(w.net->poll(pid(0)), 5u);
  EXPECT_EQ(w.net->peer(pid(0)).data.last_seq(alice), 5u);
  EXPECT_EQ(w.net->poll(pid(0)), 0u);
  EXPECT_NEAR(*w.net->peer(pid(0)).data.weight(alice, bob, "f", w.net->now()), 0.55, 1e-12);
  // bob's peer holds a stale copy of alice until alice's records reach it; it does not serve alice
  EXPECT_EQ(w.net->poll(pid(2)), 0u);
}

// Members poll with different phases; a member never lags the log by more
// than the records appended during the last poll period.
TEST(Polling, StalenessBoundedByOnePeriod) {
  auto w = two_user_world();
  auto& net = *w.net;
  const auto period = net.config().poll_period;
  std::vector<SimTime> issued;
  Rng rng(12);
  SimTime t = net.now();
  for (std::uint64_t s = 1; s <= 60; ++s) {
    t += from_seconds(rng.exponential(1.5));
    issued.push_back(t);
    net.loop().at(t, [&net, s, t]() { net.append_record(bump(alice, bob, s, t)); });
  }
  net.start_polling(t + 2 * period);
  for (SimTime check = net.now() + from_seconds(0.5); check < t + 2 * period; check += from_seconds(0.7)) {
    net.loop().run_until(check);
    const auto due = static_cast<std::uint64_t>(
        std::count_if(issued.begin(), issued.end(), [&](SimTime at) { return at + period <= check; }));
    for (PeerId p : {pid(0), pid(1)}) ASSERT_GE(net.peer(p).data.last_seq(alice), due);
  }
  net.loop().run();
  EXPECT_TRUE(graph::same_content(net.peer(pid(0)).data.snapshot_subgraph(std::vector<Uid>{alice}),
                                  net.peer(pid(1)).data.snapshot_subgraph(std::vector<Uid>{alice})));
  EXPECT_EQ(net.peer(pid(1)).data.last_seq(alice), 60u);
}

TEST(Latency, WideAreaMeanRoundTrip) {
  const auto m = LatencyModel::wide_area(from_millis(250));
  EXPECT_NEAR(2 * m.mean_one_way_ms(), 250.0, 1e-3);
  double sum = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) sum += to_millis(m.one_way(pid(i % 50), pid(i % 37 + 60), i));
  EXPECT_NEAR(2 * sum / n, 250.0, 12.5);
}

TEST(Latency, KeyedDraws) {
  const auto m = LatencyModel::uniform_delay(from_millis(25), from_millis(225));
  EXPECT_EQ(m.one_way(pid(1), pid(2), 9), m.one_way(pid(1), pid(2), 9));
  for (int i = 0; i < 1000; ++i) {
    const auto d = m.one_way(pid(1), pid(2), i);
    ASSERT_GE(d, from_millis(25));
    ASSERT_LE(d, from_millis(225));
  }
}

TEST(Churn, StationaryOfflineFraction) {
  const ChurnModel churn(0.05, from_seconds(60), 0.5, 8);
  std::size_t off = 0, total = 0;
  for (std::uint64_t p = 0; p < 400; ++p)
    for (int tick = 0; tick < 200; tick += 3, ++total) off += !churn.online(pid(p), at_seconds(60.0 * tick));
  EXPECT_NEAR(static_cast<double>(off) / static_cast<double>(total), 0.05, 0.01);
}

// Every send ends in exactly one delivery or drop, and identical seeds give
// identical traces.
TEST(Network, ConservationAndDeterministicTrace) {
  auto run = [] {
    graph::CommunityGraphParams gp;
    gp.users = 150;
    auto g = graph::community_social_graph(gp, 2);
    auto cfg = testing::quiet_config(2);
    cfg.churn = 0.1;
    cfg.churn_tick = from_seconds(2);
    cfg.trace = true;
    auto plan = mapping::random_mapping(g.vertex_uids(), mapping::synthetic_peers(15, 2), 2, 2);
    auto w = testing::make_world(std::move(g), std::move(plan), cfg);
    inference::DistributedExecutor ex(*w.net);
    const auto users = w.graph.vertex_uids();
    for (std::size_t i = 0; i < 40; ++i) {
      inference::RequestLine r;
      r.id = i + 1;
      r.at = at_seconds(3.0 * static_cast<double>(i));
      r.params = one_hop(users[i % 8]);
      r.params.radius = 1 + i % 3;
      r.params.timeout = from_seconds(2);
      ex.submit(r);
    }
    ex.run();
    return std::make_pair(w.net->stats(), w.net->trace());
  };
  const auto [s1, t1] = run();
  const auto [s2, t2] = run();
  EXPECT_EQ(s1.sent, s1.delivered + s1.dropped);
  EXPECT_GT(s1.dropped, 0u);
  EXPECT_EQ(s1.sent, s2.sent);
  EXPECT_EQ(s1.by_kind, s2.by_kind);
  ASSERT_EQ(t1.size(), t2.size());
  for (std::size_t i = 0; i < t1.size(); ++i) {
    ASSERT_EQ(t1[i].time, t2[i].time);
    ASSERT_EQ(t1[i].event, t2[i].event);
    ASSERT_EQ(t1[i].dst, t2[i].dst);
  }
}

}  // namespace
}  // namespace sks::overlay
