#include "sks/overlay/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "sks/core/errors.hpp"
#include "sks/core/rng.hpp"

namespace sks::overlay {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
  return h;
}

PeerId pseudo_peer(std::uint64_t a, std::uint64_t b) {
  return PeerId{Id128{splitmix64(a ^ 0x6a09e667f3bcc908ULL), splitmix64(b ^ 0xbb67ae8584caa73bULL)}};
}

std::string make_address(PeerId p, std::uint32_t incarnation) {
  return "peer-" + p.to_string() + "#" + std::to_string(incarnation);
}

const std::vector<graph::EdgeUpdateRecord> kNoRecords;

}  // namespace

std::uint32_t dht_lookup_hops(std::size_t peers, double base) {
  if (peers <= 1 || base <= 1.0) return 1;
  const double h = std::ceil(std::log(static_cast<double>(peers)) / std::log(base) - 1e-12);
  return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(h));
}

std::string_view to_string(MsgKind k) {
  switch (k) {
    case MsgKind::dht_lookup: return "dht_lookup";
    case MsgKind::tpl_response: return "tpl_response";
    case MsgKind::forward: return "forward";
    case MsgKind::forward_reply: return "forward_reply";
    case MsgKind::secondary: return "secondary";
    case MsgKind::secondary_reply: return "secondary_reply";
    case MsgKind::invite: return "invite";
    case MsgKind::accept: return "accept";
    case MsgKind::decline: return "decline";
    case MsgKind::keys: return "keys";
    case MsgKind::subscribe: return "subscribe";
    case MsgKind::key_update: return "key_update";
    case MsgKind::removal_notice: return "removal_notice";
    case MsgKind::poll_fetch: return "poll_fetch";
    case MsgKind::poll_reply: return "poll_reply";
  }
  return "?";
}

bool TrustedPeerGroup::contains(PeerId p) const { return std::binary_search(members.begin(), members.end(), p); }

Network::Network(SimConfig cfg)
    : cfg_(std::move(cfg)), churn_(cfg_.churn, cfg_.churn_tick, cfg_.churn_flip_rate, mix_keys({cfg_.seed, 0xc4u})) {
  cfg_.latency.seed = mix_keys({cfg_.seed, cfg_.latency.seed, 0x1a7u});
}

// ---------------------------------------------------------------- peers

void Network::add_peer(PeerId id, Uid owner) {
  if (peers_.contains(id)) throw Error("duplicate peer " + id.to_string());
  PeerNode n;
  n.id = id;
  n.owner = owner;
  n.address = make_address(id, 0);
  peers_.emplace(id, std::move(n));
}

PeerNode& Network::peer(PeerId id) {
  auto it = peers_.find(id);
  if (it == peers_.end()) throw Error("unknown peer " + id.to_string());
  return it->second;
}

const PeerNode& Network::peer(PeerId id) const {
  auto it = peers_.find(id);
  if (it == peers_.end()) throw Error("unknown peer " + id.to_string());
  return it->second;
}

std::vector<PeerId> Network::peer_ids() const {
  std::vector<PeerId> out;
  out.reserve(peers_.size());
  for (const auto& [id, _] : peers_) out.push_back(id);
  return out;
}

bool Network::online_at(PeerId p, SimTime t) const {
  if (auto it = forced_.find(p); it != forced_.end()) return it->second;
  return churn_.online(p, t);
}

void Network::set_online(PeerId p, bool up) {
  auto& node = peer(p);
  forced_[p] = up;
  if (up) {
    node.address = make_address(p, ++node.incarnation);
    refresh_registrations(p);
    drop_peer_from_caches(p, std::nullopt);
  }
}

void Network::refresh_registrations(PeerId p) {
  for (auto& [uid, reg] : registry_) {
    bool touched = false;
    for (std::size_t i = 0; i < reg.peers.size(); ++i) {
      if (reg.peers[i] != p) continue;
      reg.endpoints[i] = peer(p).address;
      touched = true;
    }
    if (!touched) continue;
    std::uint64_t tag = mix_keys({uid.value.hi, uid.value.lo});
    for (const auto& e : reg.endpoints) tag = mix_keys({tag, fnv1a(e)});
    reg.integrity_tag = tag;
  }
}

void Network::drop_peer_from_caches(PeerId p, std::optional<Uid> only_user) {
  for (auto& [id, node] : peers_) {
    for (auto it = node.tpl_cache.begin(); it != node.tpl_cache.end();) {
      const bool relevant = !only_user || it->first == *only_user;
      const bool listed = std::any_of(it->second.entries.begin(), it->second.entries.end(),
                                      [&](const TplEntry& e) { return e.peer == p; });
      if (relevant && listed && !resolving_.contains({id, it->first}))
        it = node.tpl_cache.erase(it);
      else
        ++it;
    }
  }
}

// ---------------------------------------------------------------- registration

void Network::register_user(Uid uid, std::vector<PeerId> contributed) {
  if (registry_.contains(uid)) throw Error("uid " + uid.to_string() + " is already registered");
  Registration reg;
  std::uint64_t tag = mix_keys({uid.value.hi, uid.value.lo});
  for (PeerId p : contributed) {
    reg.endpoints.push_back(peer(p).address);
    tag = mix_keys({tag, fnv1a(reg.endpoints.back())});
  }
  reg.peers = std::move(contributed);
  reg.integrity_tag = tag;
  registry_.emplace(uid, std::move(reg));
}

std::optional<Registration> Network::lookup(Uid uid) const {
  if (auto it = registry_.find(uid); it != registry_.end()) return it->second;
  return std::nullopt;
}

// ---------------------------------------------------------------- data

void Network::load_graph(graph::SocialMultiGraph g) {
  truth_ = std::move(g);
  logs_.clear();
}

void Network::append_record(const graph::EdgeUpdateRecord& rec) {
  truth_.apply_update(rec);
  logs_[rec.ego].push_back(rec);
}

const std::vector<graph::EdgeUpdateRecord>& Network::log(Uid ego) const {
  if (auto it = logs_.find(ego); it != logs_.end()) return it->second;
  return kNoRecords;
}

// ---------------------------------------------------------------- groups

const TrustedPeerGroup* Network::group(Uid user) const {
  if (auto it = groups_.find(user); it != groups_.end()) return &it->second;
  return nullptr;
}

PeerId Network::user_endpoint(Uid user) { return pseudo_peer(user.value.hi, user.value.lo); }

void Network::provision(Uid user, const std::vector<PeerId>& members) {
  truth_.ensure_vertex(user);
  auto& g = groups_[user];
  g.owner = user;
  g.handle = "Trusted_Peer_Group" + user.to_string();
  for (PeerId old : g.members) peer(old).trusted.erase(user);
  g.members = members;
  std::sort(g.members.begin(), g.members.end());
  g.members.erase(std::unique(g.members.begin(), g.members.end()), g.members.end());
  for (PeerId p : g.members) {
    auto& node = peer(p);
    node.trusted[user] = g.key_epoch;
    node.data.import_user(truth_, user);
  }
}

HandshakeOutcome Network::handshake_add_trusted(Uid user, PeerId candidate) {
  auto& node = peer(candidate);
  truth_.ensure_vertex(user);
  auto& g = groups_[user];
  if (g.handle.empty()) {
    g.owner = user;
    g.handle = "Trusted_Peer_Group" + user.to_string();
  }
  if (g.contains(candidate)) return HandshakeOutcome::already_member;
  const PeerId me = user_endpoint(user);
  const SimTime t = now();
  if (!online(candidate)) {
    charge({MsgKind::invite, me, candidate, user}, false, t);
    return HandshakeOutcome::offline;
  }
  charge({MsgKind::invite, me, candidate, user}, true, t);
  if (!node.accepts_invites) {
    charge({MsgKind::decline, candidate, me, user}, true, t);
    return HandshakeOutcome::declined;
  }
  charge({MsgKind::accept, candidate, me, user}, true, t);
  charge({MsgKind::keys, me, candidate, user, 256}, true, t);
  charge({MsgKind::subscribe, candidate, pseudo_peer(fnv1a(g.handle), 0), user}, true, t);
  g.members.insert(std::upper_bound(g.members.begin(), g.members.end(), candidate), candidate);
  node.trusted[user] = g.key_epoch;
  node.data.import_user(truth_, user);
  return HandshakeOutcome::joined;
}

bool Network::remove_trusted(Uid user, PeerId removed, Initiator initiator) {
  auto it = groups_.find(user);
  if (it == groups_.end() || !it->second.contains(removed)) return false;
  auto& g = it->second;
  g.members.erase(std::lower_bound(g.members.begin(), g.members.end(), removed));
  ++g.key_epoch;
  ++g.data_version;
  peer(removed).trusted.erase(user);
  const PeerId owner_end = user_endpoint(user);
  const SimTime t = now();
  for (PeerId m : g.members) {
    const bool up = online(m);
    charge({MsgKind::key_update, owner_end, m, user, 256}, up, t);
    if (up) peer(m).trusted[user] = g.key_epoch;
  }
  const PeerId from = initiator == Initiator::owner ? owner_end : removed;
  charge({MsgKind::removal_notice, from, pseudo_peer(fnv1a(g.handle), 0), user}, true, t);
  drop_peer_from_caches(removed, user);
  return true;
}

bool Network::serves(PeerId p, Uid user) const {
  const auto pit = peers_.find(p);
  if (pit == peers_.end()) return false;
  const auto tit = pit->second.trusted.find(user);
  if (tit == pit->second.trusted.end()) return false;
  const auto* g = group(user);
  return g && tit->second == g->key_epoch && g->contains(p);
}

const graph::SocialMultiGraph& Network::read_replica(PeerId p, Uid user) const {
  if (!serves(p, user)) ++trust_violations_;
  return peer(p).data;
}

// ---------------------------------------------------------------- TPL

const TrustedPeerList* Network::cached_tpl(PeerId requester, Uid target) const {
  const auto& cache = peer(requester).tpl_cache;
  if (auto it = cache.find(target); it != cache.end()) return &it->second;
  return nullptr;
}

void Network::invalidate_tpl(PeerId requester, Uid target) {
  if (resolving_.contains({requester, target})) return;
  peer(requester).tpl_cache.erase(target);
}

void Network::resolve_tpl(PeerId requester, Uid target, bool use_cache, std::uint64_t request, TplCallback done) {
  auto& node = peer(requester);
  const std::pair<PeerId, Uid> key{requester, target};
  if (auto rit = resolving_.find(key); rit != resolving_.end()) {
    if (rit->second.first_arrived)
      loop_.at(now(), std::move(done));
    else
      rit->second.waiters.push_back(std::move(done));
    return;
  }
  if (use_cache && cfg_.tpl_cache) {
    if (auto it = node.tpl_cache.find(target); it != node.tpl_cache.end() && !it->second.entries.empty()) {
      const bool fresh = cfg_.tpl_ttl <= SimDuration::zero() || now() - it->second.fetched_at < cfg_.tpl_ttl;
      if (fresh) {
        loop_.at(now(), std::move(done));
        return;
      }
    }
  }

  // keyed by who asks, for whom, on behalf of which request and when, so one
  // request's draws do not depend on how many lookups came before it
  const std::uint64_t rkey = mix_keys({requester.value.hi, requester.value.lo, target.value.hi, target.value.lo,
                                       request, static_cast<std::uint64_t>(now().time_since_epoch().count())});
  auto& res = resolving_[key];
  res.waiters.push_back(std::move(done));
  node.tpl_cache[target] = TrustedPeerList{target, {}, now()};

  // route the lookup towards the group's rendezvous point
  const SimTime start = now();
  SimTime t = start;
  PeerId hop_from = requester;
  const std::uint32_t hops = dht_hops();
  for (std::uint32_t h = 0; h < hops; ++h) {
    const PeerId hop_to = pseudo_peer(rkey, h);
    t += cfg_.latency.one_way(hop_from, hop_to, mix_keys({rkey, h})) + cfg_.latency.routing_overhead(mix_keys({rkey, h}));
    charge({MsgKind::dht_lookup, hop_from, hop_to, target, 64, request}, true, t);
    hop_from = hop_to;
  }
  const PeerId root = hop_from;

  std::vector<std::pair<SimTime, PeerId>> responses;
  if (const auto* g = group(target)) {
    for (PeerId m : g->members) {
      const SimTime reached = t + cfg_.latency.one_way(root, m, mix_keys({rkey, 0x6d63u}));
      if (!online_at(m, reached)) continue;
      responses.emplace_back(reached + cfg_.latency.one_way(m, requester, mix_keys({rkey, 0x7273u})), m);
    }
  }
  std::sort(responses.begin(), responses.end());

  auto finish_waiters = [this, key]() {
    auto it = resolving_.find(key);
    if (it == resolving_.end()) return;
    auto waiters = std::move(it->second.waiters);
    it->second.waiters.clear();
    it->second.first_arrived = true;
    for (auto& w : waiters) w();
  };

  if (responses.empty()) {
    loop_.at(t + cfg_.connect_timeout, [this, key, finish_waiters]() {
      finish_waiters();
      resolving_.erase(key);
      peer(key.first).tpl_cache.erase(key.second);
    });
    return;
  }
  const std::size_t total = responses.size();
  for (std::size_t i = 0; i < total; ++i) {
    const auto [arrival, member] = responses[i];
    const bool last = i + 1 == total;
    loop_.at(arrival, [this, key, member, arrival, start, last, request, finish_waiters]() {
      charge({MsgKind::tpl_response, member, key.first, key.second, 64, request, 0, true}, true, arrival);
      auto& list = peer(key.first).tpl_cache[key.second];
      list.owner = key.second;
      list.fetched_at = arrival;
      list.entries.push_back(TplEntry{member, arrival - start});
      finish_waiters();
      if (last) resolving_.erase(key);
    });
  }
}

TrustedPeerList Network::resolve_tpl_now(PeerId requester, Uid target, bool use_cache) {
  bool done = false;
  resolve_tpl(requester, target, use_cache, 0, [&done]() { done = true; });
  while (!done && loop_.step()) {
  }
  // let the remaining responses land
  while (resolving_.contains({requester, target}) && loop_.step()) {
  }
  if (const auto* l = cached_tpl(requester, target)) return *l;
  return TrustedPeerList{target, {}, now()};
}

// ---------------------------------------------------------------- polling

std::size_t Network::poll(PeerId p) {
  if (!online(p)) return 0;
  auto& node = peer(p);
  const PeerId store = pseudo_peer(p.value.hi ^ 0x706f6c6cULL, p.value.lo);
  charge({MsgKind::poll_fetch, p, store, Uid{}}, true, now());
  charge({MsgKind::poll_reply, store, p, Uid{}, 64, 0, 0, true}, true, now());
  std::size_t applied = 0;
  for (auto& [user, epoch] : node.trusted) {
    const auto* g = group(user);
    if (!g || !g->contains(p)) continue;
    epoch = g->key_epoch;  // a returning member picks up rotated keys
    const auto& records = log(user);
    const std::uint64_t have = node.data.last_seq(user);
    auto it = std::upper_bound(records.begin(), records.end(), have,
                               [](std::uint64_t s, const graph::EdgeUpdateRecord& r) { return s < r.seq; });
    for (; it != records.end(); ++it) {
      node.data.apply_update(*it);
      ++applied;
    }
  }
  return applied;
}

void Network::poll_loop(PeerId p, SimTime until) {
  if (now() > until) return;
  poll(p);
  const SimTime next = now() + cfg_.poll_period;
  if (next <= until) loop_.at(next, [this, p, until]() { poll_loop(p, until); });
}

void Network::start_polling(SimTime until) {
  if (cfg_.poll_period <= SimDuration::zero()) return;
  for (const auto& [id, _] : peers_) {
    const double phase = keyed_uniform({cfg_.seed, id.value.hi, id.value.lo, 0x7068u});
    const SimTime first = now() + SimDuration{static_cast<std::int64_t>(phase * cfg_.poll_period.count())};
    const PeerId p = id;
    if (first <= until) loop_.at(first, [this, p, until]() { poll_loop(p, until); });
  }
}

void Network::sync_all() {
  for (const auto& [id, _] : peers_) poll(id);
}

// ---------------------------------------------------------------- messages

void Network::record(const Send& m, const char* event, SimTime at) {
  if (!cfg_.trace) return;
  trace_.push_back(TraceRow{at, std::string(event) + ":" + std::string(to_string(m.kind)), m.from, m.to, m.user,
                            m.bytes});
}

void Network::charge(const Send& m, bool delivered, SimTime at) {
  ++stats_.sent;
  ++stats_.by_kind[m.kind];
  if (m.request) ++per_request_[m.request];
  record(m, "send", now());
  if (delivered) {
    ++stats_.delivered;
    record(m, "deliver", at);
  } else {
    ++stats_.dropped;
    record(m, "drop", at);
  }
}

void Network::send(const Send& m, std::function<void()> on_delivery, std::function<void()> on_fail) {
  ++stats_.sent;
  ++stats_.by_kind[m.kind];
  if (m.request) ++per_request_[m.request];
  record(m, "send", now());
  const SimTime sent_at = now();
  const SimTime arrival = sent_at + cfg_.latency.one_way(m.from, m.to, m.key);
  loop_.at(arrival, [this, m, arrival, sent_at, on_delivery = std::move(on_delivery),
                     on_fail = std::move(on_fail)]() mutable {
    if (m.reliable || online_at(m.to, arrival)) {
      ++stats_.delivered;
      record(m, "deliver", arrival);
      if (on_delivery) on_delivery();
      return;
    }
    ++stats_.dropped;
    record(m, "drop", arrival);
    if (on_fail) loop_.at(std::max(arrival, add_saturating(sent_at, cfg_.connect_timeout)), std::move(on_fail));
  });
}

std::uint64_t Network::request_messages(std::uint64_t request) const {
  if (auto it = per_request_.find(request); it != per_request_.end()) return it->second;
  return 0;
}

void Network::write_trace_csv(std::ostream& out) const {
  out << "time_s,event_kind,src_peer,dst_peer,user,bytes_estimate\n";
  char buf[32];
  for (const auto& r : trace_) {
    std::snprintf(buf, sizeof buf, "%.6f", to_seconds(r.time.time_since_epoch()));
    out << buf << ',' << r.event << ',' << r.src.to_string() << ',' << r.dst.to_string() << ','
        << r.user.to_string() << ',' << r.bytes << '\n';
  }
}

}  // namespace sks::overlay
