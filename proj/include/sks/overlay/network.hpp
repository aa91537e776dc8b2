#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sks/acp/policy.hpp"
#include "sks/graph/multigraph.hpp"
#include "sks/overlay/churn.hpp"
#include "sks/overlay/event_loop.hpp"
#include "sks/overlay/latency.hpp"

namespace sks::overlay {

struct SimConfig {
  std::uint64_t seed = 1;
  LatencyModel latency;
  double churn = 0.0;  // stationary offline fraction
  SimDuration churn_tick{60'000'000};
  double churn_flip_rate = 0.5;
  SimDuration poll_period{10'000'000};
  double dht_hop_base = 16.0;
  /// How long a sender waits before treating an unanswered connection as failed.
  SimDuration connect_timeout{1'000'000};
  bool tpl_cache = true;
  SimDuration tpl_ttl{0};  // zero: entries never expire
  bool trace = false;
};

/// ceil(log_base(peers)), at least 1.
std::uint32_t dht_lookup_hops(std::size_t peers, double base);

enum class MsgKind {
  dht_lookup,
  tpl_response,
  forward,
  forward_reply,
  secondary,
  secondary_reply,
  invite,
  accept,
  decline,
  keys,
  subscribe,
  key_update,
  removal_notice,
  poll_fetch,
  poll_reply,
};
std::string_view to_string(MsgKind k);

struct MessageStats {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::map<MsgKind, std::uint64_t> by_kind;
};

struct TraceRow {
  SimTime time;
  std::string event;  // "send", "deliver" or "drop" followed by the kind
  PeerId src;
  PeerId dst;
  Uid user;
  std::size_t bytes = 0;
};

struct TplEntry {
  PeerId peer;
  SimDuration latency{0};
};

/// Online trusted peers of a user, fastest responder first.
struct TrustedPeerList {
  Uid owner;
  std::vector<TplEntry> entries;
  SimTime fetched_at{};
};

struct TrustedPeerGroup {
  Uid owner;
  std::string handle;
  std::vector<PeerId> members;  // sorted
  std::uint64_t key_epoch = 0;
  std::uint64_t data_version = 0;

  bool contains(PeerId p) const;
};

struct Registration {
  std::vector<PeerId> peers;
  std::vector<std::string> endpoints;
  std::uint64_t integrity_tag = 0;  // stands in for the signed envelope
};

struct PeerNode {
  PeerId id;
  Uid owner;
  std::string address;
  std::uint32_t incarnation = 0;
  bool accepts_invites = true;
  /// Trusted users and the key epoch this peer holds for each.
  std::map<Uid, std::uint64_t> trusted;
  graph::SocialMultiGraph data;
  std::unordered_map<Uid, TrustedPeerList> tpl_cache;
};

enum class HandshakeOutcome { joined, already_member, declined, offline };
enum class Initiator { owner, peer };

/// Simulated peer network. All state changes happen on the event loop's
/// clock; management operations run synchronously at the current instant.
class Network {
 public:
  explicit Network(SimConfig cfg);
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  const SimConfig& config() const { return cfg_; }
  EventLoop& loop() { return loop_; }
  SimTime now() const { return loop_.now(); }

  // ---- peers
  void add_peer(PeerId id, Uid owner);
  bool has_peer(PeerId id) const { return peers_.contains(id); }
  PeerNode& peer(PeerId id);
  const PeerNode& peer(PeerId id) const;
  std::vector<PeerId> peer_ids() const;
  std::size_t num_peers() const { return peers_.size(); }
  std::uint32_t dht_hops() const { return dht_lookup_hops(peers_.size(), cfg_.dht_hop_base); }

  bool online(PeerId p) const { return online_at(p, now()); }
  bool online_at(PeerId p, SimTime t) const;
  /// Pins a peer on- or offline, overriding churn. Coming back online gives
  /// the peer a fresh address, refreshes its DHT registrations and
  /// invalidates TPL entries that point at it.
  void set_online(PeerId p, bool up);
  void clear_override(PeerId p) { forced_.erase(p); }

  // ---- DHT registration of user -> contributed peers
  void register_user(Uid uid, std::vector<PeerId> contributed);
  std::optional<Registration> lookup(Uid uid) const;

  // ---- authoritative social data (the append-only per-user files)
  void load_graph(graph::SocialMultiGraph g);
  const graph::SocialMultiGraph& authoritative() const { return truth_; }
  /// Appends one record to its ego's file. Throws ReplayGap on a bad seq.
  void append_record(const graph::EdgeUpdateRecord& rec);
  /// Next sequence number for `ego`'s file.
  std::uint64_t next_seq(Uid ego) const { return truth_.last_seq(ego) + 1; }
  const std::vector<graph::EdgeUpdateRecord>& log(Uid ego) const;

  // ---- policies, replicated to trusted peers instantly
  void set_policy(const acp::AccessPolicy& p) { policies_[p.owner] = p; }
  void clear_policy(Uid u) { policies_.erase(u); }
  const std::unordered_map<Uid, acp::AccessPolicy>& policies() const { return policies_; }

  // ---- trusted peer groups
  const TrustedPeerGroup* group(Uid user) const;
  /// Installs membership and current data without protocol traffic.
  void provision(Uid user, const std::vector<PeerId>& members);
  /// invite, accept, keys, then subscribe.
  HandshakeOutcome handshake_add_trusted(Uid user, PeerId candidate);
  /// Rotates the group key: unicast to each remaining member plus one
  /// removal multicast. Returns false if `peer` was not a member.
  bool remove_trusted(Uid user, PeerId peer, Initiator initiator);
  /// Member holding the current key epoch and the user's data.
  bool serves(PeerId p, Uid user) const;
  /// Stand-in endpoint for the user's own device.
  static PeerId user_endpoint(Uid user);

  // ---- trusted peer list discovery
  using TplCallback = std::function<void()>;
  /// Resolves `target`'s TPL at `requester`. `done` runs once the list has
  /// its first entry (or once resolution has failed); later responses keep
  /// filling the cached list. Messages are attributed to `request`.
  void resolve_tpl(PeerId requester, Uid target, bool use_cache, std::uint64_t request, TplCallback done);
  /// Current list at `requester`, possibly still filling; nullptr if none.
  const TrustedPeerList* cached_tpl(PeerId requester, Uid target) const;
  void invalidate_tpl(PeerId requester, Uid target);
  /// Runs the loop until a resolution completes; for tools and tests.
  TrustedPeerList resolve_tpl_now(PeerId requester, Uid target, bool use_cache);

  // ---- replication by polling
  /// Schedules periodic polls for every peer until `until`.
  void start_polling(SimTime until);
  /// One poll: fetches and applies new records for every trusted user.
  /// Returns the number of records applied.
  std::size_t poll(PeerId p);
  /// Brings every online member fully up to date at once.
  void sync_all();

  // ---- messages
  struct Send {
    MsgKind kind;
    PeerId from;
    PeerId to;
    Uid user;
    std::size_t bytes = 64;
    std::uint64_t request = 0;
    std::uint64_t key = 0;  // message identity for latency draws
    bool reliable = false;  // replies and responses are not subject to churn
  };
  /// Delivers after the model latency, or drops if the receiver is offline
  /// on arrival; `on_fail` then runs once the sender gives up waiting.
  void send(const Send& m, std::function<void()> on_delivery, std::function<void()> on_fail = {});
  /// Accounting only, for messages whose timing does not matter.
  void charge(const Send& m, bool delivered, SimTime at);

  const MessageStats& stats() const { return stats_; }
  std::uint64_t request_messages(std::uint64_t request) const;
  void forget_request(std::uint64_t request) { per_request_.erase(request); }
  const std::vector<TraceRow>& trace() const { return trace_; }
  void write_trace_csv(std::ostream& out) const;

  /// Reads of user data on peers that could not decrypt it; must stay zero.
  std::uint64_t trust_violations() const { return trust_violations_; }
  /// Replica graph of a peer, for reading a user it serves.
  const graph::SocialMultiGraph& read_replica(PeerId p, Uid user) const;

 private:
  struct Resolution {
    std::vector<TplCallback> waiters;
    bool first_arrived = false;
  };

  void poll_loop(PeerId p, SimTime until);
  void refresh_registrations(PeerId p);
  void drop_peer_from_caches(PeerId p, std::optional<Uid> only_user);
  void record(const Send& m, const char* event, SimTime at);

  SimConfig cfg_;
  EventLoop loop_;
  ChurnModel churn_;
  std::map<PeerId, PeerNode> peers_;
  std::unordered_map<PeerId, bool> forced_;
  std::map<Uid, Registration> registry_;
  graph::SocialMultiGraph truth_;
  std::unordered_map<Uid, std::vector<graph::EdgeUpdateRecord>> logs_;
  std::unordered_map<Uid, acp::AccessPolicy> policies_;
  std::map<Uid, TrustedPeerGroup> groups_;
  std::map<std::pair<PeerId, Uid>, Resolution> resolving_;
  MessageStats stats_;
  std::unordered_map<std::uint64_t, std::uint64_t> per_request_;
  std::vector<TraceRow> trace_;
  mutable std::uint64_t trust_violations_ = 0;
};

}  // namespace sks::overlay
