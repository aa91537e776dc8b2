#include "sks/inference/distributed.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "sks/core/errors.hpp"
#include "sks/core/rng.hpp"
#include "sks/inference/centralized.hpp"

namespace sks::inference {

using overlay::MsgKind;

namespace {

constexpr SimTime kNever{SimDuration::max()};

std::uint64_t message_key(std::uint64_t request, std::uint64_t item, std::uint64_t tag) {
  return mix_keys({request, item, tag});
}

}  // namespace

struct DistributedExecutor::Seed {
  Uid uid;
  std::uint32_t depth = 0;
  std::vector<Uid> chain;  // users from ego up to the one that led here
};

struct DistributedExecutor::Payload {
  std::map<Uid, std::uint32_t> found;
  std::map<Uid, double> near;
  std::map<Uid, double> to_alter;  // nw(j, alter) per intermediate j
  bool partial = false;

  void merge(const Payload& o) {
    for (const auto& [u, d] : o.found) {
      auto [it, fresh] = found.emplace(u, d);
      if (!fresh) it->second = std::min(it->second, d);
    }
    near.insert(o.near.begin(), o.near.end());
    to_alter.insert(o.to_alter.begin(), o.to_alter.end());
    partial = partial || o.partial;
  }

  std::size_t bytes() const { return 64 + 24 * (found.size() + near.size() + to_alter.size()); }
};

struct DistributedExecutor::Task {
  std::uint64_t id = 0;
  PeerId peer;
  std::uint32_t hop = 0;
  std::uint64_t parent_slot = 0;  // 0 for the source task
  Payload acc;
  std::uint32_t pending = 0;
  bool local_done = false;
  bool replied = false;
  std::vector<Seed> remote;
};

struct DistributedExecutor::Slot {
  std::uint64_t id = 0;
  std::uint64_t task = 0;
  PeerId target;
  std::vector<Seed> users;
  SimTime deadline{};
  bool settled = false;
};

struct DistributedExecutor::Batch {
  std::vector<Seed> seeds;
  std::optional<SimTime> deadline;
  std::size_t waiting = 0;
};

struct DistributedExecutor::Req {
  RequestRecord rec;
  AccessGate gate;
  SimTime t0{};
  std::uint32_t levels = 1;

  InferenceResult oracle;
  std::vector<StrengthPath> oracle_paths;

  std::set<PeerId> tried_entries;
  bool fresh_entry = false;
  std::uint64_t entry_attempts = 0;

  PeerId p0;
  std::uint64_t root_task = 0;
  acp::Verdict root_verdict;
  std::optional<GeoPoint> ego_location;
  std::map<Uid, double> nw_i;
  ResultValue local_value;

  std::map<std::uint64_t, Task> tasks;
  std::map<std::uint64_t, Slot> slots;
  std::map<std::pair<PeerId, Uid>, std::uint32_t> expanded;
  std::map<std::pair<PeerId, Uid>, std::uint32_t> sent;
  std::map<std::pair<std::uint64_t, Uid>, std::set<PeerId>> tried;
  std::set<std::pair<std::uint64_t, Uid>> forced;
  std::vector<PeerId> serving;
  std::set<PeerId> secondary;
  std::uint64_t next_task = 1;
  std::uint64_t next_slot = 1;
};

DistributedExecutor::DistributedExecutor(overlay::Network& net, ExecutorOptions opts) : net_(&net), opts_(opts) {}

DistributedExecutor::~DistributedExecutor() = default;

void DistributedExecutor::submit(const RequestLine& r) {
  validate(r.params);
  const auto& truth = net_->authoritative();
  if (!truth.contains(r.params.ego)) throw InvalidArgument("unknown ego " + r.params.ego.to_string());
  if (r.params.kind == InferenceKind::proximity && !truth.attributes(truth.require(r.params.ego)).location)
    throw InvalidArgument("ego " + r.params.ego.to_string() + " has no location");

  auto rq = std::make_shared<Req>();
  rq->rec.id = r.id ? r.id : next_id_;
  if (requests_.contains(rq->rec.id)) throw InvalidArgument("duplicate request id " + std::to_string(rq->rec.id));
  next_id_ = std::max(next_id_, rq->rec.id + 1);
  rq->rec.params = r.params;
  if (r.entry) {
    if (!net_->has_peer(*r.entry)) throw InvalidArgument("unknown entry peer " + r.entry->to_string());
    rq->rec.entry = *r.entry;
  } else {
    const auto peers = net_->peer_ids();
    if (peers.empty()) throw InvalidArgument("network has no peers");
    rq->rec.entry = peers[mix_keys({net_->config().seed, rq->rec.id, 0xe47u}) % peers.size()];
  }
  rq->levels = budget_levels(r.params);
  requests_.emplace(rq->rec.id, rq);
  net_->loop().at(r.at, [this, rq]() { start(rq); });
}

void DistributedExecutor::run() { net_->loop().run(); }

InferenceResult DistributedExecutor::execute(const InferenceParams& p, PeerId entry) {
  RequestLine line;
  line.id = next_id_;
  line.params = p;
  line.at = net_->now();
  line.entry = entry;
  submit(line);
  const auto& rq = requests_.at(line.id);
  while (!rq->rec.finished && net_->loop().step()) {
  }
  if (!rq->rec.finished) throw Error("request " + std::to_string(line.id) + " never finished");
  return rq->rec.result;
}

void DistributedExecutor::forget(std::uint64_t id) {
  requests_.erase(id);
  net_->forget_request(id);
}

const RequestRecord* DistributedExecutor::record(std::uint64_t id) const {
  if (auto it = requests_.find(id); it != requests_.end()) return &it->second->rec;
  return nullptr;
}

std::vector<const RequestRecord*> DistributedExecutor::records() const {
  std::vector<const RequestRecord*> out;
  out.reserve(requests_.size());
  for (const auto& [id, rq] : requests_) out.push_back(&rq->rec);
  return out;
}

// ---------------------------------------------------------------- entry

void DistributedExecutor::start(const std::shared_ptr<Req>& rq) {
  const auto& p = rq->rec.params;
  rq->t0 = net_->now();
  rq->rec.issued_at = rq->t0;
  if (!net_->policies().empty()) {
    const auto& truth = net_->authoritative();
    std::optional<GeoPoint> where;
    if (auto v = truth.find(p.originator_user())) where = truth.attributes(*v).location;
    rq->gate = PolicyGate(truth, net_->policies(), rq->t0, p.originator_user(), rq->rec.entry, p.application, where);
  }
  try {
    rq->oracle = evaluate(net_->authoritative(), p, rq->t0, rq->gate);
    if (p.kind == InferenceKind::social_strength && rq->oracle.outcome == Outcome::ok)
      rq->oracle_paths = strength_paths(net_->authoritative(), p.ego, *p.alter, rq->t0, rq->gate);
  } catch (const Error&) {
    rq->oracle = InferenceResult{};
  }
  if (const auto* users = rq->oracle.users()) rq->rec.oracle_size = users->size();
  if (p.kind == InferenceKind::social_strength) rq->rec.oracle_size = rq->oracle_paths.size();

  if (net_->serves(rq->rec.entry, p.ego)) {
    begin_root(rq, rq->rec.entry);
    return;
  }
  try_entry(rq);
}

void DistributedExecutor::try_entry(const std::shared_ptr<Req>& rq) {
  net_->resolve_tpl(rq->rec.entry, rq->rec.params.ego, opts_.use_tpl_cache, rq->rec.id,
                    [this, rq]() { pick_entry(rq); });
}

void DistributedExecutor::pick_entry(const std::shared_ptr<Req>& rq) {
  const PeerId e = rq->rec.entry;
  const Uid ego = rq->rec.params.ego;
  std::optional<PeerId> next;
  if (const auto* list = net_->cached_tpl(e, ego))
    for (const auto& entry : list->entries)
      if (!rq->tried_entries.contains(entry.peer)) {
        next = entry.peer;
        break;
      }
  if (!next) {
    if (rq->fresh_entry) {
      finish(rq, Outcome::service_unavailable);
      return;
    }
    rq->fresh_entry = true;
    net_->resolve_tpl(e, ego, false, rq->rec.id, [this, rq]() { pick_entry(rq); });
    return;
  }
  rq->tried_entries.insert(*next);
  const PeerId head = *next;
  const std::uint64_t key = message_key(rq->rec.id, ++rq->entry_attempts, 0xf0);
  net_->send(
      {MsgKind::forward, e, head, ego, 128, rq->rec.id, key},
      [this, rq, e, head, ego, key]() {
        if (net_->serves(head, ego)) {
          begin_root(rq, head);
          return;
        }
        // a member that missed a key rotation turns the request away
        net_->send({MsgKind::forward_reply, head, e, ego, 64, rq->rec.id, key + 1, true}, [this, rq, e, ego]() {
          net_->invalidate_tpl(e, ego);
          try_entry(rq);
        });
      },
      [this, rq, e, ego]() {
        net_->invalidate_tpl(e, ego);
        try_entry(rq);
      });
}

// ---------------------------------------------------------------- source peer

std::uint64_t DistributedExecutor::new_task(Req& rq, PeerId peer, std::uint32_t hop, std::uint64_t parent_slot) {
  const std::uint64_t id = rq.next_task++;
  Task& t = rq.tasks[id];
  t.id = id;
  t.peer = peer;
  t.hop = hop;
  t.parent_slot = parent_slot;
  rq.serving.push_back(peer);
  return id;
}

void DistributedExecutor::begin_root(const std::shared_ptr<Req>& rq, PeerId p0) {
  const auto& p = rq->rec.params;
  rq->p0 = p0;
  rq->rec.source = p0;
  rq->root_task = new_task(*rq, p0, 0, 0);
  Task& root = rq->tasks.at(rq->root_task);
  const auto& g = net_->read_replica(p0, p.ego);

  if (p.kind == InferenceKind::relation_test || p.kind == InferenceKind::top_relations) {
    const auto r = evaluate(g, p, rq->t0, rq->gate);
    if (r.outcome != Outcome::ok) {
      root.replied = true;
      finish(rq, r.outcome);
      return;
    }
    rq->local_value = r.value;
    root.local_done = true;
    maybe_reply(rq, rq->root_task);
    return;
  }

  const auto label = p.kind == InferenceKind::social_strength ? std::nullopt : p.label;
  const double chi = p.kind == InferenceKind::social_strength ? 0.0 : p.min_weight;
  rq->root_verdict = rq->gate ? rq->gate(AccessRequest{p.ego, acp::DataRequest::edges(label, chi), {}, {}})
                              : acp::Verdict{true, acp::Stage::label_rules, std::nullopt, 0.0};
  if (!rq->root_verdict.granted) {
    root.replied = true;
    finish(rq, Outcome::access_denied);
    return;
  }

  if (p.kind == InferenceKind::social_strength) {
    rq->nw_i = normalize(neighbor_sums(g, g.require(p.ego), rq->t0, rq->root_verdict.weight_floor));
    std::vector<Seed> local;
    for (const auto& [j, nw] : rq->nw_i) {
      if (j == *p.alter) continue;
      Seed s{j, 1, {p.ego}};
      if (net_->serves(p0, j)) {
        local.push_back(std::move(s));
      } else if (rq->sent.emplace(std::pair{p0, j}, 1).second) {
        root.remote.push_back(std::move(s));
      }
    }
    run_local(rq, rq->root_task, std::move(local));
    return;
  }

  rq->ego_location = g.attributes(g.require(p.ego)).location;
  if (p.kind == InferenceKind::proximity && !rq->ego_location) {
    root.replied = true;
    finish(rq, Outcome::service_unavailable);
    return;
  }
  run_local(rq, rq->root_task, {Seed{p.ego, 0, {}}});
}

// ---------------------------------------------------------------- local work

void DistributedExecutor::run_local(const std::shared_ptr<Req>& rq, std::uint64_t task, std::vector<Seed> seeds) {
  const auto& p = rq->rec.params;
  Task& t = rq->tasks.at(task);
  const PeerId here = t.peer;
  std::stable_sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.depth < b.depth; });

  if (p.kind == InferenceKind::social_strength) {
    for (const auto& s : seeds) {
      if (!rq->expanded.emplace(std::pair{here, s.uid}, s.depth).second) continue;
      double floor = 0.0;
      if (rq->gate) {
        const auto v = rq->gate(AccessRequest{s.uid, acp::DataRequest::edges(std::nullopt), s.chain, {}});
        if (!v.granted) continue;
        floor = v.weight_floor;
      }
      const auto& g = net_->read_replica(here, s.uid);
      const auto nw = normalize(neighbor_sums(g, g.require(s.uid), rq->t0, floor));
      if (auto it = nw.find(*p.alter); it != nw.end()) t.acc.to_alter[s.uid] = it->second;
    }
  } else {
    const bool prox = p.kind == InferenceKind::proximity;
    const std::uint32_t radius = *p.radius;
    std::deque<Seed> queue(std::make_move_iterator(seeds.begin()), std::make_move_iterator(seeds.end()));
    while (!queue.empty()) {
      Seed s = std::move(queue.front());
      queue.pop_front();
      auto [memo, fresh] = rq->expanded.emplace(std::pair{here, s.uid}, s.depth);
      if (!fresh) {
        if (memo->second <= s.depth) continue;
        memo->second = s.depth;
      }
      const auto& g = net_->read_replica(here, s.uid);
      const auto v = g.require(s.uid);
      if (prox && s.depth > 0) {
        double meters = 0.0;
        if (location_matches(g.attributes(v), *rq->ego_location, *p.distance_m, p.timestamp, &meters) &&
            (!rq->gate || rq->gate(AccessRequest{s.uid, acp::DataRequest::location(), s.chain, {}}).granted))
          t.acc.near[s.uid] = meters;
      }
      if (s.depth >= radius) continue;
      double floor = p.min_weight;
      if (s.depth == 0) {
        floor = std::max(floor, rq->root_verdict.weight_floor);
      } else if (rq->gate) {
        const auto verdict =
            rq->gate(AccessRequest{s.uid, acp::DataRequest::edges(p.label, p.min_weight), s.chain, {}});
        if (!verdict.granted) continue;
        floor = std::max(floor, verdict.weight_floor);
      }
      std::optional<graph::LabelId> lid;
      if (p.label) {
        lid = g.find_label(*p.label);
        if (!lid) continue;
      }
      std::vector<Uid> chain = s.chain;
      chain.push_back(s.uid);
      const std::uint32_t nd = s.depth + 1;
      const bool visit = prox ? nd <= radius : nd < radius;
      for (const auto& e : g.out_edges(v)) {
        if (lid && e.label != *lid) continue;
        if (g.effective_weight(v, e, rq->t0) < floor) continue;
        const Uid u = g.uid(e.target);
        if (u == p.ego) continue;
        auto [f, added] = t.acc.found.emplace(u, nd);
        if (!added) f->second = std::min(f->second, nd);
        if (!visit) continue;
        if (net_->serves(here, u)) {
          queue.push_back(Seed{u, nd, chain});
          continue;
        }
        auto [sent, first] = rq->sent.emplace(std::pair{here, u}, nd);
        if (!first) {
          if (sent->second <= nd) continue;
          sent->second = nd;
        }
        t.remote.push_back(Seed{u, nd, chain});
      }
    }
  }

  t.local_done = true;
  auto remote = std::move(t.remote);
  t.remote.clear();
  if (!remote.empty()) dispatch(rq, task, std::move(remote), std::nullopt);
  maybe_reply(rq, task);
}

// ---------------------------------------------------------------- secondaries

void DistributedExecutor::dispatch(const std::shared_ptr<Req>& rq, std::uint64_t task, std::vector<Seed> seeds,
                                   std::optional<SimTime> deadline) {
  Task& t = rq->tasks.at(task);
  ++t.pending;
  auto batch = std::make_shared<Batch>();
  batch->deadline = deadline;
  batch->waiting = seeds.size();
  batch->seeds = std::move(seeds);
  const PeerId here = t.peer;
  for (const auto& s : batch->seeds) {
    net_->resolve_tpl(here, s.uid, opts_.use_tpl_cache, rq->rec.id, [this, rq, task, batch]() {
      if (--batch->waiting == 0) send_batch(rq, task, batch);
    });
  }
}

void DistributedExecutor::send_batch(const std::shared_ptr<Req>& rq, std::uint64_t task,
                                     const std::shared_ptr<Batch>& batch) {
  Task& t = rq->tasks.at(task);
  const PeerId here = t.peer;
  const SimTime now = net_->now();
  const SimTime deadline =
      batch->deadline ? *batch->deadline
                      : add_saturating(now, secondary_budget(rq->rec.params.timeout, rq->levels, t.hop));

  std::map<PeerId, std::vector<Seed>> groups;
  std::vector<Seed> again;
  for (auto& s : batch->seeds) {
    auto& tried = rq->tried[{task, s.uid}];
    tried.insert(here);
    std::optional<PeerId> head;
    if (const auto* list = net_->cached_tpl(here, s.uid))
      for (const auto& e : list->entries)
        if (!tried.contains(e.peer)) {
          head = e.peer;
          break;
        }
    if (head) {
      groups[*head].push_back(std::move(s));
    } else if (rq->forced.insert({task, s.uid}).second) {
      again.push_back(std::move(s));
    } else {
      t.acc.partial = true;  // nobody left to serve this user
    }
  }

  if (!again.empty()) {
    ++t.pending;
    auto retry = std::make_shared<Batch>();
    retry->deadline = deadline;
    retry->waiting = again.size();
    retry->seeds = std::move(again);
    for (const auto& s : retry->seeds)
      net_->resolve_tpl(here, s.uid, false, rq->rec.id, [this, rq, task, retry]() {
        if (--retry->waiting == 0) send_batch(rq, task, retry);
      });
  }

  for (auto& [target, users] : groups) {
    const std::uint64_t sid = rq->next_slot++;
    Slot& sl = rq->slots[sid];
    sl.id = sid;
    sl.task = task;
    sl.target = target;
    sl.users = std::move(users);
    sl.deadline = deadline;
    if (deadline <= now) {
      // no budget left: the answer could never be used, so nothing is sent
      sl.settled = true;
      t.acc.partial = true;
      continue;
    }
    ++t.pending;
    if (deadline != kNever) net_->loop().at(deadline, [this, rq, sid]() { settle_slot(rq, sid, nullptr, true); });
    net_->send({MsgKind::secondary, here, target, sl.users.front().uid, 64 + 24 * sl.users.size(), rq->rec.id,
                message_key(rq->rec.id, sid, 1)},
               [this, rq, sid]() { arrive(rq, sid); }, [this, rq, sid]() { slot_failed(rq, sid); });
  }

  --t.pending;
  maybe_reply(rq, task);
}

void DistributedExecutor::arrive(const std::shared_ptr<Req>& rq, std::uint64_t sid) {
  const Slot& sl = rq->slots.at(sid);
  const PeerId here = sl.target;
  const PeerId back = rq->tasks.at(sl.task).peer;
  std::vector<Seed> served, refused;
  for (const auto& s : sl.users) (net_->serves(here, s.uid) ? served : refused).push_back(s);

  if (!refused.empty()) {
    const bool nothing_served = served.empty();
    net_->send({MsgKind::secondary_reply, here, back, refused.front().uid, 64, rq->rec.id,
                message_key(rq->rec.id, sid, 2), true},
               [this, rq, sid, refused = std::move(refused), here, nothing_served]() {
                 retry(rq, sid, refused, here);
                 if (nothing_served) settle_slot(rq, sid, nullptr, false);
               });
  }
  if (served.empty()) return;
  if (here != rq->p0) rq->secondary.insert(here);
  const std::uint32_t hop = rq->tasks.at(sl.task).hop + 1;
  const std::uint64_t child = new_task(*rq, here, hop, sid);
  run_local(rq, child, std::move(served));
}

void DistributedExecutor::retry(const std::shared_ptr<Req>& rq, std::uint64_t sid, const std::vector<Seed>& users,
                                PeerId failed) {
  const Slot& sl = rq->slots.at(sid);
  const PeerId here = rq->tasks.at(sl.task).peer;
  for (const auto& s : users) {
    rq->tried[{sl.task, s.uid}].insert(failed);
    net_->invalidate_tpl(here, s.uid);
  }
  dispatch(rq, sl.task, users, sl.deadline);
}

void DistributedExecutor::slot_failed(const std::shared_ptr<Req>& rq, std::uint64_t sid) {
  const Slot& sl = rq->slots.at(sid);
  retry(rq, sid, sl.users, sl.target);
  settle_slot(rq, sid, nullptr, false);
}

void DistributedExecutor::settle_slot(const std::shared_ptr<Req>& rq, std::uint64_t sid, const Payload* reply,
                                      bool timed_out) {
  Slot& sl = rq->slots.at(sid);
  if (sl.settled) return;
  sl.settled = true;
  Task& t = rq->tasks.at(sl.task);
  if (timed_out) t.acc.partial = true;
  if (reply) t.acc.merge(*reply);
  if (t.replied) return;
  --t.pending;
  maybe_reply(rq, sl.task);
}

void DistributedExecutor::maybe_reply(const std::shared_ptr<Req>& rq, std::uint64_t task) {
  Task& t = rq->tasks.at(task);
  if (t.replied || !t.local_done || t.pending > 0) return;
  t.replied = true;
  if (t.parent_slot == 0) {
    const PeerId e = rq->rec.entry;
    if (t.peer == e) {
      finish(rq, Outcome::ok);
      return;
    }
    net_->send({MsgKind::forward_reply, t.peer, e, rq->rec.params.ego, t.acc.bytes(), rq->rec.id,
                message_key(rq->rec.id, 0, 4), true},
               [this, rq]() { finish(rq, Outcome::ok); });
    return;
  }
  const std::uint64_t sid = t.parent_slot;
  const PeerId to = rq->tasks.at(rq->slots.at(sid).task).peer;
  auto payload = std::make_shared<Payload>(t.acc);
  net_->send({MsgKind::secondary_reply, t.peer, to, rq->slots.at(sid).users.front().uid, payload->bytes(),
              rq->rec.id, message_key(rq->rec.id, sid, 3), true},
             [this, rq, sid, payload]() { settle_slot(rq, sid, payload.get(), false); });
}

// ---------------------------------------------------------------- results

void DistributedExecutor::assemble(Req& rq) {
  const auto& p = rq.rec.params;
  auto& r = rq.rec.result;
  const Payload& acc = rq.tasks.at(rq.root_task).acc;
  r.partial = acc.partial;
  r.completion = 1.0;

  auto set_completion = [&](const std::vector<ScoredUser>& got) {
    const auto* want = rq.oracle.users();
    if (!want || want->empty()) return;
    std::set<Uid> have;
    for (const auto& s : got) have.insert(s.uid);
    std::size_t hit = 0;
    for (const auto& s : *want) hit += have.contains(s.uid);
    r.completion = static_cast<double>(hit) / static_cast<double>(want->size());
  };
  auto by_score = [](const ScoredUser& a, const ScoredUser& b) {
    return a.score != b.score ? a.score < b.score : a.uid < b.uid;
  };

  switch (p.kind) {
    case InferenceKind::relation_test:
    case InferenceKind::top_relations:
      r.value = rq.local_value;
      break;
    case InferenceKind::neighborhood: {
      std::vector<ScoredUser> out;
      for (const auto& [u, d] : acc.found) out.push_back({u, static_cast<double>(d)});
      std::sort(out.begin(), out.end(), by_score);
      set_completion(out);
      r.value = std::move(out);
      break;
    }
    case InferenceKind::proximity: {
      std::vector<ScoredUser> out;
      for (const auto& [u, m] : acc.near) out.push_back({u, m});
      std::sort(out.begin(), out.end(), by_score);
      set_completion(out);
      r.value = std::move(out);
      break;
    }
    case InferenceKind::social_strength: {
      std::vector<StrengthPath> paths;
      if (auto it = rq.nw_i.find(*p.alter); it != rq.nw_i.end()) paths.push_back({std::nullopt, it->second});
      for (const auto& [j, nw_ij] : rq.nw_i) {
        if (j == *p.alter) continue;
        if (auto it = acc.to_alter.find(j); it != acc.to_alter.end()) paths.push_back({j, std::min(nw_ij, it->second)});
      }
      if (!rq.oracle_paths.empty()) {
        std::size_t hit = 0;
        for (const auto& op : rq.oracle_paths)
          hit += std::any_of(paths.begin(), paths.end(), [&](const StrengthPath& x) { return x.via == op.via; });
        r.completion = static_cast<double>(hit) / static_cast<double>(rq.oracle_paths.size());
      }
      r.value = fold_strength(paths);
      break;
    }
  }
}

void DistributedExecutor::finish(const std::shared_ptr<Req>& rq, Outcome outcome) {
  auto& rec = rq->rec;
  if (rec.finished) return;
  rec.finished = true;
  auto& r = rec.result;
  r.outcome = outcome;
  if (outcome == Outcome::ok) {
    assemble(*rq);
  } else {
    r.value = std::monostate{};
    r.completion = outcome == rq->oracle.outcome ? 1.0 : 0.0;
  }
  r.serving_peers = rq->serving;
  std::sort(r.serving_peers.begin(), r.serving_peers.end());
  rec.secondary_peers.assign(rq->secondary.begin(), rq->secondary.end());
  r.messages_sent = net_->request_messages(rec.id);
  r.elapsed = net_->now() - rq->t0;
  if (on_finish) on_finish(rec);
}

}  // namespace sks::inference
