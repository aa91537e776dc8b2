#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "sks/inference/params.hpp"
#include "sks/overlay/network.hpp"

namespace sks::inference {

struct ExecutorOptions {
  bool use_tpl_cache = true;
};

struct RequestRecord {
  std::uint64_t id = 0;
  InferenceParams params;
  PeerId entry;
  SimTime issued_at{};
  /// Trusted peer of ego that ran the request; unset if none was reached.
  std::optional<PeerId> source;
  /// Distinct peers that served a secondary portion, the source excluded.
  std::vector<PeerId> secondary_peers;
  InferenceResult result;
  /// Set-valued oracle answer size (or oracle path count for strength).
  std::size_t oracle_size = 0;
  bool finished = false;
};

/// Runs inference requests over the simulated network. Every request enters
/// at some peer, is forwarded to the fastest trusted peer of ego, and fans out
/// to the trusted peers of the users that peer cannot serve itself. Secondary
/// portions at hop k get T * (levels - k - 1) to answer.
class DistributedExecutor {
 public:
  explicit DistributedExecutor(overlay::Network& net, ExecutorOptions opts = {});
  ~DistributedExecutor();
  DistributedExecutor(const DistributedExecutor&) = delete;
  DistributedExecutor& operator=(const DistributedExecutor&) = delete;

  /// Schedules a request at r.at. Without an entry peer one is drawn from
  /// the request id. Throws InvalidArgument on a bad request.
  void submit(const RequestLine& r);
  /// Runs the event loop until nothing is left to do.
  void run();
  /// Submits at the current instant and steps the loop until it finishes.
  InferenceResult execute(const InferenceParams& p, PeerId entry);

  const RequestRecord* record(std::uint64_t id) const;
  std::vector<const RequestRecord*> records() const;
  /// Drops a finished request's record and per-request message counter.
  void forget(std::uint64_t id);

  std::function<void(const RequestRecord&)> on_finish;

 private:
  struct Req;
  struct Task;
  struct Slot;
  struct Seed;
  struct Payload;
  struct Batch;

  void start(const std::shared_ptr<Req>& rq);
  void try_entry(const std::shared_ptr<Req>& rq);
  void pick_entry(const std::shared_ptr<Req>& rq);
  void begin_root(const std::shared_ptr<Req>& rq, PeerId p0);
  void finish(const std::shared_ptr<Req>& rq, Outcome outcome);

  std::uint64_t new_task(Req& rq, PeerId peer, std::uint32_t hop, std::uint64_t parent_slot);
  void run_local(const std::shared_ptr<Req>& rq, std::uint64_t task, std::vector<Seed> seeds);
  void dispatch(const std::shared_ptr<Req>& rq, std::uint64_t task, std::vector<Seed> seeds,
                std::optional<SimTime> deadline);
  void send_batch(const std::shared_ptr<Req>& rq, std::uint64_t task, const std::shared_ptr<Batch>& batch);
  void arrive(const std::shared_ptr<Req>& rq, std::uint64_t slot);
  void slot_failed(const std::shared_ptr<Req>& rq, std::uint64_t slot);
  void retry(const std::shared_ptr<Req>& rq, std::uint64_t slot, const std::vector<Seed>& users, PeerId failed);
  void settle_slot(const std::shared_ptr<Req>& rq, std::uint64_t slot, const Payload* reply, bool timed_out);
  void maybe_reply(const std::shared_ptr<Req>& rq, std::uint64_t task);
  void assemble(Req& rq);

  overlay::Network* net_;
  ExecutorOptions opts_;
  std::map<std::uint64_t, std::shared_ptr<Req>> requests_;
  std::uint64_t next_id_ = 1;
};

}  // namespace sks::inference
