#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "sks/core/time.hpp"

namespace sks::overlay {

/// Single-threaded discrete-event scheduler. Events at the same instant run
/// in scheduling order.
class EventLoop {
 public:
  using Action = std::function<void()>;

  SimTime now() const { return now_; }

  /// Schedules at `t`; instants in the past are clamped to now.
  void at(SimTime t, Action a);
  void after(SimDuration d, Action a) { at(add_saturating(now_, d), std::move(a)); }

  bool step();
  void run();
  /// Runs events up to and including `t`, then sets the clock to `t`.
  void run_until(SimTime t);

  std::size_t pending() const { return queue_.size(); }
  std::uint64_t processed() const { return processed_; }

 private:
  struct Entry {
    SimTime time;
    std::uint64_t seq;
    std::size_t slot;
    bool operator>(const Entry& o) const { return time != o.time ? time > o.time : seq > o.seq; }
  };

  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue_;
  std::vector<Action> actions_;
  std::vector<std::size_t> free_slots_;
  SimTime now_{};
  std::uint64_t next_seq_ = 0;
  std::uint64_t processed_ = 0;
};

}  // namespace sks::overlay
