#include "sks/overlay/event_loop.hpp"

namespace sks::overlay {

void EventLoop::at(SimTime t, Action a) {
  if (t < now_) t = now_;
  std::size_t slot;
  if (!free_slots_.empty()) {
    slot = free_slots_.back();
    free_slots_.pop_back();
    actions_[slot] = std::move(a);
  } else {
    slot = actions_.size();
    actions_.push_back(std::move(a));
  }
  queue_.push(Entry{t, next_seq_++, slot});
}

bool EventLoop::step() {
  if (queue_.empty()) return false;
  const Entry e = queue_.top();
  queue_.pop();
  now_ = e.time;
  Action a = std::move(actions_[e.slot]);
  actions_[e.slot] = nullptr;
  free_slots_.push_back(e.slot);
  ++processed_;
  a();
  return true;
}

void EventLoop::run() {
  while (step()) {
  }
}

void EventLoop::run_until(SimTime t) {
  while (!queue_.empty() && queue_.top().time <= t) step();
  if (now_ < t) now_ = t;
}

}  // namespace sks::overlay
