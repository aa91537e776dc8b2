#include "sks/overlay/churn.hpp"

#include <algorithm>

#include "sks/core/rng.hpp"

namespace sks::overlay {

ChurnModel::ChurnModel(double offline_fraction, SimDuration tick, double flip_rate, std::uint64_t seed)
    : offline_(std::clamp(offline_fraction, 0.0, 1.0)),
      tick_(tick > SimDuration::zero() ? tick : SimDuration{1'000'000}),
      flip_rate_(std::clamp(flip_rate, 0.0, 1.0)),
      seed_(seed) {}

bool ChurnModel::online(PeerId p, SimTime t) const {
  if (offline_ <= 0.0) return true;
  if (t < SimTime{}) t = SimTime{};
  const auto tick = static_cast<std::size_t>(t.time_since_epoch() / tick_);
  auto& states = states_[p];
  // 1 = online
  if (states.empty())
    states.push_back(keyed_uniform({seed_, p.value.hi, p.value.lo, 0}) >= offline_ ? 1 : 0);
  // leave rate f*r and return rate (1-f)*r keep the offline share at f
  const double go_down = offline_ * flip_rate_;
  const double come_back = (1.0 - offline_) * flip_rate_;
  while (states.size() <= tick) {
    const std::size_t k = states.size();
    const double u = keyed_uniform({seed_, p.value.hi, p.value.lo, k});
    const bool was_online = states.back() != 0;
    const bool now_online = was_online ? u >= go_down : u < come_back;
    states.push_back(now_online ? 1 : 0);
  }
  return states[tick] != 0;
}

}  // namespace sks::overlay
