#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "sks/core/ids.hpp"
#include "sks/core/time.hpp"

namespace sks::overlay {

/// Independent two-state Markov chain per peer, one step per tick, with
/// stationary offline probability `offline_fraction`. State depends only on
/// (seed, peer, tick).
class ChurnModel {
 public:
  ChurnModel() = default;
  ChurnModel(double offline_fraction, SimDuration tick, double flip_rate, std::uint64_t seed);

  bool online(PeerId p, SimTime t) const;
  double offline_fraction() const { return offline_; }
  bool enabled() const { return offline_ > 0.0; }

 private:
  double offline_ = 0.0;
  SimDuration tick_{60'000'000};
  double flip_rate_ = 0.5;
  std::uint64_t seed_ = 0;
  mutable std::unordered_map<PeerId, std::vector<std::uint8_t>> states_;
};

}  // namespace sks::overlay
