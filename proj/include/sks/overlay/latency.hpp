#pragma once

#include <cstdint>
#include <string>

#include "sks/core/ids.hpp"
#include "sks/core/time.hpp"

namespace sks::overlay {

/// One-way message delay. Draws are keyed by (seed, endpoints, message key)
/// so a given message always takes the same time no matter when or in what
/// order the simulation asks.
struct LatencyModel {
  enum class Kind { constant, uniform, two_class, heavy_tail };

  Kind kind = Kind::uniform;
  std::uint64_t seed = 0;

  SimDuration constant{125'000};
  // uniform, and the base of heavy_tail
  SimDuration lo{25'000};
  SimDuration hi{225'000};
  // two_class: peers hashed into regions
  std::uint32_t regions = 8;
  SimDuration intra_lo{5'000};
  SimDuration intra_hi{30'000};
  SimDuration inter_lo{50'000};
  SimDuration inter_hi{250'000};
  // heavy_tail: base + lognormal(median, sigma)
  double tail_median_ms = 20.0;
  double tail_sigma = 1.0;
  // extra per overlay routing hop (lognormal); zero median disables
  double route_median_ms = 0.0;
  double route_sigma = 1.0;

  SimDuration one_way(PeerId from, PeerId to, std::uint64_t key) const;
  /// Additional delay of one overlay routing hop on top of one_way().
  SimDuration routing_overhead(std::uint64_t key) const;
  std::uint32_t region(PeerId p) const;
  /// Expected one-way delay, ignoring routing overhead.
  double mean_one_way_ms() const;

  static LatencyModel constant_delay(SimDuration d);
  static LatencyModel uniform_delay(SimDuration lo, SimDuration hi);
  /// Heavy-tailed wide-area model whose mean round trip is `rtt`; overlay
  /// routing hops pay an extra lognormal delay modelling a loaded network.
  static LatencyModel wide_area(SimDuration rtt);
};

std::string to_string(LatencyModel::Kind k);
bool parse_latency_kind(const std::string& s, LatencyModel::Kind* out);

}  // namespace sks::overlay
