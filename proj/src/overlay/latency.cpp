#include "sks/overlay/latency.hpp"

#include <algorithm>
#include <cmath>

#include "sks/core/rng.hpp"

namespace sks::overlay {

namespace {

double lognormal(std::uint64_t key, double median, double sigma) {
  double u1 = unit_from_bits(splitmix64(key));
  const double u2 = unit_from_bits(splitmix64(key ^ 0x5bd1e995ULL));
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  return median * std::exp(sigma * z);
}

SimDuration between(SimDuration lo, SimDuration hi, double u) {
  return lo + SimDuration{static_cast<std::int64_t>(std::llround(static_cast<double>((hi - lo).count()) * u))};
}

}  // namespace

SimDuration LatencyModel::one_way(PeerId from, PeerId to, std::uint64_t key) const {
  const std::uint64_t k = mix_keys({seed, from.value.hi, from.value.lo, to.value.hi, to.value.lo, key});
  const double u = unit_from_bits(k);
  switch (kind) {
    case Kind::constant: return constant;
    case Kind::uniform: return between(lo, hi, u);
    case Kind::two_class:
      return region(from) == region(to) ? between(intra_lo, intra_hi, u) : between(inter_lo, inter_hi, u);
    case Kind::heavy_tail: {
      const double extra_ms = lognormal(splitmix64(k), tail_median_ms, tail_sigma);
      return between(lo, hi, u) + from_millis(extra_ms);
    }
  }
  return constant;
}

SimDuration LatencyModel::routing_overhead(std::uint64_t key) const {
  if (route_median_ms <= 0.0) return SimDuration::zero();
  return from_millis(lognormal(mix_keys({seed, 0x726f757465ULL, key}), route_median_ms, route_sigma));
}

std::uint32_t LatencyModel::region(PeerId p) const {
  if (regions <= 1) return 0;
  return static_cast<std::uint32_t>(mix_keys({p.value.hi, p.value.lo}) % regions);
}

double LatencyModel::mean_one_way_ms() const {
  auto mid = [](SimDuration a, SimDuration b) { return to_millis(a + b) / 2.0; };
  switch (kind) {
    case Kind::constant: return to_millis(constant);
    case Kind::uniform: return mid(lo, hi);
    case Kind::two_class: {
      const double r = std::max<std::uint32_t>(regions, 1);
      return mid(intra_lo, intra_hi) / r + mid(inter_lo, inter_hi) * (r - 1) / r;
    }
    case Kind::heavy_tail: return mid(lo, hi) + tail_median_ms * std::exp(tail_sigma * tail_sigma / 2.0);
  }
  return 0.0;
}

LatencyModel LatencyModel::constant_delay(SimDuration d) {
  LatencyModel m;
  m.kind = Kind::constant;
  m.constant = d;
  return m;
}

LatencyModel LatencyModel::uniform_delay(SimDuration lo, SimDuration hi) {
  LatencyModel m;
  m.kind = Kind::uniform;
  m.lo = lo;
  m.hi = hi;
  return m;
}

LatencyModel LatencyModel::wide_area(SimDuration rtt) {
  LatencyModel m;
  m.kind = Kind::heavy_tail;
  m.tail_median_ms = 20.0;
  m.tail_sigma = 1.0;
  const double base_mean = to_millis(rtt) / 2.0 - m.tail_median_ms * std::exp(0.5);
  const double lo_ms = std::min(30.0, base_mean);
  m.lo = from_millis(lo_ms);
  m.hi = from_millis(2.0 * base_mean - lo_ms);
  m.route_median_ms = 350.0;
  m.route_sigma = 1.1;
  return m;
}

std::string to_string(LatencyModel::Kind k) {
  switch (k) {
    case LatencyModel::Kind::constant: return "constant";
    case LatencyModel::Kind::uniform: return "uniform";
    case LatencyModel::Kind::two_class: return "two-class";
    case LatencyModel::Kind::heavy_tail: return "heavy-tail";
  }
  return "?";
}

bool parse_latency_kind(const std::string& s, LatencyModel::Kind* out) {
  if (s == "constant") *out = LatencyModel::Kind::constant;
  else if (s == "uniform") *out = LatencyModel::Kind::uniform;
  else if (s == "two-class") *out = LatencyModel::Kind::two_class;
  else if (s == "heavy-tail") *out = LatencyModel::Kind::heavy_tail;
  else return false;
  return true;
}

}  // namespace sks::overlay
