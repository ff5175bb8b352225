#pragma once

#include <cmath>
#include <cstdint>

namespace mdev {

// Counter-based pseudo-random stream (splitmix64 with a per-stream key).
//
// The k-th draw of stream (seed, id) depends only on (seed, id, k), so Monte
// Carlo trials can be sharded across any number of workers without changing
// a single sample: give trial t the stream id t and merge counts.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : state_(derive_key(seed, stream_id)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // uniform on the open interval (0,1); never returns 0 or 1
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  // standard normal via Box-Muller (two uniforms per draw, no cached spare)
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  // symmetric Pareto: |X| = scale * U^{-1/alpha}, P{|X|>t} = min{1,(scale/t)^alpha}
  double pareto_sym(double alpha, double scale) {
    const double mag = scale * std::pow(uniform01(), -1.0 / alpha);
    return rademacher() * mag;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream_id) {
    // two mixing rounds keep distinct (seed, id) pairs decorrelated
    return mix(mix(seed ^ 0x6a09e667f3bcc909ull) + stream_id);
  }

  std::uint64_t state_;
};

}  // namespace mdev
