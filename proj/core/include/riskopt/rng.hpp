// Reproducible random streams.
//
// Generator: xoshiro256** (Blackman & Vigna). The 256-bit state of stream
// (seed, id) is filled by SplitMix64 started from seed ^ mix(id), so every
// (seed, id) pair is an independent, fully deterministic sequence on every
// platform. Uniforms use the top 53 bits.
#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace riskopt {

class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return next(); }
  result_type next();

  /// Uniform on the open interval (0, 1).
  double uniform_open();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Stream (seed, f(stream_id, child)) for per-worker / per-replication use.
  RngStream child(std::uint64_t child_id) const;

 private:
  std::array<std::uint64_t, 4> s_{};
  std::uint64_t seed_;
  std::uint64_t stream_id_;
};

/// SplitMix64 finalizer; also used to derive stream ids from labels.
std::uint64_t mix64(std::uint64_t x);

/// Combine two 64-bit words into a stream id.
std::uint64_t combine_ids(std::uint64_t a, std::uint64_t b);

}  // namespace riskopt
