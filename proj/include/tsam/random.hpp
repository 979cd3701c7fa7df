#pragma once

#include <cstdint>
#include <random>

namespace tsam {

/// A deterministic stream of uniform and standard normal variates.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id);

  /// Uniform on [0, 1).
  double uniform();
  double normal();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> norm_{0.0, 1.0};
};

/// The independent sub-streams owned by one chain. The proposal normals and
/// the two stages' uniforms never share a stream, so a kernel that skips the
/// second stage does not shift the other streams.
struct ChainStreams {
  explicit ChainStreams(std::uint64_t seed);

  RandomStream proposal;
  RandomStream stage1;
  RandomStream stage2;
  RandomStream init;
};

}  // namespace tsam
