#include "tsam/random.hpp"

namespace tsam {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                    0x7473616du};
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream_id)
    : engine_(seeded_engine(seed, stream_id)) {}

// 53 random mantissa bits; never returns 1.0.
double RandomStream::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double RandomStream::normal() { return norm_(engine_); }

ChainStreams::ChainStreams(std::uint64_t seed)
    : proposal(seed, 1), stage1(seed, 2), stage2(seed, 3), init(seed, 4) {}

}  // namespace tsam
