#pragma once

#include <array>
#include <cstdint>

namespace pathdep {

// Identifies one reproducible random stream. Sample i of a Monte Carlo run
// always maps to stream_id = i, so estimates do not depend on how draws are
// scheduled across workers.
struct RngSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
};

// Philox-4x32-10 counter-based generator. The key is derived from the master
// seed; the counter encodes (stream, substream, block), so any block of the
// keyed stream can be generated independently and in any order.
class Philox {
public:
    using Block = std::array<std::uint32_t, 4>;

    Philox(RngSpec spec, std::uint32_t substream = 0);

    // Next 4x32 block of the stream.
    Block next_block();

    std::uint64_t next_u64();
    // Uniform on [0,1) with 53-bit resolution.
    double next_uniform();

private:
    std::uint32_t key_[2];
    std::uint32_t prefix_[3];  // stream lo/hi, substream
    std::uint64_t block_ = 0;
};

// Standard normal variates on top of Philox via Box-Muller. Deterministic
// given (spec, substream): the n-th variate is always the same value.
class GaussianStream {
public:
    explicit GaussianStream(RngSpec spec, std::uint32_t substream = 0);

    double next();
    double next_uniform();

private:
    Philox philox_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace pathdep
