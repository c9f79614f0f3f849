#include "pathdep/rng.hpp"

#include <cmath>

namespace pathdep {

namespace {

constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85u;
constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mul_hi_lo(kPhiloxM4x32A, ctr[0], hi0, lo0);
    mul_hi_lo(kPhiloxM4x32B, ctr[2], hi1, lo1);
    const std::uint32_t c1 = ctr[1];
    const std::uint32_t c3 = ctr[3];
    ctr[0] = hi1 ^ c1 ^ key[0];
    ctr[1] = lo1;
    ctr[2] = hi0 ^ c3 ^ key[1];
    ctr[3] = lo0;
}

}  // namespace

Philox::Philox(RngSpec spec, std::uint32_t substream) {
    key_[0] = static_cast<std::uint32_t>(spec.master_seed);
    key_[1] = static_cast<std::uint32_t>(spec.master_seed >> 32);
    prefix_[0] = static_cast<std::uint32_t>(spec.stream_id);
    prefix_[1] = static_cast<std::uint32_t>(spec.stream_id >> 32);
    prefix_[2] = substream;
}

Philox::Block Philox::next_block() {
    std::uint32_t ctr[4] = {prefix_[0], prefix_[1], prefix_[2],
                            static_cast<std::uint32_t>(block_)};
    // Mix the high block bits into the substream word so long streams do not
    // wrap; a single path never comes close to 2^32 blocks.
    ctr[2] ^= static_cast<std::uint32_t>(block_ >> 32);
    ++block_;

    std::uint32_t key[2] = {key_[0], key_[1]};
    for (int round = 0; round < 10; ++round) {
        philox_round(ctr, key);
        key[0] += kPhiloxW32A;
        key[1] += kPhiloxW32B;
    }
    return Block{ctr[0], ctr[1], ctr[2], ctr[3]};
}

std::uint64_t Philox::next_u64() {
    const Block b = next_block();
    return (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
}

double Philox::next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

GaussianStream::GaussianStream(RngSpec spec, std::uint32_t substream)
    : philox_(spec, substream) {}

double GaussianStream::next_uniform() { return philox_.next_uniform(); }

double GaussianStream::next() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const Philox::Block b = philox_.next_block();
    const std::uint64_t u = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
    const std::uint64_t v = (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
    // u1 in (0,1] so the log is finite.
    const double u1 = 1.0 - static_cast<double>(u >> 11) * 0x1.0p-53;
    const double u2 = static_cast<double>(v >> 11) * 0x1.0p-53;
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

}  // namespace pathdep
