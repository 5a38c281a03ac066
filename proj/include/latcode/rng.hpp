// rng.hpp -- counter-based random number generation for reproducible Monte Carlo.
//
// Philox4x32-10 keyed by (seed, stream): every (seed, stream) pair addresses an
// independent substream whose output depends only on a 128-bit block counter.
// Simulations assign one stream per trial index, so results are identical no
// matter how trials are scheduled across worker threads.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace latcode {

namespace detail {

// One Philox 4x32 round: multiply-hi/lo mixing with round-key injection.
inline void philox_round(std::array<std::uint32_t, 4>& ctr, std::array<std::uint32_t, 2>& key) {
    constexpr std::uint64_t kMul0 = 0xD2511F53ULL;
    constexpr std::uint64_t kMul1 = 0xCD9E8D57ULL;
    const std::uint64_t p0 = kMul0 * ctr[0];
    const std::uint64_t p1 = kMul1 * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
           static_cast<std::uint32_t>(p0)};
    key[0] += 0x9E3779B9U;  // golden-ratio Weyl increments
    key[1] += 0xBB67AE85U;
}

inline std::array<std::uint32_t, 4> philox_block(std::uint64_t seed, std::uint64_t stream,
                                                 std::uint64_t block) {
    std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
        static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                        static_cast<std::uint32_t>(seed >> 32)};
    for (int r = 0; r < 10; ++r) philox_round(ctr, key);
    return ctr;
}

}  // namespace detail

// Deterministic substream generator. Draw order within a stream is part of the
// contract: callers must consume values in a fixed sequence.
class SubstreamRng {
  public:
    SubstreamRng(std::uint64_t seed, std::uint64_t stream)
        : seed_(seed), stream_(stream) {}

    std::uint64_t next_u64() {
        if (have_u64_) {
            have_u64_ = false;
            return spare_u64_;
        }
        const auto w = detail::philox_block(seed_, stream_, block_++);
        const std::uint64_t lo = (static_cast<std::uint64_t>(w[1]) << 32) | w[0];
        const std::uint64_t hi = (static_cast<std::uint64_t>(w[3]) << 32) | w[2];
        spare_u64_ = hi;
        have_u64_ = true;
        return lo;
    }

    // Uniform double in [0, 1), 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound) via 128-bit multiply-shift. Bias is
    // bounded by bound / 2^64, negligible for the index ranges used here.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    // Standard normal via Box-Muller; generates pairs, caches the second.
    double next_gaussian() {
        if (have_gauss_) {
            have_gauss_ = false;
            return spare_gauss_;
        }
        // Shift into (0, 1] so the log argument never vanishes.
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = next_unit();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586476925286766559 * u2;
        spare_gauss_ = rad * std::sin(ang);
        have_gauss_ = true;
        return rad * std::cos(ang);
    }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::uint64_t spare_u64_ = 0;
    double spare_gauss_ = 0.0;
    bool have_u64_ = false;
    bool have_gauss_ = false;
};

}  // namespace latcode
