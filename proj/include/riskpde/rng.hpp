#pragma once

// Counter-based random streams. Every draw is a pure function of
// (key, stream, position), so path k of a Monte Carlo run can be produced
// independently of paths 0..k-1 and results do not depend on thread
// scheduling or on how many draws another path consumed.

#include <array>
#include <cmath>
#include <cstdint>

namespace riskpde {

// SplitMix64 finalizer. Used to derive stream keys from (seed, index) pairs.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Key for an independent substream, e.g. one grid node of a field estimate.
inline std::uint64_t derive_stream_key(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index));
}

// Philox4x32-10 block cipher (Salmon et al., Random123). Maps a 128-bit
// counter and a 64-bit key to 128 random bits in 10 rounds.
struct Philox4x32 {
    using Block = std::array<std::uint32_t, 4>;

    static Block generate(std::uint64_t key, std::uint64_t hi_counter,
                          std::uint64_t lo_counter) {
        std::uint32_t c0 = static_cast<std::uint32_t>(lo_counter);
        std::uint32_t c1 = static_cast<std::uint32_t>(lo_counter >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(hi_counter);
        std::uint32_t c3 = static_cast<std::uint32_t>(hi_counter >> 32);
        std::uint32_t k0 = static_cast<std::uint32_t>(key);
        std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ull * c0;
            const std::uint64_t p1 = 0xCD9E8D57ull * c2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return {c0, c1, c2, c3};
    }
};

namespace detail {

inline double u64_to_unit_open(std::uint64_t w) {
    // (0, 1]: never 0, so log() below is safe.
    return static_cast<double>((w >> 11) + 1) * 0x1.0p-53;
}

inline double u64_to_unit_halfopen(std::uint64_t w) {
    // [0, 1)
    return static_cast<double>(w >> 11) * 0x1.0p-53;
}

inline std::uint64_t join32(std::uint32_t hi, std::uint32_t lo) {
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

} // namespace detail

// Sequential view of one counter stream: uniforms in [0,1).
class UniformStream {
public:
    explicit UniformStream(std::uint64_t key, std::uint64_t stream = 0)
        : key_(key), stream_(stream) {}

    double next() {
        if (!have_) {
            const auto b = Philox4x32::generate(key_, stream_, block_++);
            pending_ = detail::u64_to_unit_halfopen(detail::join32(b[2], b[3]));
            have_ = true;
            return detail::u64_to_unit_halfopen(detail::join32(b[0], b[1]));
        }
        have_ = false;
        return pending_;
    }

private:
    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    double pending_ = 0.0;
    bool have_ = false;
};

// Sequential view of one counter stream: standard normals via the Marsaglia
// polar method. Rejection consumes a variable number of blocks, which is fine
// because draws within one stream are only ever taken in order.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t key, std::uint64_t stream = 0)
        : key_(key), stream_(stream) {}

    double next() {
        if (have_) {
            have_ = false;
            return pending_;
        }
        double u, v, s;
        do {
            const auto b = Philox4x32::generate(key_, stream_, block_++);
            u = 2.0 * detail::u64_to_unit_open(detail::join32(b[0], b[1])) - 1.0;
            v = 2.0 * detail::u64_to_unit_open(detail::join32(b[2], b[3])) - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double r = std::sqrt(-2.0 * std::log(s) / s);
        pending_ = v * r;
        have_ = true;
        return u * r;
    }

private:
    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    double pending_ = 0.0;
    bool have_ = false;
};

} // namespace riskpde
