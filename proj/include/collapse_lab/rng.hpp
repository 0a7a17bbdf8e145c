#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace collapse_lab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// The 64-bit key is the master seed and the upper half of the counter holds
/// a stream id (the trajectory index), so every trajectory owns an independent
/// stream that can be regenerated without touching any other. Satisfies
/// UniformRandomBitGenerator with 32-bit outputs.
class Philox4x32 {
public:
    using result_type = std::uint32_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (index_ == 4) {
            buffer_ = bijection(counter_block(block_++), key_);
            index_ = 0;
        }
        return buffer_[index_++];
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() noexcept {
        const std::uint64_t hi = (*this)();
        const std::uint64_t lo = (*this)();
        return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
    }

    std::uint64_t stream() const noexcept { return stream_; }

    /// The raw ten-round bijection, exposed for known-answer tests.
    static Block bijection(Block ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    Block counter_block(std::uint64_t n) const noexcept {
        return {static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n >> 32),
                static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    }

    Key key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    Block buffer_{};
    int index_ = 4;
};

/// Gaussian variates by the polar method. Written out rather than using
/// std::normal_distribution so streams are identical across standard libraries.
class NormalSampler {
public:
    double operator()(Philox4x32& rng) noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * rng.uniform01() - 1.0;
            v = 2.0 * rng.uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

private:
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace collapse_lab
