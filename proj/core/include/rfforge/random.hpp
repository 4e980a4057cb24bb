#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <limits>

namespace rfforge {

/// Philox-4x32-10 block function (Salmon et al., SC'11). Maps a 128-bit
/// counter and 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// Counter-based random stream. The value sequence depends only on
/// (master_seed, stream_index, substream), so examples can be generated in
/// any order or on any number of threads with identical output.
///
/// Satisfies UniformRandomBitGenerator, but the distribution helpers below
/// should be preferred: unlike the <random> distributions their output is
/// identical across standard library implementations.
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t master_seed, std::uint64_t stream_index,
                 std::uint32_t substream = 0) noexcept;

    /// Independent stream sharing this stream's (seed, index).
    RandomStream fork(std::uint32_t substream) const noexcept {
        return RandomStream(master_seed_, stream_index_, substream);
    }

    std::uint64_t master_seed() const noexcept { return master_seed_; }
    std::uint64_t stream_index() const noexcept { return stream_index_; }
    std::uint32_t substream() const noexcept { return substream_; }

    std::uint32_t next_u32() noexcept;
    std::uint64_t next_u64() noexcept;

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) noexcept;
    /// Standard normal via Box-Muller; the paired value is cached.
    double normal() noexcept;
    double normal(double mean, double stddev) noexcept { return mean + stddev * normal(); }
    /// Circular complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_normal(double variance = 1.0) noexcept;
    /// Rayleigh distributed with scale sigma (mean sigma*sqrt(pi/2)).
    double rayleigh(double sigma) noexcept;

    result_type operator()() noexcept { return next_u64(); }
    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

private:
    void refill() noexcept;

    std::uint64_t master_seed_;
    std::uint64_t stream_index_;
    std::uint32_t substream_;
    std::uint32_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffered_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

}  // namespace rfforge
