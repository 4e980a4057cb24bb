#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace rfforge {

using Complex = std::complex<double>;
using Waveform = std::vector<Complex>;

inline constexpr double kInfiniteSnr = std::numeric_limits<double>::infinity();

struct FadingTap {
    double delay = 0.0;  // samples
    Complex gain{1.0, 0.0};

    bool operator==(const FadingTap&) const = default;
};

/// One draw of the per-example channel random variables.
struct ChannelParams {
    double alpha = 0.35;     // RRC roll-off, kept for provenance
    double delta_t = 0.0;    // timing offset, samples
    double delta_fs = 0.0;   // fractional sample-rate offset
    double theta_c = 0.0;    // carrier phase, radians
    double delta_fc = 0.0;   // carrier frequency offset, cycles/sample
    double tau = 0.0;        // delay-spread scale, samples
    std::vector<FadingTap> taps{FadingTap{}};
    double snr_db = kInfiniteSnr;

    bool operator==(const ChannelParams&) const = default;
};

/// One complex baseband recording with its ground truth.
struct IqExample {
    Waveform samples;
    std::uint16_t label = 0;
    double snr_db = kInfiniteSnr;
    ChannelParams params;
    std::uint64_t example_index = 0;
};

/// Mean of |x_n|^2.
double mean_power(std::span<const Complex> x) noexcept;

/// Scale to unit mean power; phase is untouched. Throws NumericError
/// ("degenerate example") on empty or all-zero input.
Waveform normalize(std::span<const Complex> x);
IqExample normalize(IqExample example);

/// 10*log10(P_clean / P_residual) with residual = noisy - clean.
/// Returns +infinity when the residual is exactly zero.
double measure_snr(std::span<const Complex> clean, std::span<const Complex> noisy);
double measure_snr(const IqExample& clean, const IqExample& noisy);

inline double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }

}  // namespace rfforge
