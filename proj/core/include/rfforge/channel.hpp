#pragma once

#include <span>
#include <vector>

#include "rfforge/random.hpp"
#include "rfforge/sigcore.hpp"

namespace rfforge {

struct StageFlags {
    bool timing = true;  // symbol-rate offset and timing offset
    bool fading = true;
    bool cfo = true;     // carrier frequency and phase offset
    bool noise = true;

    bool operator==(const StageFlags&) const = default;
};

/// Parameterizes the per-example random draws of the impairment chain.
struct ImpairmentProfile {
    double sigma_clk = 0.0;  // std-dev of both clock errors
    double tau = 0.0;        // delay-spread scale, samples
    int n_paths = 8;
    std::vector<double> snr_grid;  // dB, sorted ascending
    StageFlags stages;
    bool shared_clock = false;  // reuse the Δfs draw for Δfc

    void validate() const;
    bool operator==(const ImpairmentProfile&) const = default;
};

/// SNR grid from lo to hi inclusive in the given step.
std::vector<double> make_snr_grid(double lo_db, double hi_db, double step_db);

/// Draw α, Δt, Δfs, θc, Δfc, the fading taps and an SNR from the grid.
ChannelParams draw_params(const ImpairmentProfile& profile, RandomStream& rng);

/// Rayleigh-delay multipath taps with exp(-delay/tau) power envelope,
/// normalized to unit total power. tau == 0 yields the impulsive channel.
std::vector<FadingTap> draw_fading(double tau, int n_paths, RandomStream& rng);

/// Samples needed before and after a sample for the fading filter to be
/// fully supported.
std::size_t fading_lead(std::span<const FadingTap> taps) noexcept;

/// Sum of fractionally delayed, gain-scaled copies; output has the same
/// length as the input with zeros assumed beyond its edges.
Waveform apply_fading(std::span<const Complex> x, std::span<const FadingTap> taps);

/// x_n * exp(i(2π Δfc n + θc)).
Waveform apply_cfo_phase(std::span<const Complex> x, double delta_fc, double theta_c);

/// Resample at rate (1 + Δfs) starting delta_t samples in:
/// y[n] = x(delta_t + n / (1 + Δfs)). Throws DataError
/// ("insufficient source length") if the last output lands past the input.
Waveform apply_sro_timing(std::span<const Complex> x, double delta_fs, double delta_t,
                          std::size_t out_len);

/// Adds circular Gaussian noise of per-sample variance 10^(-snr_db/10).
/// An infinite SNR leaves the input untouched.
Waveform apply_awgn(std::span<const Complex> x, double snr_db, RandomStream& rng);

/// Clean input length that impair() needs to produce an output of `length`.
std::size_t required_input_length(const ChannelParams& params, std::size_t length,
                                  const StageFlags& stages = {});

/// Full chain: timing/SRO -> fading -> CFO/phase -> crop -> normalize -> AWGN.
IqExample impair(std::span<const Complex> clean, const ChannelParams& params, std::size_t length,
                 RandomStream& rng, const StageFlags& stages = {});

}  // namespace rfforge
