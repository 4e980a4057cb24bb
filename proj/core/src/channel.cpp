#include "rfforge/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rfforge/dsp.hpp"
#include "rfforge/errors.hpp"

namespace rfforge {

void ImpairmentProfile::validate() const {
    if (!(sigma_clk >= 0.0) || !std::isfinite(sigma_clk)) throw ConfigError("profile: sigma_clk must be >= 0");
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw ConfigError("profile: tau must be >= 0");
    if (n_paths < 1) throw ConfigError("profile: n_paths must be >= 1");
    if (snr_grid.empty()) throw ConfigError("profile: snr grid must be non-empty");
    if (!std::is_sorted(snr_grid.begin(), snr_grid.end())) throw ConfigError("profile: snr grid must be sorted");
    for (double s : snr_grid) {
        if (std::isnan(s)) throw ConfigError("profile: snr grid contains NaN");
    }
}

std::vector<double> make_snr_grid(double lo_db, double hi_db, double step_db) {
    if (!(step_db > 0.0) || hi_db < lo_db) throw ConfigError("snr grid: need step > 0 and hi >= lo");
    std::vector<double> grid;
    const long n = std::lround(std::floor((hi_db - lo_db) / step_db + 1e-9));
    for (long k = 0; k <= n; ++k) grid.push_back(lo_db + static_cast<double>(k) * step_db);
    return grid;
}

ChannelParams draw_params(const ImpairmentProfile& profile, RandomStream& rng) {
    profile.validate();
    ChannelParams p;
    // Draw order is part of the reproducibility contract.
    p.alpha = rng.uniform(0.1, 0.4);
    p.delta_t = rng.uniform(0.0, 16.0);
    p.delta_fs = profile.sigma_clk > 0.0 ? rng.normal(0.0, profile.sigma_clk) : 0.0;
    p.theta_c = rng.uniform(0.0, 2.0 * std::numbers::pi);
    if (profile.shared_clock) {
        p.delta_fc = p.delta_fs;
    } else {
        p.delta_fc = profile.sigma_clk > 0.0 ? rng.normal(0.0, profile.sigma_clk) : 0.0;
    }
    p.tau = profile.tau;
    RandomStream fading_rng = rng.fork(rng.substream() + 0x100u);
    p.taps = draw_fading(profile.tau, profile.n_paths, fading_rng);
    p.snr_db = profile.snr_grid[rng.below(profile.snr_grid.size())];
    return p;
}

std::vector<FadingTap> draw_fading(double tau, int n_paths, RandomStream& rng) {
    if (n_paths < 1) throw ConfigError("draw_fading: n_paths must be >= 1");
    if (!(tau >= 0.0)) throw ConfigError("draw_fading: tau must be >= 0");
    if (tau == 0.0) return {FadingTap{0.0, Complex(1.0, 0.0)}};
    std::vector<FadingTap> taps(static_cast<std::size_t>(n_paths));
    double total = 0.0;
    for (int i = 0; i < n_paths; ++i) {
        const double delay = i == 0 ? 0.0 : rng.rayleigh(tau);
        const Complex g = rng.complex_normal(std::exp(-delay / tau));
        taps[static_cast<std::size_t>(i)] = {delay, g};
        total += std::norm(g);
    }
    if (!(total > 0.0)) return {FadingTap{0.0, Complex(1.0, 0.0)}};
    const double scale = 1.0 / std::sqrt(total);
    for (FadingTap& t : taps) t.gain *= scale;
    return taps;
}

std::size_t fading_lead(std::span<const FadingTap> taps) noexcept {
    double max_delay = 0.0;
    for (const FadingTap& t : taps) max_delay = std::max(max_delay, t.delay);
    return static_cast<std::size_t>(std::ceil(max_delay)) + dsp::kInterpHalfWidth;
}

Waveform apply_fading(std::span<const Complex> x, std::span<const FadingTap> taps) {
    // Combined impulse response h[m], m in [-lag_before, lead].
    const long lag_before = dsp::kInterpHalfWidth - 1;
    const long lead = static_cast<long>(fading_lead(taps));
    std::vector<Complex> h(static_cast<std::size_t>(lead + lag_before + 1), Complex{0.0, 0.0});
    for (const FadingTap& t : taps) {
        if (t.delay < 0.0) throw ConfigError("apply_fading: negative tap delay");
        const long lo = static_cast<long>(std::floor(t.delay)) - lag_before;
        for (long m = lo; m < lo + dsp::kInterpWidth; ++m) {
            const double k = dsp::interp_kernel(static_cast<double>(m) - t.delay);
            if (k != 0.0) h[static_cast<std::size_t>(m + lag_before)] += t.gain * k;
        }
    }
    // Trim exact zeros at both ends (the impulsive channel becomes a single tap).
    std::size_t first = 0, last = h.size();
    while (first < last && h[first] == Complex{0.0, 0.0}) ++first;
    while (last > first && h[last - 1] == Complex{0.0, 0.0}) --last;

    const long n = static_cast<long>(x.size());
    Waveform y(x.size(), Complex{0.0, 0.0});
    for (std::size_t idx = first; idx < last; ++idx) {
        const Complex g = h[idx];
        const long m = static_cast<long>(idx) - lag_before;
        const long begin = std::max(0L, m);
        const long end = std::min(n, n + m);
        for (long k = begin; k < end; ++k) y[static_cast<std::size_t>(k)] += g * x[static_cast<std::size_t>(k - m)];
    }
    return y;
}

Waveform apply_cfo_phase(std::span<const Complex> x, double delta_fc, double theta_c) {
    Waveform y(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        // Phase reduced modulo 2π before the trig call to keep accuracy on long inputs.
        const double cycles = delta_fc * static_cast<double>(n);
        const double phase = 2.0 * std::numbers::pi * (cycles - std::floor(cycles)) + theta_c;
        y[n] = x[n] * Complex(std::cos(phase), std::sin(phase));
    }
    return y;
}

Waveform apply_sro_timing(std::span<const Complex> x, double delta_fs, double delta_t, std::size_t out_len) {
    if (!(1.0 + delta_fs > 0.0)) throw ConfigError("apply_sro_timing: rate must be positive");
    if (out_len == 0) return {};
    const double step = 1.0 / (1.0 + delta_fs);
    const double t_last = delta_t + static_cast<double>(out_len - 1) * step;
    if (x.empty() || t_last > static_cast<double>(x.size() - 1)) throw DataError("insufficient source length");
    Waveform y(out_len);
    for (std::size_t n = 0; n < out_len; ++n) y[n] = dsp::interpolate(x, delta_t + static_cast<double>(n) * step);
    return y;
}

Waveform apply_awgn(std::span<const Complex> x, double snr_db, RandomStream& rng) {
    Waveform y(x.begin(), x.end());
    if (std::isinf(snr_db) && snr_db > 0) return y;
    const double variance = std::pow(10.0, -snr_db / 10.0);
    for (Complex& v : y) v += rng.complex_normal(variance);
    return y;
}

namespace {

struct ChainLayout {
    std::size_t lead;     // fading lead, samples dropped before the crop
    std::size_t mid_len;  // samples produced by the timing stage
};

ChainLayout layout(const ChannelParams& params, std::size_t length, const StageFlags& stages) {
    const std::size_t lead = stages.fading ? fading_lead(params.taps) : 0;
    return {lead, length + lead + dsp::kInterpHalfWidth};
}

}  // namespace

std::size_t required_input_length(const ChannelParams& params, std::size_t length, const StageFlags& stages) {
    const ChainLayout l = layout(params, length, stages);
    const double origin = dsp::kInterpHalfWidth;
    if (!stages.timing) return static_cast<std::size_t>(origin) + l.mid_len;
    const double t_last = origin + params.delta_t + static_cast<double>(l.mid_len - 1) / (1.0 + params.delta_fs);
    return static_cast<std::size_t>(std::ceil(t_last)) + dsp::kInterpHalfWidth + 1;
}

IqExample impair(std::span<const Complex> clean, const ChannelParams& params, std::size_t length,
                 RandomStream& rng, const StageFlags& stages) {
    if (length == 0) throw ConfigError("impair: length must be > 0");
    const ChainLayout l = layout(params, length, stages);
    const std::size_t origin = dsp::kInterpHalfWidth;

    Waveform y;
    if (stages.timing) {
        y = apply_sro_timing(clean, params.delta_fs, static_cast<double>(origin) + params.delta_t, l.mid_len);
    } else {
        if (clean.size() < origin + l.mid_len) throw DataError("insufficient source length");
        y.assign(clean.begin() + static_cast<std::ptrdiff_t>(origin),
                 clean.begin() + static_cast<std::ptrdiff_t>(origin + l.mid_len));
    }
    if (stages.fading) y = apply_fading(y, params.taps);
    if (stages.cfo) y = apply_cfo_phase(y, params.delta_fc, params.theta_c);

    IqExample ex;
    ex.params = params;
    ex.samples = normalize(std::span<const Complex>(y).subspan(l.lead, length));
    if (stages.noise) {
        ex.samples = apply_awgn(ex.samples, params.snr_db, rng);
        ex.snr_db = params.snr_db;
    } else {
        ex.snr_db = kInfiniteSnr;
    }
    return ex;
}

}  // namespace rfforge
