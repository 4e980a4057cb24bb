#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rfforge/dsp.hpp"
#include "rfforge/errors.hpp"
#include "rfforge/modem.hpp"

namespace rfforge {

void AnalogSourceConfig::validate() const {
    if (!(cutoff > 0.0 && cutoff < 1.0)) throw ConfigError("analog: cutoff must be in (0, 1)");
    if (!(tone_freq > -0.5 && tone_freq < 0.5)) throw ConfigError("analog: tone_freq must be in (-0.5, 0.5)");
    if (!(carrier_ratio >= 0.0)) throw ConfigError("analog: carrier_ratio must be >= 0");
    if (!(fm_deviation >= 0.0 && fm_deviation < 0.5)) throw ConfigError("analog: fm_deviation must be in [0, 0.5)");
    if (lowpass_taps < 3 || lowpass_taps % 2 == 0) throw ConfigError("analog: lowpass_taps must be odd");
    if (hilbert_taps < 3 || hilbert_taps % 2 == 0) throw ConfigError("analog: hilbert_taps must be odd");
}

std::vector<double> analog_message(std::size_t n, const AnalogSourceConfig& src, RandomStream& rng) {
    src.validate();
    std::vector<double> m(n);
    if (src.kind == AnalogSourceConfig::Kind::tone) {
        const double phase0 = rng.uniform(0.0, 2.0 * std::numbers::pi);
        for (std::size_t k = 0; k < n; ++k) {
            m[k] = std::numbers::sqrt2 * std::cos(2.0 * std::numbers::pi * src.tone_freq * k + phase0);
        }
        return m;
    }
    const auto h = dsp::lowpass_taps(0.5 * src.cutoff, src.lowpass_taps);
    double energy = 0.0;
    for (double v : h) energy += v * v;
    const double gain = 1.0 / std::sqrt(energy);
    std::vector<double> white(n + h.size() - 1);
    for (double& v : white) v = rng.normal();
    // 'valid' part of the convolution: every output sees the full filter.
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        const double* p = white.data() + k;
        for (std::size_t j = 0; j < h.size(); ++j) acc += h[j] * p[h.size() - 1 - j];
        m[k] = gain * acc;
    }
    return m;
}

namespace {

double mean_square(std::span<const double> m) {
    if (m.empty()) return 0.0;
    double acc = 0.0;
    for (double v : m) acc += v * v;
    return acc / static_cast<double>(m.size());
}

// Analytic signal m + j*H{m}, same length and alignment as m.
Waveform analytic(std::span<const double> m, int n_taps) {
    const auto h = dsp::hilbert_taps(n_taps);
    const auto hm = dsp::convolve(m, h);
    const std::size_t delay = h.size() / 2;
    Waveform y(m.size());
    for (std::size_t k = 0; k < m.size(); ++k) y[k] = Complex(m[k], hm[k + delay]);
    return y;
}

}  // namespace

Waveform modulate_message(Modulation m, std::span<const double> message, const AnalogSourceConfig& src) {
    src.validate();
    const double carrier = std::sqrt(src.carrier_ratio * mean_square(message));
    Waveform y;
    switch (m) {
        case Modulation::am_dsb_sc:
        case Modulation::am_dsb_wc: {
            const double c = m == Modulation::am_dsb_wc ? carrier : 0.0;
            y.resize(message.size());
            for (std::size_t k = 0; k < message.size(); ++k) y[k] = Complex(message[k] + c, 0.0);
            return y;
        }
        case Modulation::am_ssb_sc:
        case Modulation::am_ssb_wc: {
            y = analytic(message, src.hilbert_taps);
            if (m == Modulation::am_ssb_wc) {
                const double c = std::sqrt(src.carrier_ratio * mean_power(y));
                for (Complex& v : y) v += c;
            }
            return y;
        }
        case Modulation::fm: {
            double peak = 0.0;
            for (double v : message) peak = std::max(peak, std::abs(v));
            const double k = peak > 0.0 ? 2.0 * std::numbers::pi * src.fm_deviation / peak : 0.0;
            y.resize(message.size());
            double phase = 0.0;
            for (std::size_t n = 0; n < message.size(); ++n) {
                phase += k * message[n];
                y[n] = std::polar(1.0, phase);
            }
            return y;
        }
        default: break;
    }
    throw ConfigError("modulate_message: " + std::string(name(m)) + " is not an analog scheme");
}

Waveform modulate_analog(Modulation m, std::size_t n_samples, const AnalogSourceConfig& src,
                         RandomStream& rng) {
    if (kind(m) != ModulationKind::analog) {
        throw ConfigError("modulate_analog: " + std::string(name(m)) + " is not an analog scheme");
    }
    src.validate();
    const std::size_t guard = static_cast<std::size_t>(src.hilbert_taps);
    const auto message = analog_message(n_samples + 2 * guard, src, rng);
    const Waveform full = modulate_message(m, message, src);
    return Waveform(full.begin() + static_cast<std::ptrdiff_t>(guard),
                    full.begin() + static_cast<std::ptrdiff_t>(guard + n_samples));
}

}  // namespace rfforge
