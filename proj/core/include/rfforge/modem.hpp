#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rfforge/random.hpp"
#include "rfforge/sigcore.hpp"

namespace rfforge {

enum class Modulation : std::uint8_t {
    ook,
    ask4,
    ask8,
    bpsk,
    qpsk,
    psk8,
    psk16,
    psk32,
    apsk16,
    apsk32,
    apsk64,
    apsk128,
    qam16,
    qam32,
    qam64,
    qam128,
    qam256,
    am_ssb_wc,
    am_ssb_sc,
    am_dsb_wc,
    am_dsb_sc,
    fm,
    gmsk,
    oqpsk,
};

inline constexpr int kModulationCount = 24;

enum class ModulationKind { linear_digital, offset_digital, continuous_phase, analog };

std::string_view name(Modulation m) noexcept;
ModulationKind kind(Modulation m) noexcept;
std::optional<Modulation> parse_modulation(std::string_view text) noexcept;

/// The 11-class "normal" composition.
const std::vector<Modulation>& normal_classes();
/// All 24 classes ("difficult" composition), in canonical order.
const std::vector<Modulation>& difficult_classes();

struct Constellation {
    std::vector<Complex> points;  // points[symbol_index]
    int bits_per_symbol = 0;
};

/// Unit-average-power constellation with deterministic symbol ordering.
/// Throws ConfigError ("no constellation") for analog and CPM schemes.
Constellation constellation_for(Modulation m);

struct ShapingConfig {
    double alpha = 0.35;
    int sps = 8;
    int span_symbols = 8;

    /// alpha == 0 selects the sinc limit; generation always uses alpha >= 0.1.
    void validate() const;
    std::size_t n_taps() const noexcept { return static_cast<std::size_t>(span_symbols * sps + 1); }
};

/// Root-raised-cosine taps: odd length span*sps+1, symmetric, unit energy.
std::vector<double> rrc_taps(const ShapingConfig& cfg);

/// Upsample by sps and RRC-filter an explicit symbol sequence. The output
/// (full convolution, transients retained) is scaled by sqrt(sps) so a
/// unit-power symbol stream yields unit waveform power.
Waveform shape_symbols(std::span<const Complex> symbols, const ShapingConfig& cfg);

/// i.i.d. uniform symbols from the constellation, pulse shaped.
/// min_length > n_symbols*sps throws DataError ("insufficient length").
Waveform modulate_linear(Modulation m, std::size_t n_symbols, const ShapingConfig& cfg,
                         RandomStream& rng, std::size_t min_length = 0);

/// OQPSK from explicit in-phase/quadrature bipolar symbol streams (+-1);
/// the quadrature arm is delayed sps/2 samples.
Waveform shape_offset_qpsk(std::span<const double> i_symbols, std::span<const double> q_symbols,
                           const ShapingConfig& cfg);
Waveform modulate_offset_qpsk(std::size_t n_symbols, const ShapingConfig& cfg, RandomStream& rng);

/// Sampled GMSK frequency pulse for the given BT; sums to 1. bt = +inf gives
/// the rectangular MSK pulse.
std::vector<double> gmsk_frequency_pulse(int sps, double bt);
/// Constant-envelope CPM waveform with modulation index 1/2 from bits in {0,1}.
Waveform gmsk_from_bits(std::span<const std::uint8_t> bits, int sps, double bt);
Waveform modulate_gmsk(std::size_t n_symbols, int sps, double bt, RandomStream& rng);

struct AnalogSourceConfig {
    enum class Kind { gaussian, tone };
    Kind kind = Kind::gaussian;
    double cutoff = 0.1;          // fraction of Nyquist (gaussian source)
    double tone_freq = 0.02;      // cycles/sample (tone source)
    double carrier_ratio = 0.5;   // carrier power / message power for WC variants
    double fm_deviation = 0.15;   // peak frequency deviation, cycles/sample
    int lowpass_taps = 129;
    int hilbert_taps = 255;

    void validate() const;
};

/// Unit-variance real message of n samples.
std::vector<double> analog_message(std::size_t n, const AnalogSourceConfig& src, RandomStream& rng);
/// Apply an AM/FM scheme to an explicit real message.
Waveform modulate_message(Modulation m, std::span<const double> message, const AnalogSourceConfig& src);
Waveform modulate_analog(Modulation m, std::size_t n_samples, const AnalogSourceConfig& src,
                         RandomStream& rng);

/// Everything the generator needs to synthesize any of the 24 classes.
struct ModemConfig {
    int sps = 8;
    int span_symbols = 8;
    double gmsk_bt = 0.35;
    AnalogSourceConfig analog;

    void validate() const;
};

/// Steady-state waveform of exactly n_samples for any scheme, with leading
/// filter transients removed. alpha sets the RRC roll-off for linear
/// and offset schemes.
Waveform synthesize(Modulation m, std::size_t n_samples, double alpha, const ModemConfig& cfg,
                    RandomStream& rng);

}  // namespace rfforge
