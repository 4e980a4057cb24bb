#include "rfforge/modem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "rfforge/dsp.hpp"
#include "rfforge/errors.hpp"

namespace rfforge {

namespace {

struct SchemeInfo {
    Modulation id;
    std::string_view name;
    ModulationKind kind;
};

constexpr std::array<SchemeInfo, kModulationCount> kSchemes{{
    {Modulation::ook, "OOK", ModulationKind::linear_digital},
    {Modulation::ask4, "4ASK", ModulationKind::linear_digital},
    {Modulation::ask8, "8ASK", ModulationKind::linear_digital},
    {Modulation::bpsk, "BPSK", ModulationKind::linear_digital},
    {Modulation::qpsk, "QPSK", ModulationKind::linear_digital},
    {Modulation::psk8, "8PSK", ModulationKind::linear_digital},
    {Modulation::psk16, "16PSK", ModulationKind::linear_digital},
    {Modulation::psk32, "32PSK", ModulationKind::linear_digital},
    {Modulation::apsk16, "16APSK", ModulationKind::linear_digital},
    {Modulation::apsk32, "32APSK", ModulationKind::linear_digital},
    {Modulation::apsk64, "64APSK", ModulationKind::linear_digital},
    {Modulation::apsk128, "128APSK", ModulationKind::linear_digital},
    {Modulation::qam16, "16QAM", ModulationKind::linear_digital},
    {Modulation::qam32, "32QAM", ModulationKind::linear_digital},
    {Modulation::qam64, "64QAM", ModulationKind::linear_digital},
    {Modulation::qam128, "128QAM", ModulationKind::linear_digital},
    {Modulation::qam256, "256QAM", ModulationKind::linear_digital},
    {Modulation::am_ssb_wc, "AM-SSB-WC", ModulationKind::analog},
    {Modulation::am_ssb_sc, "AM-SSB-SC", ModulationKind::analog},
    {Modulation::am_dsb_wc, "AM-DSB-WC", ModulationKind::analog},
    {Modulation::am_dsb_sc, "AM-DSB-SC", ModulationKind::analog},
    {Modulation::fm, "FM", ModulationKind::analog},
    {Modulation::gmsk, "GMSK", ModulationKind::continuous_phase},
    {Modulation::oqpsk, "OQPSK", ModulationKind::offset_digital},
}};

const SchemeInfo& info(Modulation m) noexcept { return kSchemes[static_cast<std::size_t>(m)]; }

constexpr unsigned gray(unsigned k) noexcept { return k ^ (k >> 1); }

int log2_exact(std::size_t n) {
    int b = 0;
    while ((std::size_t{1} << b) < n) ++b;
    return b;
}

void normalize_points(std::vector<Complex>& pts) {
    double p = 0.0;
    for (const Complex& c : pts) p += std::norm(c);
    const double scale = 1.0 / std::sqrt(p / static_cast<double>(pts.size()));
    for (Complex& c : pts) c *= scale;
}

Constellation make_psk(unsigned order, double offset) {
    Constellation c;
    c.points.resize(order);
    for (unsigned k = 0; k < order; ++k) {
        Complex z = std::polar(1.0, 2.0 * std::numbers::pi * k / order + offset);
        if (std::abs(z.real()) < 1e-15) z = Complex(0.0, std::copysign(1.0, z.imag()));
        if (std::abs(z.imag()) < 1e-15) z = Complex(std::copysign(1.0, z.real()), 0.0);
        c.points[gray(k)] = z;
    }
    c.bits_per_symbol = log2_exact(order);
    return c;
}

// Unipolar equally spaced levels 0, 1, ..., order-1, Gray indexed.
Constellation make_ask(unsigned order) {
    Constellation c;
    c.points.resize(order);
    for (unsigned k = 0; k < order; ++k) c.points[gray(k)] = Complex(static_cast<double>(k), 0.0);
    normalize_points(c.points);
    c.bits_per_symbol = log2_exact(order);
    return c;
}

Constellation make_square_qam(unsigned order) {
    const unsigned side = static_cast<unsigned>(std::lround(std::sqrt(static_cast<double>(order))));
    const int bits_axis = log2_exact(side);
    Constellation c;
    c.points.resize(order);
    for (unsigned i = 0; i < side; ++i) {
        for (unsigned q = 0; q < side; ++q) {
            const double re = 2.0 * i - (side - 1.0);
            const double im = 2.0 * q - (side - 1.0);
            c.points[(gray(i) << bits_axis) | gray(q)] = Complex(re, im);
        }
    }
    normalize_points(c.points);
    c.bits_per_symbol = log2_exact(order);
    return c;
}

// Cross constellation: a (side x side) grid with the four corner blocks
// beyond `limit` removed. Row-major order.
Constellation make_cross_qam(unsigned side, double limit) {
    Constellation c;
    for (unsigned i = 0; i < side; ++i) {
        for (unsigned q = 0; q < side; ++q) {
            const double re = 2.0 * i - (side - 1.0);
            const double im = 2.0 * q - (side - 1.0);
            if (std::abs(re) > limit && std::abs(im) > limit) continue;
            c.points.emplace_back(re, im);
        }
    }
    normalize_points(c.points);
    c.bits_per_symbol = log2_exact(c.points.size());
    return c;
}

struct Ring {
    unsigned count;
    double radius;
};

// Ring k carries `count` points at phase offset pi/count.
Constellation make_apsk(std::initializer_list<Ring> rings) {
    Constellation c;
    for (const Ring& r : rings) {
        for (unsigned k = 0; k < r.count; ++k) {
            const double phase = std::numbers::pi / r.count + 2.0 * std::numbers::pi * k / r.count;
            c.points.push_back(std::polar(r.radius, phase));
        }
    }
    normalize_points(c.points);
    c.bits_per_symbol = log2_exact(c.points.size());
    return c;
}

double rrc_value(double t, double alpha) noexcept {
    if (alpha == 0.0) return dsp::sinc(t);
    if (t == 0.0) return 1.0 - alpha + 4.0 * alpha / std::numbers::pi;
    const double x = 4.0 * alpha * t;
    if (std::abs(1.0 - x * x) < 1e-10) {
        const double a = std::numbers::pi / (4.0 * alpha);
        return alpha / std::numbers::sqrt2 *
               ((1.0 + 2.0 / std::numbers::pi) * std::sin(a) + (1.0 - 2.0 / std::numbers::pi) * std::cos(a));
    }
    const double pt = std::numbers::pi * t;
    return (std::sin(pt * (1.0 - alpha)) + x * std::cos(pt * (1.0 + alpha))) / (pt * (1.0 - x * x));
}

}  // namespace

std::string_view name(Modulation m) noexcept { return info(m).name; }

ModulationKind kind(Modulation m) noexcept { return info(m).kind; }

std::optional<Modulation> parse_modulation(std::string_view text) noexcept {
    for (const SchemeInfo& s : kSchemes) {
        if (s.name == text) return s.id;
    }
    return std::nullopt;
}

const std::vector<Modulation>& normal_classes() {
    static const std::vector<Modulation> v{Modulation::ook,       Modulation::ask4,      Modulation::bpsk,
                                           Modulation::qpsk,      Modulation::psk8,      Modulation::qam16,
                                           Modulation::am_ssb_sc, Modulation::am_dsb_sc, Modulation::fm,
                                           Modulation::gmsk,      Modulation::oqpsk};
    return v;
}

const std::vector<Modulation>& difficult_classes() {
    static const std::vector<Modulation> v = [] {
        std::vector<Modulation> all;
        for (const SchemeInfo& s : kSchemes) all.push_back(s.id);
        return all;
    }();
    return v;
}

Constellation constellation_for(Modulation m) {
    switch (m) {
        case Modulation::ook: {
            Constellation c{{Complex(0.0, 0.0), Complex(std::numbers::sqrt2, 0.0)}, 1};
            return c;
        }
        case Modulation::ask4: return make_ask(4);
        case Modulation::ask8: return make_ask(8);
        case Modulation::bpsk: return make_psk(2, 0.0);
        case Modulation::qpsk: return make_psk(4, std::numbers::pi / 4.0);
        case Modulation::psk8: return make_psk(8, 0.0);
        case Modulation::psk16: return make_psk(16, 0.0);
        case Modulation::psk32: return make_psk(32, 0.0);
        // DVB-S2 geometries for 16/32; DVB-S2X 8+16+20+20 for 64. 128 uses an
        // evenly spaced 8+24+40+56 ring layout.
        case Modulation::apsk16: return make_apsk({{4, 1.0}, {12, 2.57}});
        case Modulation::apsk32: return make_apsk({{4, 1.0}, {12, 2.53}, {16, 4.30}});
        case Modulation::apsk64: return make_apsk({{8, 1.0}, {16, 2.2}, {20, 3.6}, {20, 5.2}});
        case Modulation::apsk128: return make_apsk({{8, 1.0}, {24, 2.0}, {40, 3.0}, {56, 4.0}});
        case Modulation::qam16: return make_square_qam(16);
        case Modulation::qam32: return make_cross_qam(6, 3.0);
        case Modulation::qam64: return make_square_qam(64);
        case Modulation::qam128: return make_cross_qam(12, 7.0);
        case Modulation::qam256: return make_square_qam(256);
        default: break;
    }
    throw ConfigError("no constellation for " + std::string(name(m)));
}

void ShapingConfig::validate() const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("shaping: alpha must be in [0, 1]");
    if (sps < 2) throw ConfigError("shaping: sps must be >= 2");
    if (span_symbols < 4) throw ConfigError("shaping: span_symbols must be >= 4");
}

std::vector<double> rrc_taps(const ShapingConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.n_taps();
    const double half = static_cast<double>(n - 1) / 2.0;
    std::vector<double> h(n);
    double energy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        // Mirror the upper half so the taps are exactly symmetric.
        const std::size_t j = std::max(k, n - 1 - k);
        h[k] = rrc_value((static_cast<double>(j) - half) / cfg.sps, cfg.alpha);
    }
    for (double v : h) energy += v * v;
    const double scale = 1.0 / std::sqrt(energy);
    for (double& v : h) v *= scale;
    return h;
}

Waveform shape_symbols(std::span<const Complex> symbols, const ShapingConfig& cfg) {
    const auto h = rrc_taps(cfg);
    Waveform up(symbols.size() * static_cast<std::size_t>(cfg.sps), Complex{0.0, 0.0});
    for (std::size_t k = 0; k < symbols.size(); ++k) up[k * cfg.sps] = symbols[k];
    Waveform y = dsp::convolve(up, h);
    const double gain = std::sqrt(static_cast<double>(cfg.sps));
    for (Complex& v : y) v *= gain;
    return y;
}

Waveform modulate_linear(Modulation m, std::size_t n_symbols, const ShapingConfig& cfg,
                         RandomStream& rng, std::size_t min_length) {
    if (kind(m) != ModulationKind::linear_digital) {
        throw ConfigError("modulate_linear: " + std::string(name(m)) + " is not linear-digital");
    }
    cfg.validate();
    if (n_symbols * static_cast<std::size_t>(cfg.sps) < min_length) throw DataError("insufficient length");
    const Constellation c = constellation_for(m);
    std::vector<Complex> symbols(n_symbols);
    for (Complex& s : symbols) s = c.points[rng.below(c.points.size())];
    return shape_symbols(symbols, cfg);
}

Waveform shape_offset_qpsk(std::span<const double> i_symbols, std::span<const double> q_symbols,
                           const ShapingConfig& cfg) {
    cfg.validate();
    if (cfg.sps % 2 != 0) throw ConfigError("sps must be even for OQPSK");
    if (i_symbols.size() != q_symbols.size()) throw ConfigError("OQPSK arms must have equal length");
    std::vector<Complex> si(i_symbols.size()), sq(q_symbols.size());
    for (std::size_t k = 0; k < si.size(); ++k) {
        si[k] = Complex(i_symbols[k] / std::numbers::sqrt2, 0.0);
        sq[k] = Complex(q_symbols[k] / std::numbers::sqrt2, 0.0);
    }
    const Waveform wi = shape_symbols(si, cfg);
    const Waveform wq = shape_symbols(sq, cfg);
    const std::size_t delay = static_cast<std::size_t>(cfg.sps / 2);
    Waveform y(wi.size() + delay, Complex{0.0, 0.0});
    for (std::size_t n = 0; n < wi.size(); ++n) {
        y[n] += wi[n];
        y[n + delay] += Complex(0.0, wq[n].real());
    }
    return y;
}

Waveform modulate_offset_qpsk(std::size_t n_symbols, const ShapingConfig& cfg, RandomStream& rng) {
    std::vector<double> si(n_symbols), sq(n_symbols);
    for (std::size_t k = 0; k < n_symbols; ++k) {
        si[k] = (rng.next_u32() & 1u) ? 1.0 : -1.0;
        sq[k] = (rng.next_u32() & 1u) ? 1.0 : -1.0;
    }
    return shape_offset_qpsk(si, sq, cfg);
}

std::vector<double> gmsk_frequency_pulse(int sps, double bt) {
    if (sps < 2) throw ConfigError("gmsk: sps must be >= 2");
    if (std::isinf(bt) && bt > 0) return std::vector<double>(static_cast<std::size_t>(sps), 1.0 / sps);
    if (!(bt > 0.0 && bt <= 1.0)) throw ConfigError("gmsk: bt must be in (0, 1]");
    const int span = std::max(4, static_cast<int>(std::ceil(1.5 / bt)));
    const std::size_t n = static_cast<std::size_t>(span * sps);
    const double k = 2.0 * std::numbers::pi * bt / std::sqrt(std::numbers::ln2);
    auto q = [](double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); };
    std::vector<double> g(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (static_cast<double>(i) + 0.5) / sps - span / 2.0;
        g[i] = q(k * (t - 0.5)) - q(k * (t + 0.5));
        sum += g[i];
    }
    for (double& v : g) v /= sum;
    return g;
}

Waveform gmsk_from_bits(std::span<const std::uint8_t> bits, int sps, double bt) {
    const auto pulse = gmsk_frequency_pulse(sps, bt);
    std::vector<double> up(bits.size() * static_cast<std::size_t>(sps), 0.0);
    for (std::size_t k = 0; k < bits.size(); ++k) up[k * sps] = bits[k] ? 1.0 : -1.0;
    const auto freq = dsp::convolve(up, pulse);
    Waveform y(freq.size());
    double phase = 0.0;
    for (std::size_t n = 0; n < freq.size(); ++n) {
        phase += 0.5 * std::numbers::pi * freq[n];
        y[n] = std::polar(1.0, phase);
    }
    return y;
}

Waveform modulate_gmsk(std::size_t n_symbols, int sps, double bt, RandomStream& rng) {
    std::vector<std::uint8_t> bits(n_symbols);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u32() & 1u);
    return gmsk_from_bits(bits, sps, bt);
}

void ModemConfig::validate() const {
    if (sps < 2 || sps > 32) throw ConfigError("modem: sps must be in [2, 32]");
    if (span_symbols < 4) throw ConfigError("modem: span_symbols must be >= 4");
    if (!(gmsk_bt > 0.0 && gmsk_bt <= 1.0)) throw ConfigError("modem: gmsk_bt must be in (0, 1]");
    analog.validate();
}

Waveform synthesize(Modulation m, std::size_t n_samples, double alpha, const ModemConfig& cfg,
                    RandomStream& rng) {
    const std::size_t sps = static_cast<std::size_t>(cfg.sps);
    const ShapingConfig shaping{alpha, cfg.sps, cfg.span_symbols};
    std::size_t start = 0;
    Waveform w;
    switch (kind(m)) {
        case ModulationKind::linear_digital: {
            const std::size_t n_sym = cfg.span_symbols + (n_samples + sps - 1) / sps + 1;
            w = modulate_linear(m, n_sym, shaping, rng);
            start = static_cast<std::size_t>(cfg.span_symbols) * sps;
            break;
        }
        case ModulationKind::offset_digital: {
            const std::size_t n_sym = cfg.span_symbols + (n_samples + sps - 1) / sps + 2;
            w = modulate_offset_qpsk(n_sym, shaping, rng);
            start = static_cast<std::size_t>(cfg.span_symbols) * sps + sps / 2;
            break;
        }
        case ModulationKind::continuous_phase: {
            const std::size_t pulse_len = gmsk_frequency_pulse(cfg.sps, cfg.gmsk_bt).size();
            const std::size_t n_sym = (pulse_len + n_samples + sps - 1) / sps + 1;
            w = modulate_gmsk(n_sym, cfg.sps, cfg.gmsk_bt, rng);
            start = pulse_len;
            break;
        }
        case ModulationKind::analog:
            return modulate_analog(m, n_samples, cfg.analog, rng);
    }
    if (w.size() < start + n_samples) throw DataError("insufficient length");
    return Waveform(w.begin() + static_cast<std::ptrdiff_t>(start),
                    w.begin() + static_cast<std::ptrdiff_t>(start + n_samples));
}

}  // namespace rfforge
