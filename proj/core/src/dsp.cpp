#include "rfforge/dsp.hpp"

#include <cmath>
#include <numbers>

#include "rfforge/errors.hpp"

namespace rfforge::dsp {

namespace {

constexpr double kInterpBeta = 8.6;
constexpr int kPhases = 1024;

struct PolyphaseTable {
    // rows[p][j] = kernel(p / kPhases - (j - (kInterpHalfWidth - 1)))
    std::vector<std::array<double, kInterpWidth>> rows;

    PolyphaseTable() : rows(kPhases + 1) {
        for (int p = 0; p <= kPhases; ++p) {
            const double mu = static_cast<double>(p) / kPhases;
            for (int j = 0; j < kInterpWidth; ++j) {
                const int offset = j - (kInterpHalfWidth - 1);
                rows[p][j] = interp_kernel(mu - offset);
            }
        }
    }
};

const PolyphaseTable& table() {
    static const PolyphaseTable t;
    return t;
}

}  // namespace

double sinc(double x) noexcept {
    if (x == 0.0) return 1.0;
    if (x == std::floor(x)) return 0.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

double bessel_i0(double x) noexcept {
    // Power series; converges quickly for the beta range used here.
    double sum = 1.0;
    double term = 1.0;
    const double q = x * x / 4.0;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

double kaiser(double u, double beta) noexcept {
    if (u < -1.0 || u > 1.0) return 0.0;
    return bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - u * u))) / bessel_i0(beta);
}

double interp_kernel(double u) noexcept {
    if (std::abs(u) >= kInterpHalfWidth) return 0.0;
    return sinc(u) * kaiser(u / kInterpHalfWidth, kInterpBeta);
}

std::array<double, kInterpWidth> interp_taps(double mu) noexcept {
    const auto& rows = table().rows;
    const double pos = mu * kPhases;
    int p = static_cast<int>(pos);
    if (p >= kPhases) p = kPhases - 1;
    if (p < 0) p = 0;
    const double w = pos - p;
    std::array<double, kInterpWidth> out;
    if (w == 0.0) return rows[p];
    for (int j = 0; j < kInterpWidth; ++j) out[j] = rows[p][j] + w * (rows[p + 1][j] - rows[p][j]);
    return out;
}

Complex interpolate(std::span<const Complex> x, double t) noexcept {
    const double base = std::floor(t);
    const auto taps = interp_taps(t - base);
    const long i0 = static_cast<long>(base) - (kInterpHalfWidth - 1);
    const long n = static_cast<long>(x.size());
    Complex acc{0.0, 0.0};
    if (i0 >= 0 && i0 + kInterpWidth <= n) {
        const Complex* p = x.data() + i0;
        for (int j = 0; j < kInterpWidth; ++j) acc += taps[j] * p[j];
        return acc;
    }
    for (int j = 0; j < kInterpWidth; ++j) {
        const long k = i0 + j;
        if (k >= 0 && k < n) acc += taps[j] * x[static_cast<std::size_t>(k)];
    }
    return acc;
}

Waveform convolve(std::span<const Complex> x, std::span<const double> h) {
    if (x.empty() || h.empty()) return {};
    Waveform y(x.size() + h.size() - 1, Complex{0.0, 0.0});
    for (std::size_t n = 0; n < x.size(); ++n) {
        const Complex v = x[n];
        if (v == Complex{0.0, 0.0}) continue;
        Complex* out = y.data() + n;
        for (std::size_t k = 0; k < h.size(); ++k) out[k] += h[k] * v;
    }
    return y;
}

std::vector<double> convolve(std::span<const double> x, std::span<const double> h) {
    if (x.empty() || h.empty()) return {};
    std::vector<double> y(x.size() + h.size() - 1, 0.0);
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double v = x[n];
        double* out = y.data() + n;
        for (std::size_t k = 0; k < h.size(); ++k) out[k] += h[k] * v;
    }
    return y;
}

std::vector<double> lowpass_taps(double cutoff, int n_taps, double kaiser_beta) {
    if (n_taps < 3 || n_taps % 2 == 0) throw ConfigError("lowpass_taps: n_taps must be odd and >= 3");
    if (!(cutoff > 0.0 && cutoff < 0.5)) throw ConfigError("lowpass_taps: cutoff must be in (0, 0.5)");
    const int half = n_taps / 2;
    std::vector<double> h(static_cast<std::size_t>(n_taps));
    double sum = 0.0;
    for (int k = -half; k <= half; ++k) {
        const double v = 2.0 * cutoff * sinc(2.0 * cutoff * k) *
                         kaiser(static_cast<double>(k) / half, kaiser_beta);
        h[static_cast<std::size_t>(k + half)] = v;
        sum += v;
    }
    for (double& v : h) v /= sum;
    return h;
}

std::vector<double> hilbert_taps(int n_taps, double kaiser_beta) {
    if (n_taps < 3 || n_taps % 2 == 0) throw ConfigError("hilbert_taps: n_taps must be odd and >= 3");
    const int half = n_taps / 2;
    std::vector<double> h(static_cast<std::size_t>(n_taps), 0.0);
    for (int k = -half; k <= half; ++k) {
        if (k % 2 == 0) continue;
        h[static_cast<std::size_t>(k + half)] =
            2.0 / (std::numbers::pi * k) * kaiser(static_cast<double>(k) / half, kaiser_beta);
    }
    return h;
}

}  // namespace rfforge::dsp
