#include "rfforge/sigcore.hpp"

#include <cmath>

#include "rfforge/errors.hpp"

namespace rfforge {

double mean_power(std::span<const Complex> x) noexcept {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (const Complex& v : x) acc += std::norm(v);
    return acc / static_cast<double>(x.size());
}

Waveform normalize(std::span<const Complex> x) {
    const double p = mean_power(x);
    if (x.empty() || !(p > 0.0)) throw NumericError("degenerate example");
    if (!std::isfinite(p)) throw NumericError("non-finite example power");
    const double scale = 1.0 / std::sqrt(p);
    Waveform out(x.begin(), x.end());
    for (Complex& v : out) v *= scale;
    return out;
}

IqExample normalize(IqExample example) {
    example.samples = normalize(example.samples);
    return example;
}

double measure_snr(std::span<const Complex> clean, std::span<const Complex> noisy) {
    if (clean.size() != noisy.size()) throw DataError("measure_snr: length mismatch");
    double sig = 0.0;
    double res = 0.0;
    for (std::size_t n = 0; n < clean.size(); ++n) {
        sig += std::norm(clean[n]);
        res += std::norm(noisy[n] - clean[n]);
    }
    if (res == 0.0) return kInfiniteSnr;
    return 10.0 * std::log10(sig / res);
}

double measure_snr(const IqExample& clean, const IqExample& noisy) {
    return measure_snr(clean.samples, noisy.samples);
}

}  // namespace rfforge
