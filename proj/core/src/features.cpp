#include "rfforge/features.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "rfforge/errors.hpp"

namespace rfforge {

namespace {

Complex ipow(Complex v, int n) noexcept {
    Complex r{1.0, 0.0};
    for (int k = 0; k < n; ++k) r *= v;
    return r;
}

}  // namespace

Complex hom(std::span<const Complex> x, int p, int q) {
    if (!(p == 2 || p == 4 || p == 6) || q < 0 || q > p) {
        throw ConfigError("hom: invalid order (" + std::to_string(p) + "," + std::to_string(q) + ")");
    }
    if (x.empty()) throw DataError("hom: empty input");
    // x^(p-q) conj(x)^q = x^(p-2q) |x|^(2q) when p >= 2q, else conj(x)^(2q-p) |x|^(2(p-q)).
    const bool forward = p - q >= q;
    const int rot = forward ? p - 2 * q : 2 * q - p;
    const int mag = forward ? q : p - q;
    Complex acc{0.0, 0.0};
    for (const Complex& v : x) {
        const double a = std::norm(v);
        double am = 1.0;
        for (int k = 0; k < mag; ++k) am *= a;
        acc += ipow(forward ? v : std::conj(v), rot) * am;
    }
    return acc / static_cast<double>(x.size());
}

MomentSet moments(std::span<const Complex> x) noexcept {
    MomentSet s{};
    if (x.empty()) return s;
    Complex m20{}, m40{}, m41{}, m60{}, m61{}, m62{};
    double m21 = 0.0, m42 = 0.0, m63 = 0.0;
    for (const Complex& v : x) {
        const Complex x2 = v * v;
        const Complex x4 = x2 * x2;
        const double a = std::norm(v);
        const double a2 = a * a;
        m20 += x2;
        m21 += a;
        m40 += x4;
        m41 += x2 * a;
        m42 += a2;
        m60 += x4 * x2;
        m61 += x4 * a;
        m62 += x2 * a2;
        m63 += a2 * a;
    }
    const double inv = 1.0 / static_cast<double>(x.size());
    s.m20 = m20 * inv;
    s.m21 = Complex(m21 * inv, 0.0);
    s.m22 = std::conj(s.m20);
    s.m40 = m40 * inv;
    s.m41 = m41 * inv;
    s.m42 = Complex(m42 * inv, 0.0);
    s.m43 = std::conj(s.m41);
    s.m60 = m60 * inv;
    s.m61 = m61 * inv;
    s.m62 = m62 * inv;
    s.m63 = Complex(m63 * inv, 0.0);
    return s;
}

CumulantSet cumulants_from_moments(const MomentSet& m) noexcept {
    CumulantSet c;
    c.c20 = m.m20;
    c.c21 = m.m21;
    c.c40 = m.m40 - 3.0 * m.m20 * m.m20;
    c.c41 = m.m41 - 3.0 * m.m20 * m.m21;
    c.c42 = m.m42 - std::norm(m.m20) - 2.0 * m.m21 * m.m21;
    c.c60 = m.m60 - 15.0 * m.m40 * m.m20 + 30.0 * m.m20 * m.m20 * m.m20;
    c.c61 = m.m61 - 5.0 * m.m21 * m.m40 - 10.0 * m.m20 * m.m41 + 30.0 * m.m20 * m.m20 * m.m21;
    c.c62 = m.m62 - 6.0 * m.m20 * m.m42 - 8.0 * m.m21 * m.m41 - m.m22 * m.m40 +
            6.0 * m.m20 * m.m20 * m.m22 + 24.0 * m.m21 * m.m21 * m.m20;
    c.c63 = m.m63 - 9.0 * m.m21 * m.m42 + 12.0 * m.m21 * m.m21 * m.m21 - 3.0 * m.m20 * m.m43 -
            3.0 * m.m22 * m.m41 + 18.0 * m.m20 * m.m21 * m.m22;
    return c;
}

CumulantSet hoc(std::span<const Complex> x) noexcept { return cumulants_from_moments(moments(x)); }

double order_normalized(Complex v, int order) noexcept {
    return std::pow(std::abs(v), 2.0 / static_cast<double>(order));
}

SeriesStats series_stats(std::span<const double> v) noexcept {
    SeriesStats s;
    if (v.empty()) {
        s.degenerate = true;
        return s;
    }
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double x : v) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    s.mean = mean;
    s.stddev = std::sqrt(m2);
    if (m2 <= 1e-24) {
        s.kurtosis = 0.0;
        s.degenerate = true;
    } else {
        s.kurtosis = m4 / (m2 * m2);
    }
    return s;
}

std::vector<double> unwrapped_phase(std::span<const Complex> x) {
    std::vector<double> phi(x.size());
    double prev_raw = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
        const double raw = std::arg(x[n]);
        if (n == 0) {
            phi[0] = raw;
        } else {
            double d = raw - prev_raw;
            if (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
            else if (d <= -std::numbers::pi) d += 2.0 * std::numbers::pi;
            phi[n] = phi[n - 1] + d;
        }
        prev_raw = raw;
    }
    return phi;
}

std::array<double, 9> AnalogStats::values() const noexcept {
    return {amp_mean, amp_std, amp_kurtosis, phase_mean, phase_std, phase_kurtosis, freq_mean, freq_std, freq_kurtosis};
}

AnalogStats analog_stats(std::span<const Complex> x) {
    if (x.size() < 16) throw DataError("analog_stats: need at least 16 samples");
    const std::size_t n = x.size();
    std::vector<double> series(n);

    double mean_abs = 0.0;
    for (const Complex& v : x) mean_abs += std::abs(v);
    mean_abs /= static_cast<double>(n);

    AnalogStats out;
    if (mean_abs > 0.0) {
        for (std::size_t k = 0; k < n; ++k) series[k] = std::abs(x[k]) / mean_abs - 1.0;
    } else {
        std::fill(series.begin(), series.end(), 0.0);
    }
    const SeriesStats amp = series_stats(series);

    const std::vector<double> phi = unwrapped_phase(x);
    double phi_mean = 0.0;
    for (double v : phi) phi_mean += v;
    phi_mean /= static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) series[k] = phi[k] - phi_mean;
    const SeriesStats phase = series_stats(series);

    series.resize(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) series[k] = (phi[k + 1] - phi[k]) / (2.0 * std::numbers::pi);
    const SeriesStats freq = series_stats(series);

    out.amp_mean = amp.mean;
    out.amp_std = amp.stddev;
    out.amp_kurtosis = amp.kurtosis;
    out.phase_mean = phase.mean;
    out.phase_std = phase.stddev;
    out.phase_kurtosis = phase.kurtosis;
    out.freq_mean = freq.mean;
    out.freq_std = freq.stddev;
    out.freq_kurtosis = freq.kurtosis;
    out.degenerate = amp.degenerate || phase.degenerate || freq.degenerate;
    return out;
}

std::array<double, 3> abs_normalized_freq_stats(std::span<const Complex> x) {
    if (x.size() < 16) throw DataError("abs_normalized_freq_stats: need at least 16 samples");
    const std::vector<double> phi = unwrapped_phase(x);
    std::vector<double> f(phi.size() - 1);
    double mean_abs = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        f[k] = std::abs(phi[k + 1] - phi[k]) / (2.0 * std::numbers::pi);
        mean_abs += f[k];
    }
    mean_abs /= static_cast<double>(f.size());
    for (double& v : f) v = mean_abs > 0.0 ? v / mean_abs - 1.0 : 0.0;
    const SeriesStats s = series_stats(f);
    return {s.mean, s.stddev, s.kurtosis};
}

const std::array<std::string_view, kFeatureCount>& FeatureVector::names() noexcept {
    static constexpr std::array<std::string_view, kFeatureCount> kNames{
        "M20", "M21", "M40", "M41", "M42", "M43", "M60", "M61", "M62", "M63",
        "C20", "C21", "C40", "C41", "C42", "C60", "C61", "C62", "C63",
        "amp_mean", "amp_std", "amp_kurtosis",
        "phase_mean", "phase_std", "phase_kurtosis",
        "freq_mean", "freq_std", "freq_kurtosis"};
    return kNames;
}

FeatureVector featurize(std::span<const Complex> raw) {
    const Waveform x = normalize(raw);
    const MomentSet m = moments(x);
    const CumulantSet c = cumulants_from_moments(m);
    FeatureVector fv;
    auto& v = fv.values;
    v[0] = order_normalized(m.m20, 2);
    v[1] = order_normalized(m.m21, 2);
    v[2] = order_normalized(m.m40, 4);
    v[3] = order_normalized(m.m41, 4);
    v[4] = order_normalized(m.m42, 4);
    v[5] = order_normalized(m.m43, 4);
    v[6] = order_normalized(m.m60, 6);
    v[7] = order_normalized(m.m61, 6);
    v[8] = order_normalized(m.m62, 6);
    v[9] = order_normalized(m.m63, 6);
    v[10] = order_normalized(c.c20, 2);
    v[11] = order_normalized(c.c21, 2);
    v[12] = order_normalized(c.c40, 4);
    v[13] = order_normalized(c.c41, 4);
    v[14] = order_normalized(c.c42, 4);
    v[15] = order_normalized(c.c60, 6);
    v[16] = order_normalized(c.c61, 6);
    v[17] = order_normalized(c.c62, 6);
    v[18] = order_normalized(c.c63, 6);
    const auto a = analog_stats(x).values();
    std::copy(a.begin(), a.end(), v.begin() + kMomentFeatureCount);
    for (double f : v) {
        if (!std::isfinite(f)) throw NumericError("featurize: non-finite feature");
    }
    return fv;
}

FeatureVector featurize(const IqExample& example) { return featurize(example.samples); }

std::vector<FeatureVector> featurize_batch(std::span<const IqExample> examples, unsigned workers) {
    std::vector<FeatureVector> out(examples.size());
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(examples.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < examples.size(); ++i) out[i] = featurize(examples[i]);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < examples.size();) {
                try {
                    out[i] = featurize(examples[i]);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

void FeatureTable::append(const FeatureVector& fv, std::uint16_t label, double snr) {
    if (cols != kFeatureCount) throw DataError("FeatureTable::append: column count mismatch");
    for (double v : fv.values) values.push_back(static_cast<float>(v));
    labels.push_back(label);
    snr_db.push_back(static_cast<float>(snr));
    ++rows;
}

FeatureTable FeatureTable::select(std::span<const std::size_t> indices) const {
    FeatureTable t;
    t.cols = cols;
    t.rows = indices.size();
    t.values.reserve(indices.size() * cols);
    t.labels.reserve(indices.size());
    t.snr_db.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= rows) throw DataError("FeatureTable::select: index out of range");
        const auto r = row(i);
        t.values.insert(t.values.end(), r.begin(), r.end());
        t.labels.push_back(labels[i]);
        t.snr_db.push_back(snr_db[i]);
    }
    return t;
}

}  // namespace rfforge
