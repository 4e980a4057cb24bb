#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfforge/sigcore.hpp"

namespace rfforge {

inline constexpr std::size_t kFeatureCount = 28;
inline constexpr std::size_t kMomentFeatureCount = 19;

/// Sample mean of x^(p-q) * conj(x)^q. Valid for p in {2, 4, 6}, 0 <= q <= p.
Complex hom(std::span<const Complex> x, int p, int q);

/// Every moment needed by the cumulant expansions, gathered in one pass.
struct MomentSet {
    Complex m20, m21, m22;
    Complex m40, m41, m42, m43;
    Complex m60, m61, m62, m63;
};

MomentSet moments(std::span<const Complex> x) noexcept;

/// Raw complex cumulants of a zero-mean complex process.
struct CumulantSet {
    Complex c20, c21;
    Complex c40, c41, c42;
    Complex c60, c61, c62, c63;
};

CumulantSet cumulants_from_moments(const MomentSet& m) noexcept;
CumulantSet hoc(std::span<const Complex> x) noexcept;

/// |v|^(2/order): the square-root convention generalized to any order.
double order_normalized(Complex v, int order) noexcept;

struct AnalogStats {
    double amp_mean = 0.0, amp_std = 0.0, amp_kurtosis = 0.0;
    double phase_mean = 0.0, phase_std = 0.0, phase_kurtosis = 0.0;
    double freq_mean = 0.0, freq_std = 0.0, freq_kurtosis = 0.0;
    bool degenerate = false;  // some series had zero variance

    std::array<double, 9> values() const noexcept;
};

/// Mean, standard deviation and Pearson kurtosis of the normalized centered
/// amplitude, the centered unwrapped phase and the instantaneous frequency
/// (cycles/sample). Requires at least 16 samples.
AnalogStats analog_stats(std::span<const Complex> x);

/// Same statistics for |f_n| / mean|f| - 1. Not part of the canonical vector.
std::array<double, 3> abs_normalized_freq_stats(std::span<const Complex> x);

/// Mean/std/Pearson-kurtosis of a real series. Kurtosis of a zero-variance
/// series is reported as 0 and flagged.
struct SeriesStats {
    double mean = 0.0, stddev = 0.0, kurtosis = 0.0;
    bool degenerate = false;
};
SeriesStats series_stats(std::span<const double> v) noexcept;

/// Unwrapped phase of x (standard ±π jump correction).
std::vector<double> unwrapped_phase(std::span<const Complex> x);

struct FeatureVector {
    std::array<double, kFeatureCount> values{};

    static const std::array<std::string_view, kFeatureCount>& names() noexcept;
    double operator[](std::size_t i) const noexcept { return values[i]; }
};

/// Normalize, then 10 moment and 9 cumulant magnitudes followed by the 9
/// analog statistics.
FeatureVector featurize(std::span<const Complex> x);
FeatureVector featurize(const IqExample& example);
std::vector<FeatureVector> featurize_batch(std::span<const IqExample> examples, unsigned workers = 1);

/// Dense float feature table with per-row labels and SNRs.
struct FeatureTable {
    std::size_t rows = 0;
    std::size_t cols = kFeatureCount;
    std::vector<float> values;  // row-major rows x cols
    std::vector<std::uint16_t> labels;
    std::vector<float> snr_db;

    std::span<const float> row(std::size_t r) const noexcept {
        return std::span<const float>(values).subspan(r * cols, cols);
    }
    void append(const FeatureVector& fv, std::uint16_t label, double snr);
    /// Rows selected by index, in the given order.
    FeatureTable select(std::span<const std::size_t> indices) const;
};

/// Free-form sidecar contents carried with a feature table file.
struct FeatureFileInfo {
    std::vector<std::string> class_names;
    std::string source_dataset;
    std::string config_hash;
};

/// RFFT little-endian binary plus "<path>.json" sidecar.
void write_feature_file(const std::string& path, const FeatureTable& table, const FeatureFileInfo& info);
FeatureTable read_feature_file(const std::string& path, FeatureFileInfo* info = nullptr);

}  // namespace rfforge
