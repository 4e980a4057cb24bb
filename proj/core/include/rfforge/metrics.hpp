#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace rfforge {

struct SnrBin {
    double snr_db = 0.0;  // bin center
    std::size_t n = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;

    bool operator==(const SnrBin&) const = default;
};

struct SnrCurve {
    std::vector<SnrBin> bins;  // ascending SNR

    /// Accuracy of the bin centered at snr_db; throws DataError if absent.
    double accuracy_at(double snr_db) const;
    /// Pooled accuracy over bins with center >= snr_min.
    double accuracy_above(double snr_min) const;
    std::size_t total() const noexcept;
};

/// Bin center for an SNR: round(snr / width) * width. Infinite SNRs keep
/// their own bin.
double snr_bin_center(double snr_db, double bin_width) noexcept;

SnrCurve accuracy_by_snr(std::span<const int> predictions, std::span<const int> truths,
                         std::span<const double> snr_db, double bin_width = 2.0);

struct ConfusionMatrix {
    std::vector<std::string> class_names;
    std::vector<std::uint64_t> counts;  // row = truth, column = prediction
    double snr_min = -std::numeric_limits<double>::infinity();

    std::size_t n_classes() const noexcept { return class_names.size(); }
    std::uint64_t at(std::size_t truth, std::size_t pred) const { return counts.at(truth * n_classes() + pred); }
    std::uint64_t row_sum(std::size_t truth) const;
    std::uint64_t total() const noexcept;
    std::uint64_t trace() const;
    double accuracy() const;
};

/// Counts over examples with snr >= snr_min.
ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> truths,
                          std::span<const double> snr_db, double snr_min, std::vector<std::string> class_names);

/// Fraction of equal entries.
double accuracy(std::span<const int> predictions, std::span<const int> truths);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

void write_curve_csv(const std::string& path, const SnrCurve& curve);
SnrCurve read_curve_csv(const std::string& path);
void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm);
ConfusionMatrix read_confusion_csv(const std::string& path);

}  // namespace rfforge
