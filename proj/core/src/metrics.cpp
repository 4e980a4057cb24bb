#include "rfforge/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "rfforge/errors.hpp"

namespace rfforge {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& path) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError("bad number '" + s + "' in " + path);
    }
}

std::uint64_t parse_count(const std::string& s, const std::string& path) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw DataError("bad count '" + s + "' in " + path);
    return v;
}

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void check_lengths(std::size_t a, std::size_t b, std::size_t c) {
    if (a != b || a != c) throw DataError("metrics: length mismatch");
}

std::vector<double> average_ranks(std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[idx[k]] = rank;
        i = j + 1;
    }
    return r;
}

}  // namespace

double SnrCurve::accuracy_at(double snr_db) const {
    for (const SnrBin& b : bins) {
        if (b.snr_db == snr_db) return b.accuracy;
    }
    throw DataError("no SNR bin at " + format_number(snr_db) + " dB");
}

double SnrCurve::accuracy_above(double snr_min) const {
    std::size_t n = 0, correct = 0;
    for (const SnrBin& b : bins) {
        if (b.snr_db >= snr_min) {
            n += b.n;
            correct += b.correct;
        }
    }
    if (n == 0) throw DataError("no examples at or above " + format_number(snr_min) + " dB");
    return static_cast<double>(correct) / static_cast<double>(n);
}

std::size_t SnrCurve::total() const noexcept {
    std::size_t n = 0;
    for (const SnrBin& b : bins) n += b.n;
    return n;
}

double snr_bin_center(double snr_db, double bin_width) noexcept {
    if (!std::isfinite(snr_db)) return snr_db;
    const double c = std::round(snr_db / bin_width) * bin_width;
    return c == 0.0 ? 0.0 : c;  // no -0
}

SnrCurve accuracy_by_snr(std::span<const int> predictions, std::span<const int> truths,
                         std::span<const double> snr_db, double bin_width) {
    check_lengths(predictions.size(), truths.size(), snr_db.size());
    if (!(bin_width > 0.0)) throw ConfigError("accuracy_by_snr: bin width must be > 0");
    std::map<double, std::pair<std::size_t, std::size_t>> acc;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (std::isnan(snr_db[i])) throw DataError("accuracy_by_snr: NaN SNR");
        auto& [n, c] = acc[snr_bin_center(snr_db[i], bin_width)];
        ++n;
        c += predictions[i] == truths[i] ? 1 : 0;
    }
    SnrCurve curve;
    for (const auto& [snr, nc] : acc) {
        curve.bins.push_back({snr, nc.first, nc.second,
                              static_cast<double>(nc.second) / static_cast<double>(nc.first)});
    }
    return curve;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t truth) const {
    std::uint64_t s = 0;
    for (std::size_t p = 0; p < n_classes(); ++p) s += at(truth, p);
    return s;
}

std::uint64_t ConfusionMatrix::total() const noexcept {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t s = 0;
    for (std::size_t k = 0; k < n_classes(); ++k) s += at(k, k);
    return s;
}

double ConfusionMatrix::accuracy() const {
    const auto t = total();
    if (t == 0) throw DataError("confusion matrix is empty");
    return static_cast<double>(trace()) / static_cast<double>(t);
}

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const int> truths,
                          std::span<const double> snr_db, double snr_min, std::vector<std::string> class_names) {
    check_lengths(predictions.size(), truths.size(), snr_db.size());
    ConfusionMatrix cm;
    cm.class_names = std::move(class_names);
    cm.snr_min = snr_min;
    const std::size_t k = cm.n_classes();
    cm.counts.assign(k * k, 0);
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (!(snr_db[i] >= snr_min)) continue;
        const int t = truths[i], p = predictions[i];
        if (t < 0 || p < 0 || static_cast<std::size_t>(t) >= k || static_cast<std::size_t>(p) >= k) {
            throw DataError("confusion: class index out of range");
        }
        ++cm.counts[static_cast<std::size_t>(t) * k + static_cast<std::size_t>(p)];
    }
    return cm;
}

double accuracy(std::span<const int> predictions, std::span<const int> truths) {
    if (predictions.size() != truths.size()) throw DataError("accuracy: length mismatch");
    if (predictions.empty()) throw DataError("accuracy: no examples");
    std::size_t c = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) c += predictions[i] == truths[i] ? 1 : 0;
    return static_cast<double>(c) / static_cast<double>(predictions.size());
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("spearman: length mismatch");
    if (x.size() < 2) throw DataError("spearman: need at least two points");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw NumericError("spearman: constant input");
    return sxy / std::sqrt(sxx * syy);
}

void write_curve_csv(const std::string& path, const SnrCurve& curve) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot open " + path + " for writing");
    os << "snr_db,n,accuracy\n";
    for (const SnrBin& b : curve.bins) os << format_number(b.snr_db) << ',' << b.n << ',' << format_number(b.accuracy) << '\n';
    if (!os) throw DataError("short write to " + path);
}

SnrCurve read_curve_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open " + path);
    std::string line;
    if (!std::getline(is, line) || line != "snr_db,n,accuracy") throw DataError("bad curve header in " + path);
    SnrCurve curve;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 3) throw DataError("bad curve row in " + path);
        SnrBin b;
        b.snr_db = parse_double(cells[0], path);
        b.n = parse_count(cells[1], path);
        b.accuracy = parse_double(cells[2], path);
        b.correct = static_cast<std::size_t>(std::llround(b.accuracy * static_cast<double>(b.n)));
        curve.bins.push_back(b);
    }
    return curve;
}

void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm) {
    for (const auto& n : cm.class_names) {
        if (n.find(',') != std::string::npos) throw DataError("class name contains a comma: " + n);
    }
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot open " + path + " for writing");
    os << "truth/pred";
    for (const auto& n : cm.class_names) os << ',' << n;
    os << '\n';
    for (std::size_t t = 0; t < cm.n_classes(); ++t) {
        os << cm.class_names[t];
        for (std::size_t p = 0; p < cm.n_classes(); ++p) os << ',' << cm.at(t, p);
        os << '\n';
    }
    if (!os) throw DataError("short write to " + path);
}

ConfusionMatrix read_confusion_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open " + path);
    std::string line;
    if (!std::getline(is, line)) throw DataError("empty confusion file " + path);
    auto header = split_csv_line(line);
    if (header.size() < 2 || header[0] != "truth/pred") throw DataError("bad confusion header in " + path);
    ConfusionMatrix cm;
    cm.class_names.assign(header.begin() + 1, header.end());
    const std::size_t k = cm.n_classes();
    cm.counts.reserve(k * k);
    for (std::size_t t = 0; t < k; ++t) {
        if (!std::getline(is, line)) throw DataError("truncated confusion file " + path);
        const auto cells = split_csv_line(line);
        if (cells.size() != k + 1 || cells[0] != cm.class_names[t]) throw DataError("bad confusion row in " + path);
        for (std::size_t p = 0; p < k; ++p) cm.counts.push_back(parse_count(cells[p + 1], path));
    }
    return cm;
}

}  // namespace rfforge
