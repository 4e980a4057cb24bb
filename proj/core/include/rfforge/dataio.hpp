#pragma once

#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "rfforge/sigcore.hpp"

namespace rfforge {

inline constexpr std::uint32_t kRscdVersion = 1;
inline constexpr std::size_t kRscdHeaderBytes = 24;
/// End-of-file marker; a file without it was not finalized.
inline constexpr char kRscdSentinel[4] = {'R', 'S', 'C', 'E'};

/// 2 (label) + 4 (snr) + 28 (params) + 8 per complex sample.
constexpr std::size_t rscd_record_bytes(std::size_t length) noexcept { return 34 + 8 * length; }
constexpr std::size_t rscd_file_bytes(std::size_t n, std::size_t length) noexcept {
    return kRscdHeaderBytes + n * rscd_record_bytes(length) + 4;
}

/// "<dataset>.json"
std::string manifest_path(const std::string& dataset_path);

struct DatasetManifest {
    std::uint32_t format_version = kRscdVersion;
    std::string composition = "custom";  // "normal", "difficult" or "custom"
    std::vector<std::string> class_names;
    std::uint64_t n_examples = 0;
    std::uint32_t length = 0;
    std::vector<double> snr_grid;
    std::uint64_t master_seed = 0;
    std::string assignment = "round_robin";
    std::string config_json;  // full producing configuration, canonical JSON
    std::string config_hash;

    std::size_t n_classes() const noexcept { return class_names.size(); }
    void validate() const;
    std::string to_json() const;
    static DatasetManifest from_json(const std::string& text);
    bool operator==(const DatasetManifest&) const = default;
};

void write_manifest(const std::string& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::string& path);

/// Round-robin assignment: class cycles fastest, then the SNR grid.
std::uint16_t assigned_label(std::uint64_t index, std::size_t n_classes) noexcept;
double assigned_snr(std::uint64_t index, std::size_t n_classes, std::span<const double> grid) noexcept;

/// Streams records to disk. The sentinel and manifest are written by
/// finish(); abandoning a writer leaves an invalid file behind.
class DatasetWriter {
public:
    DatasetWriter(const std::string& path, DatasetManifest manifest);
    DatasetWriter(const DatasetWriter&) = delete;
    DatasetWriter& operator=(const DatasetWriter&) = delete;

    void write(const IqExample& example);
    void finish();
    std::uint64_t written() const noexcept { return written_; }
    const DatasetManifest& manifest() const noexcept { return manifest_; }

private:
    std::string path_;
    DatasetManifest manifest_;
    std::ofstream os_;
    std::vector<char> record_;
    std::uint64_t written_ = 0;
    bool finished_ = false;
};

/// Reads records one at a time; the header, file size, sentinel and
/// manifest are checked on open.
class DatasetReader {
public:
    explicit DatasetReader(const std::string& path);

    const DatasetManifest& manifest() const noexcept { return manifest_; }
    std::uint64_t size() const noexcept { return n_; }
    std::uint32_t length() const noexcept { return length_; }
    std::uint32_t n_classes() const noexcept { return n_classes_; }

    /// Next record in file order; false at the end.
    bool next(IqExample& out);
    IqExample read(std::uint64_t index);
    void seek(std::uint64_t index);

private:
    void decode(IqExample& out, std::uint64_t index);

    std::string path_;
    DatasetManifest manifest_;
    std::ifstream is_;
    std::uint64_t n_ = 0;
    std::uint32_t length_ = 0;
    std::uint32_t n_classes_ = 0;
    std::uint64_t cursor_ = 0;
    std::vector<unsigned char> record_;
};

void write_dataset(const std::string& path, const DatasetManifest& manifest, std::span<const IqExample> examples);
std::vector<IqExample> read_dataset(const std::string& path, DatasetManifest* manifest = nullptr);

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    double snr_bin_width = 2.0;  // dB, stratification cell width

    void validate() const;
    bool operator==(const SplitSpec&) const = default;
};

struct SplitIndices {
    std::vector<std::size_t> train;  // ascending
    std::vector<std::size_t> test;   // ascending
};

/// Stratified by (label, SNR bin). The train partition has exactly
/// round(fraction * N) rows when that is reachable while every cell with
/// at least two members keeps a row on each side.
SplitIndices split(std::span<const std::uint16_t> labels, std::span<const double> snr_db, const SplitSpec& spec);
SplitIndices split(const DatasetManifest& manifest, const SplitSpec& spec);

}  // namespace rfforge
