#include "rfforge/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "binio.hpp"
#include "json.hpp"
#include "rfforge/errors.hpp"
#include "rfforge/modem.hpp"
#include "rfforge/random.hpp"

namespace rfforge {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'R', 'S', 'C', 'D'};

json snr_to_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double snr_from_json(const json& j) { return j.is_null() ? kInfiniteSnr : j.get<double>(); }

std::vector<std::string> names_of(const std::vector<Modulation>& ms) {
    std::vector<std::string> out;
    for (Modulation m : ms) out.emplace_back(name(m));
    return out;
}

void put_raw_u16(char*& p, std::uint16_t v) {
    *p++ = static_cast<char>(v & 0xff);
    *p++ = static_cast<char>(v >> 8);
}

void put_raw_f32(char*& p, double v) {
    const auto u = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int i = 0; i < 4; ++i) *p++ = static_cast<char>((u >> (8 * i)) & 0xff);
}

}  // namespace

std::string manifest_path(const std::string& dataset_path) { return dataset_path + ".json"; }

void DatasetManifest::validate() const {
    if (format_version != kRscdVersion) throw DataError("manifest: unsupported format version");
    if (class_names.empty()) throw DataError("manifest: empty class list");
    if (class_names.size() > 0xffff) throw DataError("manifest: too many classes");
    std::set<std::string> unique(class_names.begin(), class_names.end());
    if (unique.size() != class_names.size()) throw DataError("manifest: duplicate class name");
    if (composition == "normal") {
        if (class_names != names_of(normal_classes())) throw DataError("manifest: class list is not the normal composition");
    } else if (composition == "difficult") {
        if (class_names != names_of(difficult_classes())) {
            throw DataError("manifest: class list is not the difficult composition");
        }
    } else if (composition != "custom") {
        throw DataError("manifest: unknown composition '" + composition + "'");
    }
    if (n_examples < 1) throw DataError("manifest: N must be >= 1");
    if (length < 16) throw DataError("manifest: length must be >= 16");
    if (assignment != "round_robin") throw DataError("manifest: unknown assignment '" + assignment + "'");
}

std::string DatasetManifest::to_json() const {
    json grid = json::array();
    for (double v : snr_grid) grid.push_back(snr_to_json(v));
    json j{{"format", "RSCD"},
           {"format_version", format_version},
           {"composition", composition},
           {"class_names", class_names},
           {"n_examples", n_examples},
           {"length", length},
           {"snr_grid", grid},
           {"master_seed", master_seed},
           {"assignment", assignment},
           {"config_hash", config_hash}};
    j["config"] = config_json.empty() ? json(nullptr) : json::parse(config_json);
    return j.dump(2);
}

DatasetManifest DatasetManifest::from_json(const std::string& text) {
    DatasetManifest m;
    try {
        const json j = json::parse(text);
        if (j.value("format", "") != "RSCD") throw DataError("manifest: not an RSCD manifest");
        m.format_version = j.at("format_version").get<std::uint32_t>();
        m.composition = j.at("composition").get<std::string>();
        m.class_names = j.at("class_names").get<std::vector<std::string>>();
        m.n_examples = j.at("n_examples").get<std::uint64_t>();
        m.length = j.at("length").get<std::uint32_t>();
        for (const json& v : j.at("snr_grid")) m.snr_grid.push_back(snr_from_json(v));
        m.master_seed = j.at("master_seed").get<std::uint64_t>();
        m.assignment = j.value("assignment", std::string("round_robin"));
        m.config_hash = j.value("config_hash", std::string());
        if (j.contains("config") && !j.at("config").is_null()) m.config_json = j.at("config").dump();
    } catch (const json::exception& e) {
        throw DataError(std::string("manifest: malformed json: ") + e.what());
    }
    m.validate();
    return m;
}

void write_manifest(const std::string& path, const DatasetManifest& manifest) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot open " + path + " for writing");
    os << manifest.to_json() << '\n';
    if (!os) throw DataError("short write to " + path);
}

DatasetManifest read_manifest(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("missing manifest " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return DatasetManifest::from_json(ss.str());
}

std::uint16_t assigned_label(std::uint64_t index, std::size_t n_classes) noexcept {
    return static_cast<std::uint16_t>(index % n_classes);
}

double assigned_snr(std::uint64_t index, std::size_t n_classes, std::span<const double> grid) noexcept {
    if (grid.empty()) return kInfiniteSnr;
    return grid[(index / n_classes) % grid.size()];
}

DatasetWriter::DatasetWriter(const std::string& path, DatasetManifest manifest)
    : path_(path), manifest_(std::move(manifest)) {
    manifest_.validate();
    os_.open(path_, std::ios::binary | std::ios::trunc);
    if (!os_) throw DataError("cannot open " + path_ + " for writing");
    os_.write(kMagic, 4);
    binio::put_u32(os_, kRscdVersion);
    binio::put_u64(os_, manifest_.n_examples);
    binio::put_u32(os_, manifest_.length);
    binio::put_u32(os_, static_cast<std::uint32_t>(manifest_.n_classes()));
    if (!os_) throw DataError("short write to " + path_);
    record_.resize(rscd_record_bytes(manifest_.length));
}

void DatasetWriter::write(const IqExample& ex) {
    if (finished_) throw DataError("dataset writer already finished");
    if (written_ >= manifest_.n_examples) throw DataError("more examples than the manifest declares");
    if (ex.samples.size() != manifest_.length) throw DataError("example length does not match manifest");
    if (ex.label >= manifest_.n_classes()) throw DataError("label out of range");
    char* p = record_.data();
    put_raw_u16(p, ex.label);
    put_raw_f32(p, ex.snr_db);
    const ChannelParams& c = ex.params;
    for (double v : {c.alpha, c.delta_t, c.delta_fs, c.theta_c, c.delta_fc, c.tau, 0.0}) put_raw_f32(p, v);
    for (const Complex& s : ex.samples) {
        put_raw_f32(p, s.real());
        put_raw_f32(p, s.imag());
    }
    os_.write(record_.data(), static_cast<std::streamsize>(record_.size()));
    if (!os_) throw DataError("short write to " + path_);
    ++written_;
}

void DatasetWriter::finish() {
    if (finished_) return;
    if (written_ != manifest_.n_examples) {
        throw DataError("dataset has " + std::to_string(written_) + " of " + std::to_string(manifest_.n_examples) +
                        " examples");
    }
    os_.write(kRscdSentinel, 4);
    os_.close();
    if (!os_) throw DataError("short write to " + path_);
    write_manifest(manifest_path(path_), manifest_);
    finished_ = true;
}

DatasetReader::DatasetReader(const std::string& path) : path_(path) {
    is_.open(path_, std::ios::binary);
    if (!is_) throw DataError("cannot open " + path_);
    std::error_code ec;
    const auto file_size = std::filesystem::file_size(path_, ec);
    if (ec) throw DataError("cannot stat " + path_);
    unsigned char head[kRscdHeaderBytes];
    const auto got = is_.read(reinterpret_cast<char*>(head), sizeof head).gcount();
    if (got >= 4 && std::memcmp(head, kMagic, 4) != 0) throw DataError("bad magic in " + path_);
    if (got < static_cast<std::streamsize>(sizeof head)) throw DataError("truncated header in " + path_);
    if (binio::get_u32(head + 4) != kRscdVersion) throw DataError("unsupported RSCD version in " + path_);
    n_ = binio::get_u64(head + 8);
    length_ = binio::get_u32(head + 16);
    n_classes_ = binio::get_u32(head + 20);
    if (length_ == 0 || n_classes_ == 0) throw DataError("invalid RSCD header in " + path_);
    const auto expected = rscd_file_bytes(n_, length_);
    if (file_size < expected) throw DataError("truncated file " + path_);
    if (file_size > expected) throw DataError("trailing bytes in " + path_);
    char tail[4];
    is_.seekg(static_cast<std::streamoff>(expected - 4));
    is_.read(tail, 4);
    if (!is_ || std::memcmp(tail, kRscdSentinel, 4) != 0) throw DataError("missing end-of-file sentinel in " + path_);
    manifest_ = read_manifest(manifest_path(path_));
    if (manifest_.n_examples != n_ || manifest_.length != length_ || manifest_.n_classes() != n_classes_) {
        throw DataError("manifest does not match header of " + path_);
    }
    record_.resize(rscd_record_bytes(length_));
    seek(0);
}

void DatasetReader::seek(std::uint64_t index) {
    if (index > n_) throw DataError("record index out of range");
    is_.clear();
    is_.seekg(static_cast<std::streamoff>(kRscdHeaderBytes + index * record_.size()));
    cursor_ = index;
}

void DatasetReader::decode(IqExample& out, std::uint64_t index) {
    is_.read(reinterpret_cast<char*>(record_.data()), static_cast<std::streamsize>(record_.size()));
    if (!is_) throw DataError("truncated record in " + path_);
    const unsigned char* p = record_.data();
    out.label = binio::get_u16(p);
    if (out.label >= n_classes_) throw DataError("label out of range in " + path_);
    out.snr_db = binio::get_f32(p + 2);
    p += 6;
    double v[7];
    for (double& x : v) {
        x = binio::get_f32(p);
        p += 4;
    }
    out.params = ChannelParams{};
    out.params.alpha = v[0];
    out.params.delta_t = v[1];
    out.params.delta_fs = v[2];
    out.params.theta_c = v[3];
    out.params.delta_fc = v[4];
    out.params.tau = v[5];
    out.params.snr_db = out.snr_db;
    out.params.taps.clear();
    out.samples.resize(length_);
    for (Complex& s : out.samples) {
        s = Complex(binio::get_f32(p), binio::get_f32(p + 4));
        p += 8;
    }
    out.example_index = index;
}

bool DatasetReader::next(IqExample& out) {
    if (cursor_ >= n_) return false;
    decode(out, cursor_);
    ++cursor_;
    return true;
}

IqExample DatasetReader::read(std::uint64_t index) {
    if (index >= n_) throw DataError("record index out of range");
    seek(index);
    IqExample ex;
    next(ex);
    return ex;
}

void write_dataset(const std::string& path, const DatasetManifest& manifest, std::span<const IqExample> examples) {
    DatasetWriter w(path, manifest);
    for (const IqExample& ex : examples) w.write(ex);
    w.finish();
}

std::vector<IqExample> read_dataset(const std::string& path, DatasetManifest* manifest) {
    DatasetReader r(path);
    if (manifest) *manifest = r.manifest();
    std::vector<IqExample> out(r.size());
    for (IqExample& ex : out) r.next(ex);
    return out;
}

void SplitSpec::validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("split: train fraction must be in (0, 1)");
    if (!(snr_bin_width > 0.0)) throw ConfigError("split: snr bin width must be > 0");
}

SplitIndices split(std::span<const std::uint16_t> labels, std::span<const double> snr_db, const SplitSpec& spec) {
    spec.validate();
    if (labels.size() != snr_db.size()) throw DataError("split: label/snr length mismatch");
    const std::size_t n = labels.size();

    // Cells keyed by (label, bin); infinite SNRs share one bin.
    std::map<std::pair<std::uint16_t, double>, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = snr_db[i];
        const double bin = std::isfinite(s) ? std::round(s / spec.snr_bin_width) : s;
        cells[{labels[i], bin}].push_back(i);
    }

    struct Quota {
        std::vector<std::size_t>* members;
        std::size_t take, lo, hi;
        double remainder;
    };
    std::vector<Quota> quotas;
    std::size_t assigned = 0;
    for (auto& [key, members] : cells) {
        const std::size_t m = members.size();
        const double ideal = spec.train_fraction * static_cast<double>(m);
        const std::size_t lo = m >= 2 ? 1 : 0;
        const std::size_t hi = m >= 2 ? m - 1 : m;
        const auto base = std::clamp(static_cast<std::size_t>(std::floor(ideal)), lo, hi);
        quotas.push_back({&members, base, lo, hi, ideal - static_cast<double>(base)});
        assigned += base;
    }
    const auto target = static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));

    // Largest remainder; the stable sort keeps cell order for ties.
    std::vector<std::size_t> order(quotas.size());
    std::iota(order.begin(), order.end(), 0);
    if (assigned < target) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return quotas[a].remainder > quotas[b].remainder; });
        for (std::size_t pass = 0; assigned < target; ++pass) {
            bool moved = false;
            for (std::size_t c : order) {
                if (assigned == target) break;
                if (quotas[c].take < quotas[c].hi) {
                    ++quotas[c].take;
                    ++assigned;
                    moved = true;
                }
            }
            if (!moved) break;
        }
    } else if (assigned > target) {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return quotas[a].remainder < quotas[b].remainder; });
        for (std::size_t pass = 0; assigned > target; ++pass) {
            bool moved = false;
            for (std::size_t c : order) {
                if (assigned == target) break;
                if (quotas[c].take > quotas[c].lo) {
                    --quotas[c].take;
                    --assigned;
                    moved = true;
                }
            }
            if (!moved) break;
        }
    }

    SplitIndices out;
    out.train.reserve(target);
    out.test.reserve(n - std::min(n, target));
    RandomStream rng(spec.seed, 0, 0x5917u);
    for (Quota& q : quotas) {
        auto& v = *q.members;
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
        out.train.insert(out.train.end(), v.begin(), v.begin() + static_cast<std::ptrdiff_t>(q.take));
        out.test.insert(out.test.end(), v.begin() + static_cast<std::ptrdiff_t>(q.take), v.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

SplitIndices split(const DatasetManifest& manifest, const SplitSpec& spec) {
    manifest.validate();
    const auto n = static_cast<std::size_t>(manifest.n_examples);
    std::vector<std::uint16_t> labels(n);
    std::vector<double> snrs(n);
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = assigned_label(i, manifest.n_classes());
        snrs[i] = assigned_snr(i, manifest.n_classes(), manifest.snr_grid);
    }
    return split(labels, snrs, spec);
}

}  // namespace rfforge
