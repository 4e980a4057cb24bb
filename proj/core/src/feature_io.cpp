#include <cmath>
#include <cstring>
#include <limits>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "binio.hpp"
#include "rfforge/errors.hpp"
#include "rfforge/features.hpp"

namespace rfforge {

namespace {

constexpr char kMagic[4] = {'R', 'F', 'F', 'T'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 20;

}  // namespace

void write_feature_file(const std::string& path, const FeatureTable& table, const FeatureFileInfo& info) {
    if (table.values.size() != table.rows * table.cols || table.labels.size() != table.rows) {
        throw DataError("write_feature_file: inconsistent table");
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw DataError("cannot open " + path + " for writing");
    os.write(kMagic, 4);
    binio::put_u32(os, kVersion);
    binio::put_u64(os, table.rows);
    binio::put_u32(os, static_cast<std::uint32_t>(table.cols));
    for (float v : table.values) binio::put_f32(os, v);
    for (std::uint16_t l : table.labels) binio::put_u16(os, l);
    os.flush();
    if (!os) throw DataError("short write to " + path);

    nlohmann::json side;
    side["format"] = "RFFT";
    side["version"] = kVersion;
    side["rows"] = table.rows;
    std::vector<std::string> cols;
    if (table.cols == kFeatureCount) {
        for (auto n : FeatureVector::names()) cols.emplace_back(n);
    } else {
        for (std::size_t c = 0; c < table.cols; ++c) cols.push_back("f" + std::to_string(c));
    }
    side["columns"] = cols;
    side["class_names"] = info.class_names;
    side["source_dataset"] = info.source_dataset;
    side["config_hash"] = info.config_hash;
    // JSON has no infinity; a null entry stands for an SNR of +inf.
    nlohmann::json snrs = nlohmann::json::array();
    for (float v : table.snr_db) {
        if (std::isfinite(v)) snrs.push_back(v);
        else snrs.push_back(nullptr);
    }
    side["row_snr_db"] = std::move(snrs);
    std::ofstream js(path + ".json", std::ios::trunc);
    if (!js) throw DataError("cannot open " + path + ".json for writing");
    js << side.dump(1) << '\n';
    if (!js) throw DataError("short write to " + path + ".json");
}

FeatureTable read_feature_file(const std::string& path, FeatureFileInfo* info) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    if (bytes.size() < kHeaderBytes) throw DataError("truncated feature file " + path);
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw DataError("bad magic in " + path);
    if (binio::get_u32(bytes.data() + 4) != kVersion) throw DataError("unsupported feature file version");
    FeatureTable t;
    t.rows = binio::get_u64(bytes.data() + 8);
    t.cols = binio::get_u32(bytes.data() + 16);
    const std::size_t expected = kHeaderBytes + t.rows * t.cols * 4 + t.rows * 2;
    if (bytes.size() < expected) throw DataError("truncated feature file " + path);
    if (bytes.size() > expected) throw DataError("trailing bytes in feature file " + path);
    t.values.resize(t.rows * t.cols);
    const unsigned char* p = bytes.data() + kHeaderBytes;
    for (float& v : t.values) {
        v = binio::get_f32(p);
        p += 4;
    }
    t.labels.resize(t.rows);
    for (auto& l : t.labels) {
        l = binio::get_u16(p);
        p += 2;
    }

    t.snr_db.assign(t.rows, 0.0f);
    std::ifstream js(path + ".json");
    if (js) {
        nlohmann::json side;
        try {
            js >> side;
        } catch (const nlohmann::json::exception& e) {
            throw DataError("bad feature sidecar: " + std::string(e.what()));
        }
        if (side.contains("row_snr_db")) {
            const auto& snrs = side["row_snr_db"];
            if (snrs.size() != t.rows) throw DataError("feature sidecar row count mismatch");
            for (std::size_t r = 0; r < t.rows; ++r) {
                t.snr_db[r] = snrs[r].is_null() ? std::numeric_limits<float>::infinity() : snrs[r].get<float>();
            }
        }
        if (info) {
            info->class_names = side.value("class_names", std::vector<std::string>{});
            info->source_dataset = side.value("source_dataset", std::string{});
            info->config_hash = side.value("config_hash", std::string{});
        }
    }
    return t;
}

}  // namespace rfforge
