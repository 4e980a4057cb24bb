#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rfforge/channel.hpp"
#include "rfforge/dataio.hpp"
#include "rfforge/gbtree.hpp"
#include "rfforge/modem.hpp"

namespace rfforge {

struct EvalConfig {
    double bin_width = 2.0;           // dB
    double confusion_snr_min = 0.0;   // dB
    double high_snr_min = 10.0;       // dB, pooled "high-SNR accuracy" threshold

    void validate() const;
    bool operator==(const EvalConfig&) const = default;
};

/// Everything one pipeline run needs, loaded from a single JSON file.
struct ExperimentConfig {
    std::vector<Modulation> classes = difficult_classes();
    std::uint64_t n_examples = 48000;
    std::uint32_t length = 1024;
    ModemConfig modem;
    ImpairmentProfile impairments{0.0, 0.0, 8, make_snr_grid(-20.0, 30.0, 2.0), {}, false};
    SplitSpec split;
    gbt::TrainConfig train;
    EvalConfig eval;
    std::uint64_t holdout_examples = 0;  // sweep only: independent test set size
    std::optional<std::uint64_t> seed;

    /// "normal", "difficult" or "custom".
    std::string composition() const;
    std::vector<std::string> class_names() const;
    void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
/// Canonical JSON (sorted keys, every field present).
std::string to_json(const ExperimentConfig& cfg);
/// Sets one dotted key, e.g. "impairments.tau=2" or "classes=normal". The
/// value is parsed as JSON and falls back to a plain string.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);
/// 16 hex digits of 64-bit FNV-1a over the canonical JSON.
std::string config_hash(const ExperimentConfig& cfg);
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace rfforge
