#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rfforge/config.hpp"
#include "rfforge/dataio.hpp"
#include "rfforge/features.hpp"
#include "rfforge/gbtree.hpp"
#include "rfforge/metrics.hpp"

namespace rfforge {

using ProgressFn = std::function<void(const std::string& message)>;

/// Example `index` of the dataset defined by (cfg, seed). Samples are
/// rounded to f32, matching what a dataset file stores.
IqExample generate_example(const ExperimentConfig& cfg, std::uint64_t seed, std::uint64_t index);

DatasetManifest make_manifest(const ExperimentConfig& cfg, std::uint64_t seed);

/// Calls sink(example) for indices 0..N-1 in order, generating on a worker
/// pool with a bounded reorder buffer.
void generate_stream(const ExperimentConfig& cfg, std::uint64_t seed, unsigned workers,
                     const std::function<void(IqExample&&)>& sink);

/// Writes an RSCD file plus manifest.
DatasetManifest generate_dataset(const ExperimentConfig& cfg, std::uint64_t seed, const std::string& path,
                                 unsigned workers = 1);

/// Generates and featurizes without keeping waveforms. Optionally also
/// writes the dataset to dataset_path.
FeatureTable generate_features(const ExperimentConfig& cfg, std::uint64_t seed, unsigned workers = 1,
                               const std::string& dataset_path = {});

/// Streams a dataset file through featurize in file order.
FeatureTable featurize_dataset(const std::string& dataset_path, unsigned workers = 1,
                               DatasetManifest* manifest = nullptr);

/// Labels and SNRs of a table as the split function expects them.
SplitIndices split_table(const FeatureTable& table, const SplitSpec& spec);

struct BaselineRun {
    gbt::GbtModel model;
    gbt::TrainReport report;
    SplitIndices split;
};

/// Trains on the train partition only; the test partition is scored each
/// round as the validation log-loss.
BaselineRun train_baseline(const FeatureTable& table, const ExperimentConfig& cfg, unsigned workers = 1,
                           const ProgressFn& progress = {});

struct Evaluation {
    std::vector<int> predictions;
    std::vector<int> truths;
    std::vector<double> snr_db;
    SnrCurve curve;
    ConfusionMatrix confusion;
    double accuracy = 0.0;
    double high_snr_accuracy = 0.0;
};

/// Scores the given rows; an empty index list means every row.
Evaluation evaluate(const gbt::GbtModel& model, const FeatureTable& table, std::span<const std::size_t> rows,
                    const EvalConfig& eval, std::vector<std::string> class_names);

/// "<prefix>_curve.csv" and "<prefix>_confusion.csv", each with a JSON
/// sidecar carrying the config hash.
void write_evaluation(const std::string& prefix, const Evaluation& ev, const std::string& config_hash);
void write_train_report(const std::string& path, const gbt::TrainReport& report, const std::string& config_hash);

enum class SweepAxis { n, length, sigma_clk, tau };
SweepAxis parse_sweep_axis(const std::string& text);
std::string sweep_axis_name(SweepAxis axis);
/// Copy of cfg with the axis set to value.
ExperimentConfig with_axis(const ExperimentConfig& cfg, SweepAxis axis, double value);
/// Seed of the independent evaluation set used when holdout_examples > 0.
std::uint64_t holdout_seed(std::uint64_t seed) noexcept;

struct SweepPoint {
    double value = 0.0;
    Evaluation evaluation;
    gbt::TrainReport report;
};

/// generate -> featurize -> train -> evaluate for each value with the same
/// seed. With holdout_examples > 0 every point is scored on its own
/// independently seeded set instead of the test partition. Per-value
/// artifacts go to out_dir when it is non-empty.
std::vector<SweepPoint> sweep(const ExperimentConfig& base, SweepAxis axis, std::span<const double> values,
                              std::uint64_t seed, unsigned workers = 1, const std::string& out_dir = {},
                              const ProgressFn& progress = {});

/// Columns axis,value,snr_db,n,accuracy.
void write_sweep_csv(const std::string& path, SweepAxis axis, std::span<const SweepPoint> points,
                     const std::string& config_hash = {});

}  // namespace rfforge
