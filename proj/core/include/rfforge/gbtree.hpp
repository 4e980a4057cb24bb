#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rfforge::gbt {

/// Read-only row-major float matrix.
struct MatrixView {
    std::span<const float> values;
    std::size_t rows = 0;
    std::size_t cols = 0;

    float at(std::size_t r, std::size_t c) const noexcept { return values[r * cols + c]; }
    std::span<const float> row(std::size_t r) const noexcept { return values.subspan(r * cols, cols); }
};

struct TrainConfig {
    int rounds = 300;
    int max_depth = 6;
    double learning_rate = 0.1;
    double lambda = 1.0;
    double gamma = 0.0;
    double min_child_weight = 1.0;
    double subsample = 0.8;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

struct SplitParams {
    double lambda = 1.0;
    double gamma = 0.0;
    double min_child_weight = 1.0;
};

/// ½[G_L²/(H_L+λ) + G_R²/(H_R+λ) − (G_L+G_R)²/(H_L+H_R+λ)] − γ
double split_gain(double g_left, double h_left, double g_right, double h_right, double lambda,
                  double gamma) noexcept;

struct SplitResult {
    bool found = false;  // false is the no-split sentinel
    double threshold = 0.0;
    double gain = 0.0;
    std::size_t left_count = 0;  // rows strictly below the threshold
    double g_left = 0.0;
    double h_left = 0.0;
};

/// Best threshold over midpoints of consecutive distinct values of a column
/// sorted ascending, with its per-row gradients and hessians. Only splits
/// with positive gain that leave at least min_child_weight hessian on each
/// side qualify; ties go to the smallest threshold.
SplitResult best_split(std::span<const float> sorted_values, std::span<const double> gradients,
                       std::span<const double> hessians, const SplitParams& params);

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // row goes left when value < threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    double leaf_value = 0.0;

    bool is_leaf() const noexcept { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    double predict(std::span<const float> row) const noexcept;
    int depth() const noexcept;
    bool operator==(const RegressionTree&) const = default;
};

/// Softmax-boosted ensemble: trees[round * n_classes + k] scores class k.
class GbtModel {
public:
    GbtModel() = default;
    GbtModel(int n_classes, std::size_t n_features, TrainConfig config, std::vector<std::string> feature_names);

    int n_classes() const noexcept { return n_classes_; }
    std::size_t n_features() const noexcept { return n_features_; }
    int rounds() const noexcept { return n_classes_ > 0 ? static_cast<int>(trees_.size()) / n_classes_ : 0; }
    const TrainConfig& config() const noexcept { return config_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
    /// Hash of the configuration that produced the training data.
    const std::string& config_hash() const noexcept { return config_hash_; }
    void set_config_hash(std::string hash) { config_hash_ = std::move(hash); }

    void add_round(std::vector<RegressionTree> class_trees);
    /// Keep only the first `rounds` boosting rounds.
    void truncate(int rounds);

    std::vector<double> margins(std::span<const float> row) const;
    std::vector<double> predict_proba(std::span<const float> row) const;
    int predict(std::span<const float> row) const;
    std::vector<int> predict_all(const MatrixView& x) const;

    std::string to_json() const;
    static GbtModel from_json(const std::string& text);
    void save(const std::string& path) const;
    static GbtModel load(const std::string& path);

    bool operator==(const GbtModel&) const = default;

private:
    void check_row(std::span<const float> row) const;

    int n_classes_ = 0;
    std::size_t n_features_ = 0;
    TrainConfig config_;
    std::vector<std::string> feature_names_;
    std::vector<RegressionTree> trees_;
    std::string config_hash_;
};

/// Numerically safe softmax.
std::vector<double> softmax(std::span<const double> margins);

/// Mean multiclass cross-entropy of the model's predictions.
double log_loss(const GbtModel& model, const MatrixView& x, std::span<const std::uint16_t> labels);

struct TrainReport {
    std::vector<double> train_logloss;  // after each round
    std::vector<double> valid_logloss;  // empty without a validation set
    int train_loss_increases = 0;       // rounds where training loss went up
};

struct TrainResult {
    GbtModel model;
    TrainReport report;
};

struct ValidationSet {
    MatrixView x;
    std::span<const std::uint16_t> labels;
};

struct TrainOptions {
    unsigned workers = 1;
    const ValidationSet* validation = nullptr;
    std::vector<std::string> feature_names;
    std::function<void(int round, double train_loss, double valid_loss)> on_round;
};

/// Exact-greedy gradient boosting on the multiclass softmax objective.
/// Output is bit-identical for any worker count.
TrainResult train(const MatrixView& x, std::span<const std::uint16_t> labels, int n_classes,
                  const TrainConfig& cfg, const TrainOptions& options = {});

}  // namespace rfforge::gbt
