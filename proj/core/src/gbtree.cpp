#include "rfforge/gbtree.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "rfforge/errors.hpp"
#include "rfforge/random.hpp"

namespace rfforge::gbt {

namespace {

constexpr double kHessianFloor = 1e-16;
constexpr double kProbFloor = 1e-15;

// Scans entries 0..n-1 of a segment sorted by value. g_total/h_total are the
// segment sums.
template <class ValueAt, class GradAt, class HessAt>
SplitResult scan_sorted(std::size_t n, ValueAt value, GradAt grad, HessAt hess, double g_total, double h_total,
                        const SplitParams& p) {
    SplitResult best;
    double gl = 0.0;
    double hl = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        gl += grad(i);
        hl += hess(i);
        const double hr = h_total - hl;
        if (hr < p.min_child_weight) break;  // hr only shrinks from here on
        const float v = value(i);
        const float next = value(i + 1);
        if (v == next || hl < p.min_child_weight) continue;
        const double gain = split_gain(gl, hl, g_total - gl, hr, p.lambda, p.gamma);
        if (gain > 0.0 && (!best.found || gain > best.gain)) {
            best.found = true;
            best.gain = gain;
            best.threshold = 0.5 * (static_cast<double>(v) + static_cast<double>(next));
            best.left_count = i + 1;
            best.g_left = gl;
            best.h_left = hl;
        }
    }
    return best;
}

struct Entry {
    std::uint32_t row;
    float value;
};

struct Pending {
    std::int32_t node;
    std::size_t begin;
    std::size_t end;
    double g;
    double h;
    int depth;
};

struct Workspace {
    std::vector<std::vector<Entry>> a, b;
    std::vector<std::uint8_t> go_left;
    std::vector<double> grad, hess;
};

// Grows one regression tree level by level. Every node owns the same
// [begin, end) segment in each per-feature buffer; splitting stably
// partitions those segments so children stay sorted.
RegressionTree grow_tree(const std::vector<std::vector<Entry>>& root, std::span<const double> grad,
                         std::span<const double> hess, const TrainConfig& cfg, Workspace& ws) {
    const std::size_t n_features = root.size();
    const std::size_t n = root.empty() ? 0 : root[0].size();
    const SplitParams params{cfg.lambda, cfg.gamma, cfg.min_child_weight};
    RegressionTree tree;
    tree.nodes.emplace_back();

    double g_root = 0.0, h_root = 0.0;
    if (n_features > 0) {
        for (const Entry& e : root[0]) {
            g_root += grad[e.row];
            h_root += hess[e.row];
        }
    }
    auto make_leaf = [&](const Pending& p) {
        TreeNode& node = tree.nodes[static_cast<std::size_t>(p.node)];
        node.feature = -1;
        node.leaf_value = -cfg.learning_rate * p.g / (p.h + cfg.lambda);
    };

    for (auto* buf : {&ws.a, &ws.b}) {
        buf->resize(n_features);
        for (auto& v : *buf) v.resize(n);
    }
    const std::vector<std::vector<Entry>>* src = &root;
    std::vector<std::vector<Entry>>* dst = &ws.a;

    std::vector<Pending> level{{0, 0, n, g_root, h_root, 0}};
    std::vector<Pending> next;
    struct Chosen {
        Pending p;
        std::size_t left_count;
    };
    std::vector<Chosen> splits;

    while (!level.empty()) {
        next.clear();
        splits.clear();
        for (const Pending& p : level) {
            const std::size_t count = p.end - p.begin;
            if (p.depth >= cfg.max_depth || count < 2 || n_features == 0 || p.h < 2.0 * cfg.min_child_weight) {
                make_leaf(p);
                continue;
            }
            SplitResult best;
            std::size_t best_feature = 0;
            for (std::size_t f = 0; f < n_features; ++f) {
                const Entry* seg = (*src)[f].data() + p.begin;
                const SplitResult r = scan_sorted(
                    count, [seg](std::size_t i) { return seg[i].value; },
                    [seg, grad](std::size_t i) { return grad[seg[i].row]; },
                    [seg, hess](std::size_t i) { return hess[seg[i].row]; }, p.g, p.h, params);
                if (r.found && (!best.found || r.gain > best.gain)) {
                    best = r;
                    best_feature = f;
                }
            }
            if (!best.found) {
                make_leaf(p);
                continue;
            }
            const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
            tree.nodes.emplace_back();
            tree.nodes.emplace_back();
            TreeNode& node = tree.nodes[static_cast<std::size_t>(p.node)];
            node.feature = static_cast<std::int32_t>(best_feature);
            node.threshold = best.threshold;
            node.left = left_id;
            node.right = left_id + 1;

            const Entry* seg = (*src)[best_feature].data() + p.begin;
            for (std::size_t i = 0; i < count; ++i) ws.go_left[seg[i].row] = i < best.left_count ? 1 : 0;
            splits.push_back({p, best.left_count});
            const std::size_t mid = p.begin + best.left_count;
            next.push_back({left_id, p.begin, mid, best.g_left, best.h_left, p.depth + 1});
            next.push_back({left_id + 1, mid, p.end, p.g - best.g_left, p.h - best.h_left, p.depth + 1});
        }
        if (next.empty()) break;
        for (std::size_t f = 0; f < n_features; ++f) {
            const Entry* in = (*src)[f].data();
            Entry* out = (*dst)[f].data();
            for (const Chosen& c : splits) {
                std::size_t l = c.p.begin;
                std::size_t r = c.p.begin + c.left_count;
                for (std::size_t i = c.p.begin; i < c.p.end; ++i) {
                    const Entry e = in[i];
                    if (ws.go_left[e.row]) out[l++] = e;
                    else out[r++] = e;
                }
            }
        }
        src = dst;
        dst = (dst == &ws.a) ? &ws.b : &ws.a;
        level.swap(next);
    }
    return tree;
}

void softmax_inplace(double* m, int k) noexcept {
    double mx = m[0];
    for (int j = 1; j < k; ++j) mx = std::max(mx, m[j]);
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
        m[j] = std::exp(m[j] - mx);
        sum += m[j];
    }
    for (int j = 0; j < k; ++j) m[j] /= sum;
}

double mean_log_loss(std::span<const double> margins, std::span<const std::uint16_t> labels, int k) {
    if (labels.empty()) return 0.0;
    std::vector<double> p(static_cast<std::size_t>(k));
    double acc = 0.0;
    for (std::size_t r = 0; r < labels.size(); ++r) {
        std::copy_n(margins.data() + r * k, k, p.data());
        softmax_inplace(p.data(), k);
        acc -= std::log(std::max(p[labels[r]], kProbFloor));
    }
    return acc / static_cast<double>(labels.size());
}

void check_inputs(const MatrixView& x, std::span<const std::uint16_t> labels, int n_classes) {
    if (x.rows == 0 || x.cols == 0) throw DataError("train: empty data");
    if (x.values.size() != x.rows * x.cols) throw DataError("train: matrix size mismatch");
    if (labels.size() != x.rows) throw DataError("train: label count mismatch");
    if (n_classes < 1) throw ConfigError("train: n_classes must be >= 1");
    if (x.rows < static_cast<std::size_t>(n_classes)) throw DataError("train: fewer rows than classes");
    if (x.rows > std::numeric_limits<std::uint32_t>::max()) throw DataError("train: too many rows");
    for (float v : x.values) {
        if (!std::isfinite(v)) throw NumericError("train: non-finite feature value");
    }
    std::vector<bool> seen(static_cast<std::size_t>(n_classes), false);
    std::size_t distinct = 0;
    for (std::uint16_t l : labels) {
        if (l >= n_classes) throw DataError("train: label out of range");
        if (!seen[l]) {
            seen[l] = true;
            ++distinct;
        }
    }
    if (n_classes > 1 && distinct == 1) throw DataError("train: single class present but n_classes > 1");
}

template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i, 0u);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i; (i = next.fetch_add(1)) < n;) {
                try {
                    fn(i, w);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

void TrainConfig::validate() const {
    if (rounds < 0) throw ConfigError("train config: rounds must be >= 0");
    if (max_depth < 0) throw ConfigError("train config: max_depth must be >= 0");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) throw ConfigError("train config: learning_rate must be in (0, 1]");
    if (!(lambda >= 0.0)) throw ConfigError("train config: lambda must be >= 0");
    if (!(gamma >= 0.0)) throw ConfigError("train config: gamma must be >= 0");
    if (!(min_child_weight >= 0.0)) throw ConfigError("train config: min_child_weight must be >= 0");
    if (!(subsample > 0.0 && subsample <= 1.0)) throw ConfigError("train config: subsample must be in (0, 1]");
}

double split_gain(double g_left, double h_left, double g_right, double h_right, double lambda,
                  double gamma) noexcept {
    const double g = g_left + g_right;
    const double h = h_left + h_right;
    return 0.5 * (g_left * g_left / (h_left + lambda) + g_right * g_right / (h_right + lambda) -
                  g * g / (h + lambda)) -
           gamma;
}

SplitResult best_split(std::span<const float> values, std::span<const double> gradients,
                       std::span<const double> hessians, const SplitParams& params) {
    if (values.size() != gradients.size() || values.size() != hessians.size()) {
        throw DataError("best_split: length mismatch");
    }
    if (!std::is_sorted(values.begin(), values.end())) throw DataError("best_split: values must be sorted");
    double g = 0.0, h = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        g += gradients[i];
        h += hessians[i];
    }
    return scan_sorted(
        values.size(), [&](std::size_t i) { return values[i]; }, [&](std::size_t i) { return gradients[i]; },
        [&](std::size_t i) { return hessians[i]; }, g, h, params);
}

double RegressionTree::predict(std::span<const float> row) const noexcept {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const TreeNode& n = nodes[i];
        i = static_cast<std::size_t>(static_cast<double>(row[static_cast<std::size_t>(n.feature)]) < n.threshold
                                         ? n.left
                                         : n.right);
    }
    return nodes[i].leaf_value;
}

int RegressionTree::depth() const noexcept {
    if (nodes.empty()) return 0;
    std::vector<int> d(nodes.size(), 0);
    int best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].is_leaf()) continue;
        for (std::int32_t c : {nodes[i].left, nodes[i].right}) {
            d[static_cast<std::size_t>(c)] = d[i] + 1;
            best = std::max(best, d[i] + 1);
        }
    }
    return best;
}

GbtModel::GbtModel(int n_classes, std::size_t n_features, TrainConfig config, std::vector<std::string> feature_names)
    : n_classes_(n_classes), n_features_(n_features), config_(config), feature_names_(std::move(feature_names)) {
    if (n_classes_ < 1) throw ConfigError("model: n_classes must be >= 1");
}

void GbtModel::add_round(std::vector<RegressionTree> class_trees) {
    if (class_trees.size() != static_cast<std::size_t>(n_classes_)) throw ConfigError("model: one tree per class per round");
    for (auto& t : class_trees) trees_.push_back(std::move(t));
}

void GbtModel::truncate(int rounds) {
    if (rounds < 0) rounds = 0;
    const std::size_t keep = static_cast<std::size_t>(rounds) * static_cast<std::size_t>(n_classes_);
    if (keep < trees_.size()) trees_.resize(keep);
}

void GbtModel::check_row(std::span<const float> row) const {
    if (row.size() != n_features_) {
        throw DataError("model: feature dimension mismatch (expected " + std::to_string(n_features_) + ", got " +
                        std::to_string(row.size()) + ")");
    }
}

std::vector<double> GbtModel::margins(std::span<const float> row) const {
    check_row(row);
    std::vector<double> m(static_cast<std::size_t>(n_classes_), 0.0);
    for (std::size_t t = 0; t < trees_.size(); ++t) m[t % static_cast<std::size_t>(n_classes_)] += trees_[t].predict(row);
    return m;
}

std::vector<double> softmax(std::span<const double> margins) {
    std::vector<double> p(margins.begin(), margins.end());
    if (!p.empty()) softmax_inplace(p.data(), static_cast<int>(p.size()));
    return p;
}

std::vector<double> GbtModel::predict_proba(std::span<const float> row) const { return softmax(margins(row)); }

int GbtModel::predict(std::span<const float> row) const {
    const auto p = predict_proba(row);
    return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

std::vector<int> GbtModel::predict_all(const MatrixView& x) const {
    std::vector<int> out(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) out[r] = predict(x.row(r));
    return out;
}

double log_loss(const GbtModel& model, const MatrixView& x, std::span<const std::uint16_t> labels) {
    if (labels.size() != x.rows) throw DataError("log_loss: label count mismatch");
    std::vector<double> m;
    m.reserve(x.rows * static_cast<std::size_t>(model.n_classes()));
    for (std::size_t r = 0; r < x.rows; ++r) {
        const auto row_m = model.margins(x.row(r));
        m.insert(m.end(), row_m.begin(), row_m.end());
    }
    return mean_log_loss(m, labels, model.n_classes());
}

TrainResult train(const MatrixView& x, std::span<const std::uint16_t> labels, int n_classes,
                  const TrainConfig& cfg, const TrainOptions& options) {
    cfg.validate();
    check_inputs(x, labels, n_classes);
    const ValidationSet* valid = options.validation;
    if (valid) {
        if (valid->x.cols != x.cols || valid->labels.size() != valid->x.rows) {
            throw DataError("train: validation set shape mismatch");
        }
        for (std::uint16_t l : valid->labels) {
            if (l >= n_classes) throw DataError("train: validation label out of range");
        }
    }
    const std::size_t rows = x.rows;
    const std::size_t cols = x.cols;
    const auto k_classes = static_cast<std::size_t>(n_classes);

    std::vector<std::vector<Entry>> sorted(cols);
    for (std::size_t f = 0; f < cols; ++f) {
        auto& col = sorted[f];
        col.resize(rows);
        for (std::size_t r = 0; r < rows; ++r) col[r] = {static_cast<std::uint32_t>(r), x.at(r, f)};
        std::sort(col.begin(), col.end(), [](const Entry& a, const Entry& b) {
            return a.value < b.value || (a.value == b.value && a.row < b.row);
        });
    }

    TrainResult result{GbtModel(n_classes, cols, cfg, options.feature_names), {}};
    std::vector<double> margins(rows * k_classes, 0.0);
    std::vector<double> valid_margins(valid ? valid->x.rows * k_classes : 0, 0.0);
    std::vector<double> prob(rows * k_classes);

    const unsigned workers = std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(k_classes)));
    std::vector<Workspace> spaces(workers);
    for (auto& ws : spaces) {
        ws.go_left.assign(rows, 0);
        ws.grad.resize(rows);
        ws.hess.resize(rows);
    }

    std::vector<std::vector<Entry>> root(cols);
    std::vector<std::uint8_t> sampled(rows, 1);
    double prev_loss = mean_log_loss(margins, labels, n_classes);

    for (int round = 0; round < cfg.rounds; ++round) {
        for (std::size_t r = 0; r < rows; ++r) {
            std::copy_n(margins.data() + r * k_classes, k_classes, prob.data() + r * k_classes);
            softmax_inplace(prob.data() + r * k_classes, n_classes);
        }

        std::size_t n_sampled = rows;
        if (cfg.subsample < 1.0) {
            RandomStream rng(cfg.seed, static_cast<std::uint64_t>(round), 0x5ab5u);
            n_sampled = 0;
            for (std::size_t r = 0; r < rows; ++r) {
                sampled[r] = rng.uniform() < cfg.subsample ? 1 : 0;
                n_sampled += sampled[r];
            }
            if (n_sampled == 0) {
                std::fill(sampled.begin(), sampled.end(), 1);
                n_sampled = rows;
            }
        }
        for (std::size_t f = 0; f < cols; ++f) {
            root[f].clear();
            root[f].reserve(n_sampled);
            for (const Entry& e : sorted[f]) {
                if (sampled[e.row]) root[f].push_back(e);
            }
        }

        std::vector<RegressionTree> trees(k_classes);
        parallel_for(k_classes, workers, [&](std::size_t k, unsigned w) {
            Workspace& ws = spaces[w];
            for (std::size_t r = 0; r < rows; ++r) {
                const double p = prob[r * k_classes + k];
                ws.grad[r] = p - (labels[r] == k ? 1.0 : 0.0);
                ws.hess[r] = std::max(2.0 * p * (1.0 - p), kHessianFloor);
            }
            trees[k] = grow_tree(root, ws.grad, ws.hess, cfg, ws);
        });

        for (std::size_t k = 0; k < k_classes; ++k) {
            const RegressionTree& t = trees[k];
            for (std::size_t r = 0; r < rows; ++r) margins[r * k_classes + k] += t.predict(x.row(r));
            if (valid) {
                for (std::size_t r = 0; r < valid->x.rows; ++r) {
                    valid_margins[r * k_classes + k] += t.predict(valid->x.row(r));
                }
            }
        }
        result.model.add_round(std::move(trees));

        const double loss = mean_log_loss(margins, labels, n_classes);
        if (!std::isfinite(loss)) throw NumericError("train: training loss became non-finite");
        if (loss > prev_loss) ++result.report.train_loss_increases;
        prev_loss = loss;
        result.report.train_logloss.push_back(loss);
        double vloss = std::nan("");
        if (valid) {
            vloss = mean_log_loss(valid_margins, valid->labels, n_classes);
            result.report.valid_logloss.push_back(vloss);
        }
        if (options.on_round) options.on_round(round, loss, vloss);
    }
    return result;
}

}  // namespace rfforge::gbt
