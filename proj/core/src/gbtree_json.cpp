#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "rfforge/errors.hpp"
#include "rfforge/gbtree.hpp"

namespace rfforge::gbt {

namespace {

using nlohmann::json;

constexpr int kModelVersion = 1;

json node_json(const RegressionTree& t, std::int32_t i) {
    const TreeNode& n = t.nodes[static_cast<std::size_t>(i)];
    if (n.is_leaf()) return json{{"leaf", n.leaf_value}};
    return json{{"feature", n.feature},
                {"threshold", n.threshold},
                {"left", node_json(t, n.left)},
                {"right", node_json(t, n.right)}};
}

// Rebuilds nodes in breadth-first order so a round trip is exact.
RegressionTree tree_from_json(const json& root, std::size_t n_features) {
    RegressionTree t;
    std::vector<const json*> queue{&root};
    t.nodes.emplace_back();
    for (std::size_t head = 0; head < queue.size(); ++head) {
        const json& j = *queue[head];
        TreeNode& n = t.nodes[head];
        if (j.contains("leaf")) {
            n.leaf_value = j.at("leaf").get<double>();
            continue;
        }
        const int f = j.at("feature").get<int>();
        if (f < 0 || static_cast<std::size_t>(f) >= n_features) throw DataError("model: feature index out of range");
        n.feature = f;
        n.threshold = j.at("threshold").get<double>();
        n.left = static_cast<std::int32_t>(t.nodes.size());
        n.right = n.left + 1;
        queue.push_back(&j.at("left"));
        queue.push_back(&j.at("right"));
        t.nodes.emplace_back();
        t.nodes.emplace_back();
    }
    return t;
}

}  // namespace

std::string GbtModel::to_json() const {
    json trees = json::array();
    for (const auto& t : trees_) trees.push_back(node_json(t, 0));
    json j{{"format", "rfforge-gbt"},
           {"version", kModelVersion},
           {"n_classes", n_classes_},
           {"n_features", n_features_},
           {"feature_names", feature_names_},
           {"config",
            {{"rounds", config_.rounds},
             {"max_depth", config_.max_depth},
             {"learning_rate", config_.learning_rate},
             {"lambda", config_.lambda},
             {"gamma", config_.gamma},
             {"min_child_weight", config_.min_child_weight},
             {"subsample", config_.subsample},
             {"seed", config_.seed}}},
           {"config_hash", config_hash_},
           {"trees", std::move(trees)}};
    return j.dump();
}

GbtModel GbtModel::from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        if (j.value("format", "") != "rfforge-gbt") throw DataError("model: not a gbt model");
        if (j.at("version").get<int>() != kModelVersion) throw DataError("model: unsupported version");
        const json& c = j.at("config");
        TrainConfig cfg;
        cfg.rounds = c.at("rounds").get<int>();
        cfg.max_depth = c.at("max_depth").get<int>();
        cfg.learning_rate = c.at("learning_rate").get<double>();
        cfg.lambda = c.at("lambda").get<double>();
        cfg.gamma = c.at("gamma").get<double>();
        cfg.min_child_weight = c.at("min_child_weight").get<double>();
        cfg.subsample = c.at("subsample").get<double>();
        cfg.seed = c.at("seed").get<std::uint64_t>();
        GbtModel m(j.at("n_classes").get<int>(), j.at("n_features").get<std::size_t>(), cfg,
                   j.at("feature_names").get<std::vector<std::string>>());
        m.config_hash_ = j.value("config_hash", std::string());
        const json& trees = j.at("trees");
        if (trees.size() % static_cast<std::size_t>(m.n_classes_) != 0) {
            throw DataError("model: tree count is not a multiple of n_classes");
        }
        for (const json& t : trees) m.trees_.push_back(tree_from_json(t, m.n_features_));
        return m;
    } catch (const json::exception& e) {
        throw DataError(std::string("model: malformed json: ") + e.what());
    }
}

void GbtModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out << to_json();
    if (!out) throw DataError("write failed: " + path);
}

GbtModel GbtModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

}  // namespace rfforge::gbt
