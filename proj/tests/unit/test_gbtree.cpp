#include <doctest.h>

#include <array>
#include <cmath>
#include <filesystem>

#include "oracles.hpp"
#include "rfforge/errors.hpp"
#include "rfforge/gbtree.hpp"
#include "rfforge/random.hpp"

using namespace rfforge;
using namespace rfforge::gbt;

namespace {

struct Toy {
    std::vector<float> x;
    std::vector<std::uint16_t> y;
    std::size_t rows = 0, cols = 0;
    MatrixView view() const { return {x, rows, cols}; }
};

// Four point clusters at the XOR corners with the given sizes.
Toy xor_toy(const std::array<int, 4>& sizes) {
    Toy t;
    t.cols = 2;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            for (int i = 0; i < sizes[2 * a + b]; ++i) {
                t.x.push_back(static_cast<float>(a));
                t.x.push_back(static_cast<float>(b));
                t.y.push_back(static_cast<std::uint16_t>(a ^ b));
                ++t.rows;
            }
        }
    }
    return t;
}

Toy blobs(std::uint64_t seed, std::size_t rows, int k, std::size_t cols) {
    RandomStream r(seed, 0);
    Toy t;
    t.rows = rows;
    t.cols = cols;
    for (std::size_t i = 0; i < rows; ++i) {
        const auto label = static_cast<std::uint16_t>(i % k);
        t.y.push_back(label);
        for (std::size_t c = 0; c < cols; ++c) {
            t.x.push_back(static_cast<float>(r.normal() + (c % k == label ? 1.5 : 0.0)));
        }
    }
    return t;
}

}  // namespace

TEST_CASE("split gain formula") {
    CHECK(split_gain(-2, 2, 2, 2, 1, 0) == doctest::Approx(0.5 * (4.0 / 3 + 4.0 / 3 - 0)));
    CHECK(split_gain(-2, 2, 2, 2, 1, 0.5) == doctest::Approx(0.5 * (8.0 / 3) - 0.5));
}

TEST_CASE("best_split agrees with exhaustive search") {
    RandomStream r(41, 0);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + r.below(30);
        std::vector<float> v(n);
        std::vector<double> g(n), h(n);
        const bool coarse = trial % 3 == 0;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = coarse ? static_cast<float>(r.below(4)) : static_cast<float>(r.normal());
            g[i] = r.normal();
            h[i] = r.uniform(0.01, 1.0);
        }
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
        std::vector<float> sv;
        std::vector<double> sg, sh;
        for (auto i : order) {
            sv.push_back(v[i]);
            sg.push_back(g[i]);
            sh.push_back(h[i]);
        }
        const double lambda = r.uniform(0, 2), gamma = r.uniform(0, 0.3), mcw = r.uniform(0, 1.5);
        const auto got = best_split(sv, sg, sh, {lambda, gamma, mcw});
        const auto want = oracle::exhaustive_split(v, g, h, lambda, gamma, mcw);
        REQUIRE(got.found == want.found);
        if (got.found) {
            CHECK(got.threshold == want.threshold);
            CHECK(got.gain == doctest::Approx(want.gain).epsilon(1e-9));
        }
    }
}

TEST_CASE("best_split ties go to the smaller threshold and respect min_child_weight") {
    // Symmetric: splitting after row 1 or after row 3 has identical gain.
    const std::vector<float> v{0, 1, 2, 3, 4};
    const std::vector<double> g{1, 1, 0, -1, -1}, h{1, 1, 1, 1, 1};
    const auto s = best_split(std::vector<float>{0, 1, 2, 3}, std::vector<double>{1, -1, -1, 1},
                              std::vector<double>{1, 1, 1, 1}, {1, 0, 0});
    REQUIRE(s.found);
    CHECK(s.threshold == 0.5);
    const auto none = best_split(v, g, h, {1, 0, 10.0});
    CHECK_FALSE(none.found);
    const auto constant = best_split(std::vector<float>(5, 1.0f), g, h, {});
    CHECK_FALSE(constant.found);
    CHECK_THROWS_AS(best_split(std::vector<float>{2, 1}, std::vector<double>{1, 1}, std::vector<double>{1, 1}, {}),
                    DataError);
}

TEST_CASE("XOR is learned exactly") {
    TrainConfig cfg;
    cfg.rounds = 20;
    cfg.max_depth = 2;
    cfg.subsample = 1.0;
    RandomStream r(43, 0);
    for (int trial = 0; trial < 20; ++trial) {
        std::array<int, 4> sizes{};
        for (int& n : sizes) n = 15 + static_cast<int>(r.below(21));
        if (trial == 0) sizes = {20, 25, 30, 35};
        if (sizes[0] == sizes[1] && sizes[0] == sizes[2] && sizes[0] == sizes[3]) continue;
        const auto t = xor_toy(sizes);
        const auto res = train(t.view(), t.y, 2, cfg);
        const auto pred = res.model.predict_all(t.view());
        std::size_t correct = 0;
        for (std::size_t i = 0; i < t.rows; ++i) correct += pred[i] == t.y[i];
        CAPTURE(trial);
        CHECK(correct == t.rows);
    }
}

TEST_CASE("perfectly balanced XOR is a zero-gain saddle") {
    const auto t = xor_toy({25, 25, 25, 25});
    TrainConfig cfg;
    cfg.rounds = 3;
    cfg.max_depth = 2;
    cfg.subsample = 1.0;
    const auto res = train(t.view(), t.y, 2, cfg);
    for (const auto& tree : res.model.trees()) {
        REQUIRE(tree.nodes.size() == 1);
        CHECK(tree.nodes[0].leaf_value == 0.0);
    }
}

TEST_CASE("training loss never increases without subsampling") {
    const auto t = blobs(42, 600, 4, 6);
    TrainConfig cfg;
    cfg.rounds = 40;
    cfg.subsample = 1.0;
    const auto res = train(t.view(), t.y, 4, cfg);
    CHECK(res.report.train_loss_increases == 0);
    for (std::size_t i = 1; i < res.report.train_logloss.size(); ++i) {
        CHECK(res.report.train_logloss[i] <= res.report.train_logloss[i - 1]);
    }
    CHECK(res.report.train_logloss.back() == doctest::Approx(log_loss(res.model, t.view(), t.y)).epsilon(1e-9));
}

TEST_CASE("models are bit-identical across worker counts") {
    const auto t = blobs(43, 500, 5, 7);
    TrainConfig cfg;
    cfg.rounds = 15;
    cfg.seed = 99;
    TrainOptions one, eight;
    one.workers = 1;
    eight.workers = 8;
    const auto a = train(t.view(), t.y, 5, cfg, one);
    const auto b = train(t.view(), t.y, 5, cfg, eight);
    CHECK(a.model == b.model);
    CHECK(a.model.to_json() == b.model.to_json());
    cfg.seed = 100;
    const auto c = train(t.view(), t.y, 5, cfg, one);
    CHECK_FALSE(a.model == c.model);
}

TEST_CASE("validation loss is tracked") {
    const auto t = blobs(44, 400, 3, 4);
    const auto v = blobs(45, 200, 3, 4);
    TrainConfig cfg;
    cfg.rounds = 10;
    const ValidationSet vs{v.view(), v.y};
    TrainOptions opt;
    opt.validation = &vs;
    int calls = 0;
    opt.on_round = [&](int, double, double vl) {
        ++calls;
        CHECK(std::isfinite(vl));
    };
    const auto res = train(t.view(), t.y, 3, cfg, opt);
    CHECK(calls == 10);
    REQUIRE(res.report.valid_logloss.size() == 10);
    CHECK(res.report.valid_logloss.back() == doctest::Approx(log_loss(res.model, v.view(), v.y)).epsilon(1e-9));
}

TEST_CASE("model json round trip and truncation") {
    const auto t = blobs(46, 300, 3, 5);
    TrainConfig cfg;
    cfg.rounds = 8;
    TrainOptions opt;
    opt.feature_names = {"a", "b", "c", "d", "e"};
    auto res = train(t.view(), t.y, 3, cfg, opt);
    res.model.set_config_hash("abc123");
    const auto back = GbtModel::from_json(res.model.to_json());
    CHECK(back == res.model);
    CHECK(back.config_hash() == "abc123");
    for (std::size_t i = 0; i < t.rows; ++i) CHECK(back.predict_proba(t.view().row(i)) == res.model.predict_proba(t.view().row(i)));
    const auto path = (std::filesystem::temp_directory_path() / "rfforge_ut_model.json").string();
    res.model.save(path);
    CHECK(GbtModel::load(path) == res.model);
    std::filesystem::remove(path);
    auto cut = res.model;
    cut.truncate(3);
    CHECK(cut.rounds() == 3);
    CHECK(cut.trees().size() == 9);
    CHECK_THROWS_AS(GbtModel::from_json("{\"format\":\"nope\"}"), DataError);
    CHECK_THROWS_AS(GbtModel::from_json("not json"), DataError);
}

TEST_CASE("input validation") {
    const auto t = blobs(47, 50, 2, 3);
    TrainConfig cfg;
    cfg.rounds = 2;
    CHECK_THROWS_AS(train({}, {}, 2, cfg), DataError);
    std::vector<std::uint16_t> bad = t.y;
    bad[0] = 7;
    CHECK_THROWS_AS(train(t.view(), bad, 2, cfg), DataError);
    std::vector<std::uint16_t> same(t.rows, 1);
    CHECK_THROWS_WITH_AS(train(t.view(), same, 2, cfg), doctest::Contains("single class"), DataError);
    auto nan = t.x;
    nan[4] = std::nanf("");
    CHECK_THROWS_AS(train(MatrixView{nan, t.rows, t.cols}, t.y, 2, cfg), NumericError);
    TrainConfig bad_cfg = cfg;
    bad_cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(train(t.view(), t.y, 2, bad_cfg), ConfigError);
    const auto res = train(t.view(), t.y, 2, cfg);
    CHECK_THROWS_AS(res.model.predict(std::vector<float>(2, 0.0f)), DataError);
}

TEST_CASE("a single declared class predicts with certainty") {
    const auto t = blobs(48, 40, 1, 3);
    TrainConfig cfg;
    cfg.rounds = 1;
    const auto res = train(t.view(), t.y, 1, cfg);
    const auto p = res.model.predict_proba(t.view().row(0));
    REQUIRE(p.size() == 1);
    CHECK(p[0] > 0.9);
}

TEST_CASE("softmax") {
    const auto p = softmax(std::vector<double>{1000.0, 1000.0, -1000.0});
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[2] == doctest::Approx(0.0));
}
