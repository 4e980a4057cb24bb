// Acceptance runner. One PASS/FAIL line per criterion on stdout; per-check
// details are indented above it. Usage: rfforge_acceptance [criterion...]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <unistd.h>

#include "oracles.hpp"
#include "rfforge/channel.hpp"
#include "rfforge/config.hpp"
#include "rfforge/dataio.hpp"
#include "rfforge/errors.hpp"
#include "rfforge/features.hpp"
#include "rfforge/gbtree.hpp"
#include "rfforge/harness.hpp"
#include "rfforge/metrics.hpp"
#include "rfforge/modem.hpp"
#include "rfforge/random.hpp"
#include "rfforge/sigcore.hpp"

using namespace rfforge;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kTrainSeed = 1;

unsigned g_workers = 1;
fs::path g_scratch;

class Report {
public:
    void check(bool ok, const std::string& what) {
        std::cout << "  " << (ok ? "ok   " : "FAIL ") << what << '\n' << std::flush;
        all_ &= ok;
        ++checks_;
        passed_ += ok;
    }
    std::string summary() const { return std::to_string(passed_) + "/" + std::to_string(checks_) + " checks"; }
    void info(const std::string& what) { std::cout << "  " << what << '\n' << std::flush; }
    bool passed() const { return all_; }

private:
    bool all_ = true;
    int checks_ = 0;
    int passed_ = 0;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double rel_err(Complex a, Complex b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }
double rel_err(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

ExperimentConfig config_file(const std::string& name) {
    return load_config((fs::path(RFFORGE_CONFIG_DIR) / name).string());
}

void log_progress(const std::string& msg) { std::cerr << "    " << msg << '\n'; }

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

// Smallest distance of any consecutive phase difference to the unwrap cut at pi.
double distance_to_cut(std::span<const Complex> x) {
    double d = std::numbers::pi;
    for (std::size_t n = 1; n < x.size(); ++n) {
        d = std::min(d, std::numbers::pi - std::abs(std::arg(x[n] * std::conj(x[n - 1]))));
    }
    return d;
}

Waveform oracle_input(RandomStream& r, std::size_t n) {
    Waveform x(n);
    switch (r.below(3)) {
        case 0: {
            const double skew = r.uniform(-0.5, 0.5), dc = r.uniform(-0.5, 0.5);
            for (auto& v : x) v = r.complex_normal() + Complex(skew * r.normal() + dc, 0.0);
            break;
        }
        case 1: {
            const auto& classes = difficult_classes();
            const Modulation m = classes[r.below(classes.size())];
            if (kind(m) == ModulationKind::analog || kind(m) == ModulationKind::continuous_phase ||
                kind(m) == ModulationKind::offset_digital) {
                x = synthesize(m, n, 0.3, ModemConfig{}, r);
            } else {
                const auto c = constellation_for(m);
                for (auto& v : x) v = c.points[r.below(c.points.size())];
            }
            const double sigma = r.uniform(0.0, 0.5);
            for (auto& v : x) v += sigma * r.complex_normal();
            break;
        }
        default: {
            const double scale = std::pow(10.0, r.uniform(-2.0, 2.0));
            for (auto& v : x) v = scale * Complex(r.uniform(-1.0, 1.0), r.uniform(-1.0, 1.0));
            break;
        }
    }
    return x;
}

bool feature_oracles(Report& rep) {
    Timer t;
    RandomStream r(1001, 0);
    double worst_hom = 0.0, worst_hoc = 0.0, worst_analog = 0.0;
    const std::pair<int, int> cum_orders[] = {{2, 0}, {2, 1}, {4, 0}, {4, 1}, {4, 2}, {6, 0}, {6, 1}, {6, 2}, {6, 3}};
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 32 + r.below(225);
        const Waveform x = oracle_input(r, n);
        for (int p : {2, 4, 6}) {
            for (int q = 0; q <= p; ++q) worst_hom = std::max(worst_hom, rel_err(hom(x, p, q), oracle::hom(x, p, q)));
        }
        const CumulantSet c = hoc(x);
        const Complex got[] = {c.c20, c.c21, c.c40, c.c41, c.c42, c.c60, c.c61, c.c62, c.c63};
        for (std::size_t k = 0; k < 9; ++k) {
            const auto [p, q] = cum_orders[k];
            worst_hoc = std::max(worst_hoc, rel_err(got[k], oracle::cumulant(x, p, q)));
        }
        const auto a = analog_stats(x).values();
        const auto want = oracle::analog(x);
        for (std::size_t k = 0; k < 9; ++k) worst_analog = std::max(worst_analog, rel_err(a[k], want[k]));
    }
    rep.check(worst_hom <= 1e-9, "hom vs direct expectation, 1000 inputs, worst rel err " + fmt("%.3g", worst_hom));
    rep.check(worst_hoc <= 1e-9, "hoc vs set-partition cumulants, 1000 inputs, worst rel err " + fmt("%.3g", worst_hoc));
    rep.check(worst_analog <= 1e-9, "analog_stats vs direct statistics, 1000 inputs, worst rel err " +
                                        fmt("%.3g", worst_analog));

    // Circular complex Gaussian: every cumulant above order 2, and C20, vanishes.
    const std::size_t reps = 200, len = 8192;
    std::vector<std::vector<Complex>> est(8);
    for (std::size_t k = 0; k < reps; ++k) {
        RandomStream g(1002, k);
        Waveform x(len);
        for (auto& v : x) v = g.complex_normal();
        const CumulantSet c = hoc(x);
        const Complex vals[] = {c.c20, c.c40, c.c41, c.c42, c.c60, c.c61, c.c62, c.c63};
        for (std::size_t j = 0; j < 8; ++j) est[j].push_back(vals[j]);
    }
    const char* names[] = {"C20", "C40", "C41", "C42", "C60", "C61", "C62", "C63"};
    double worst_z = 0.0;
    std::string worst_name;
    for (std::size_t j = 0; j < 8; ++j) {
        for (int part = 0; part < 2; ++part) {
            double mean = 0.0, var = 0.0;
            for (const Complex& v : est[j]) mean += part ? v.imag() : v.real();
            mean /= reps;
            for (const Complex& v : est[j]) {
                const double d = (part ? v.imag() : v.real()) - mean;
                var += d * d;
            }
            var /= reps - 1;
            const double z = std::abs(mean) / std::sqrt(var / reps);
            if (z > worst_z) {
                worst_z = z;
                worst_name = std::string(names[j]) + (part ? ".im" : ".re");
            }
        }
    }
    rep.check(worst_z < 5.0, "Gaussian-vanishing cumulants, 200 x 8192 samples, worst |mean|/se " + fmt("%.2f", worst_z) +
                                 " (" + worst_name + ") < 5");

    // Global phase and scale invariance of the 28-vector on channel outputs.
    ExperimentConfig cfg = config_file("difficult24_tau4.json");
    cfg.length = 512;
    cfg.n_examples = 480;
    cfg.impairments.snr_grid = {-10.0, 0.0, 10.0, 30.0, kInfiniteSnr};
    double worst_inv = 0.0;
    int on_cut = 0;
    RandomStream rot(1003, 0);
    for (std::uint64_t i = 0; i < cfg.n_examples; ++i) {
        const IqExample ex = generate_example(cfg, 1003, i);
        const Complex g = std::polar(std::pow(10.0, rot.uniform(-2.0, 2.0)), rot.uniform(0.0, 2.0 * std::numbers::pi));
        Waveform y(ex.samples.size());
        for (std::size_t n = 0; n < y.size(); ++n) y[n] = g * ex.samples[n];
        const auto a = featurize(ex.samples), b = featurize(y);
        const std::size_t checked = distance_to_cut(ex.samples) < 1e-6 ? 22 : kFeatureCount;
        if (checked < kFeatureCount) ++on_cut;
        for (std::size_t k = 0; k < checked; ++k) worst_inv = std::max(worst_inv, rel_err(a[k], b[k]));
    }
    rep.check(worst_inv <= 1e-9, "phase/scale invariance on 480 channel outputs, worst rel err " + fmt("%.3g", worst_inv) +
                                     " (" + std::to_string(on_cut) + " examples on the phase branch cut, 22 features checked there)");
    rep.info("runtime " + fmt("%.1f", t.seconds()) + " s (budget 60 s)");
    return rep.passed() && t.seconds() < 60.0;
}

bool channel_calibration(Report& rep) {
    Timer t;
    ImpairmentProfile profile = config_file("difficult24_tau4.json").impairments;
    const ModemConfig mc;
    const auto& classes = difficult_classes();
    const std::size_t len = 1024;
    StageFlags clean_stages = profile.stages;
    clean_stages.noise = false;
    for (double target : {-10.0, 0.0, 10.0, 20.0}) {
        double sum = 0.0;
        for (std::uint64_t i = 0; i < 1000; ++i) {
            RandomStream pr(2001, i, 0), mr(2001, i, 1), nr(2001, i, 2), unused(2001, i, 3);
            ChannelParams p = draw_params(profile, pr);
            p.snr_db = target;
            const Waveform src = synthesize(classes[i % classes.size()], required_input_length(p, len), p.alpha, mc, mr);
            const IqExample clean = impair(src, p, len, unused, clean_stages);
            const IqExample noisy = impair(src, p, len, nr, profile.stages);
            sum += measure_snr(clean.samples, noisy.samples);
        }
        const double mean = sum / 1000.0;
        rep.check(std::abs(mean - target) <= 0.2, "target " + fmt("%+.0f", target) + " dB: mean measured " +
                                                       fmt("%+.4f", mean) + " dB over 1000 examples (tol 0.2)");
    }

    double worst_power = 0.0;
    std::size_t draws = 0;
    for (double tau : {0.0, 0.25, 1.0, 2.0, 4.0, 8.0}) {
        for (int paths : {1, 2, 4, 8, 16}) {
            for (std::uint64_t i = 0; i < 400; ++i) {
                RandomStream fr(2002, i, static_cast<std::uint64_t>(paths));
                double pw = 0.0;
                for (const auto& tap : draw_fading(tau, paths, fr)) pw += std::norm(tap.gain);
                worst_power = std::max(worst_power, std::abs(pw - 1.0));
                ++draws;
            }
        }
    }
    rep.check(worst_power <= 1e-9, "fading tap power, " + std::to_string(draws) + " draws, worst |sum|g|^2 - 1| " +
                                       fmt("%.3g", worst_power));

    const std::size_t n = 2048;
    const double f0 = 0.2;
    for (double dfs : {-0.01, -0.003, 0.002, 0.01}) {
        Waveform tone(n + 64);
        for (std::size_t k = 0; k < tone.size(); ++k) tone[k] = std::polar(1.0, 2.0 * std::numbers::pi * f0 * k);
        const Waveform y = apply_sro_timing(tone, dfs, 8.0, n);
        const auto bin = static_cast<long>(oracle::argmax(oracle::periodogram(y)));
        const auto want = std::lround(f0 / (1.0 + dfs) * static_cast<double>(n));
        const auto unshifted = std::lround(f0 * static_cast<double>(n));
        rep.check(std::abs(bin - want) <= 1, "SRO " + fmt("%+.3f", dfs) + ": tone peak bin " + std::to_string(bin) +
                                                 ", expected " + std::to_string(want) + " (unshifted " +
                                                 std::to_string(unshifted) + ")");
    }
    rep.info("runtime " + fmt("%.1f", t.seconds()) + " s (budget 120 s)");
    return rep.passed() && t.seconds() < 120.0;
}

struct Toy {
    std::vector<float> x;
    std::vector<std::uint16_t> y;
    std::size_t rows = 0, cols = 0;
    gbt::MatrixView view() const { return {x, rows, cols}; }
};

bool gbt_correctness(Report& rep) {
    Timer t;
    RandomStream r(3001, 0);
    int agree = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 2 + r.below(40);
        std::vector<float> v(n);
        std::vector<double> g(n), h(n);
        const bool coarse = trial % 3 == 0;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = coarse ? static_cast<float>(r.below(5)) : static_cast<float>(r.normal());
            g[i] = r.normal();
            h[i] = r.uniform(0.01, 1.0);
        }
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
        std::vector<float> sv;
        std::vector<double> sg, sh;
        for (auto i : order) {
            sv.push_back(v[i]);
            sg.push_back(g[i]);
            sh.push_back(h[i]);
        }
        const double lambda = r.uniform(0, 2), gamma = r.uniform(0, 0.3), mcw = r.uniform(0, 1.5);
        const auto got = gbt::best_split(sv, sg, sh, {lambda, gamma, mcw});
        const auto want = oracle::exhaustive_split(v, g, h, lambda, gamma, mcw);
        bool same = got.found == want.found;
        if (same && got.found) same = got.threshold == want.threshold && rel_err(got.gain, want.gain) <= 1e-9;
        agree += same;
    }
    rep.check(agree == 500, "best_split equals exhaustive search on " + std::to_string(agree) + "/500 instances");

    gbt::TrainConfig xcfg;
    xcfg.rounds = 20;
    xcfg.max_depth = 2;
    xcfg.subsample = 1.0;
    int perfect = 0, tried = 0;
    for (int trial = 0; trial < 20; ++trial) {
        int sizes[4];
        for (int& s : sizes) s = 15 + static_cast<int>(r.below(21));
        if (sizes[0] == sizes[1] && sizes[1] == sizes[2] && sizes[2] == sizes[3]) continue;
        Toy toy;
        toy.cols = 2;
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                for (int i = 0; i < sizes[2 * a + b]; ++i) {
                    toy.x.push_back(static_cast<float>(a));
                    toy.x.push_back(static_cast<float>(b));
                    toy.y.push_back(static_cast<std::uint16_t>(a ^ b));
                    ++toy.rows;
                }
            }
        }
        const auto res = gbt::train(toy.view(), toy.y, 2, xcfg);
        const auto pred = res.model.predict_all(toy.view());
        std::size_t correct = 0;
        for (std::size_t i = 0; i < toy.rows; ++i) correct += pred[i] == toy.y[i];
        perfect += correct == toy.rows;
        ++tried;
    }
    rep.check(perfect == tried, "XOR (4 clusters, depth 2, 20 rounds) at 100% train accuracy in " +
                                    std::to_string(perfect) + "/" + std::to_string(tried) + " layouts");

    ExperimentConfig fc = config_file("smoke.json");
    const FeatureTable table = generate_features(fc, 3001, g_workers);
    const gbt::MatrixView xv{table.values, table.rows, table.cols};
    gbt::TrainConfig lcfg;
    lcfg.rounds = 100;
    lcfg.learning_rate = 0.1;
    lcfg.subsample = 1.0;
    const auto mono = gbt::train(xv, table.labels, 11, lcfg);
    int increases = 0;
    for (std::size_t k = 1; k < mono.report.train_logloss.size(); ++k) {
        increases += mono.report.train_logloss[k] > mono.report.train_logloss[k - 1];
    }
    rep.check(increases == 0 && mono.report.train_loss_increases == 0,
              "train log-loss non-increasing over 100 rounds at learning_rate 0.1 (" + std::to_string(increases) +
                  " increases, " + fmt("%.4f", mono.report.train_logloss.front()) + " -> " +
                  fmt("%.4f", mono.report.train_logloss.back()) + ")");

    gbt::TrainConfig tcfg;
    tcfg.rounds = 30;
    tcfg.subsample = 0.8;
    tcfg.seed = 9;
    gbt::TrainOptions one, eight;
    one.workers = 1;
    eight.workers = 8;
    const auto a = gbt::train(xv, table.labels, 11, tcfg, one);
    const auto b = gbt::train(xv, table.labels, 11, tcfg, eight);
    rep.check(a.model.to_json() == b.model.to_json() && a.model.trees() == b.model.trees(),
              "models bit-identical for 1 and 8 worker threads (" + std::to_string(a.model.trees().size()) + " trees)");
    rep.info("runtime " + fmt("%.1f", t.seconds()) + " s (budget 300 s)");
    return rep.passed() && t.seconds() < 300.0;
}

struct Trained {
    BaselineRun run;
    ExperimentConfig cfg;
};

Trained train_on(const ExperimentConfig& cfg, std::uint64_t seed) {
    Timer t;
    const FeatureTable table = generate_features(cfg, seed, g_workers);
    log_progress("generated " + std::to_string(table.rows) + " rows in " + fmt("%.1f", t.seconds()) + " s");
    Timer tt;
    Trained out{train_baseline(table, cfg, g_workers), cfg};
    log_progress("trained in " + fmt("%.1f", tt.seconds()) + " s");
    return out;
}

Evaluation score_holdout(const Trained& tr, ExperimentConfig holdout_cfg, std::uint64_t seed) {
    const FeatureTable h = generate_features(holdout_cfg, seed, g_workers);
    return evaluate(tr.run.model, h, {}, tr.cfg.eval, tr.cfg.class_names());
}

bool easy11_curve(Report& rep) {
    Timer t;
    const ExperimentConfig cfg = config_file("easy11_awgn.json");
    rep.info("N=" + std::to_string(cfg.n_examples) + ", length " + std::to_string(cfg.length) + ", " +
             std::to_string(cfg.train.rounds) + " rounds, scored on an independent 50000-example holdout");
    const Trained tr = train_on(cfg, kTrainSeed);
    ExperimentConfig hcfg = cfg;
    hcfg.n_examples = 50000;
    const Evaluation ev = score_holdout(tr, hcfg, holdout_seed(kTrainSeed));

    std::ostringstream curve;
    std::vector<double> snr, acc;
    for (const auto& b : ev.curve.bins) {
        snr.push_back(b.snr_db);
        acc.push_back(b.accuracy);
        curve << ' ' << b.snr_db << ':' << fmt("%.3f", b.accuracy);
    }
    rep.info("curve" + curve.str());
    const double a10 = ev.curve.accuracy_at(10.0);
    rep.check(a10 >= 0.8, "accuracy at +10 dB " + fmt("%.4f", a10) + " >= 0.80");
    const auto low = std::find_if(ev.curve.bins.begin(), ev.curve.bins.end(), [](const SnrBin& b) { return b.snr_db == -20.0; });
    if (low == ev.curve.bins.end()) {
        rep.check(false, "no -20 dB bin in the evaluation");
    } else {
        const double chance = 1.0 / 11.0, sigma = oracle::binomial_sigma(chance, low->n);
        rep.check(std::abs(low->accuracy - chance) <= 3.0 * sigma,
                  "accuracy at -20 dB " + fmt("%.4f", low->accuracy) + " vs chance " + fmt("%.4f", chance) + " (|z| = " +
                      fmt("%.2f", std::abs(low->accuracy - chance) / sigma) + ", n = " + std::to_string(low->n) + ") within 3 sigma");
    }
    const double rho = spearman(snr, acc);
    rep.check(rho >= 0.95, "Spearman rank correlation of accuracy vs SNR " + fmt("%.4f", rho) + " >= 0.95");

    const Evaluation test_part = [&] {
        const FeatureTable table = generate_features(cfg, kTrainSeed, g_workers);
        return evaluate(tr.run.model, table, tr.run.split.test, cfg.eval, cfg.class_names());
    }();
    std::vector<double> ts, ta;
    for (const auto& b : test_part.curve.bins) {
        ts.push_back(b.snr_db);
        ta.push_back(b.accuracy);
    }
    rep.info("for reference, on the " + std::to_string(tr.run.split.test.size()) + "-row test partition: +10 dB " +
             fmt("%.4f", test_part.curve.accuracy_at(10.0)) + ", -20 dB " + fmt("%.4f", test_part.curve.accuracy_at(-20.0)) +
             ", Spearman " + fmt("%.4f", spearman(ts, ta)));
    rep.info("runtime " + fmt("%.1f", t.seconds()) + " s (budget 1800 s)");
    return rep.passed() && t.seconds() <= 1800.0;
}

bool impairment_ordering(Report& rep) {
    Timer t;
    const char* files[] = {"difficult24_awgn.json", "difficult24_tau1.json", "difficult24_tau4.json"};
    const char* labels[] = {"AWGN", "tau=1", "tau=4"};
    double acc[3];
    for (int k = 0; k < 3; ++k) {
        const ExperimentConfig cfg = config_file(files[k]);
        log_progress(std::string(labels[k]) + ": training");
        const Trained tr = train_on(cfg, kTrainSeed);
        ExperimentConfig hcfg = cfg;
        hcfg.impairments.snr_grid = {10.0};
        hcfg.n_examples = 4800;
        const Evaluation ev = score_holdout(tr, hcfg, holdout_seed(kTrainSeed));
        acc[k] = ev.curve.accuracy_at(10.0);
        rep.info(std::string(labels[k]) + " (" + files[k] + "): accuracy at +10 dB " + fmt("%.4f", acc[k]) +
                 " on 4800 holdout examples (sigma ~" + fmt("%.4f", oracle::binomial_sigma(acc[k], 4800)) + ")");
    }
    rep.check(acc[0] - acc[1] >= 0.03, "AWGN - tau=1 gap " + fmt("%.4f", acc[0] - acc[1]) + " >= 0.03");
    rep.check(acc[1] - acc[2] >= 0.03, "tau=1 - tau=4 gap " + fmt("%.4f", acc[1] - acc[2]) + " >= 0.03");
    rep.info("runtime " + fmt("%.1f", t.seconds()) + " s (budget 2700 s)");
    return rep.passed() && t.seconds() <= 2700.0;
}

bool monotone_sweeps(Report& rep) {
    Timer t;
    ExperimentConfig base = config_file("difficult24_awgn.json");
    base.holdout_examples = 24000;
    struct Axis {
        SweepAxis axis;
        std::vector<double> values;
        std::uint64_t n;
    };
    const Axis axes[] = {{SweepAxis::n, {2000, 8000, 32000}, 0}, {SweepAxis::length, {64, 256, 1024}, 32000}};
    for (const Axis& ax : axes) {
        ExperimentConfig cfg = base;
        if (ax.n) cfg.n_examples = ax.n;
        const auto points = sweep(cfg, ax.axis, ax.values, kTrainSeed, g_workers, {}, log_progress);
        std::ostringstream line;
        for (const auto& p : points) line << ' ' << p.value << ':' << fmt("%.4f", p.evaluation.high_snr_accuracy);
        rep.info(sweep_axis_name(ax.axis) + " sweep, high-SNR (>= " + fmt("%.0f", cfg.eval.high_snr_min) +
                 " dB) accuracy on 24000-example holdouts:" + line.str());
        for (std::size_t k = 1; k < points.size(); ++k) {
            const double step = points[k].evaluation.high_snr_accuracy - points[k - 1].evaluation.high_snr_accuracy;
            rep.check(step >= 0.01, sweep_axis_name(ax.axis) + " " + fmt("%g", points[k - 1].value) + " -> " +
                                        fmt("%g", points[k].value) + ": +" + fmt("%.4f", step) + " >= 0.01");
        }
    }
    rep.info("runtime " + fmt("%.1f", t.seconds()) + " s");
    return rep.passed();
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

bool format_determinism(Report& rep) {
    Timer t;
    ExperimentConfig cfg = config_file("difficult24_tau4.json");
    cfg.n_examples = 2400;
    cfg.length = 512;
    const std::uint64_t seed = 7001;
    const fs::path a = g_scratch / "a.rscd", b = g_scratch / "b.rscd", c = g_scratch / "c.rscd";
    generate_dataset(cfg, seed, a.string(), 1);

    DatasetReader reader(a.string());
    const DatasetManifest m = reader.manifest();
    std::size_t exact = 0;
    for (std::uint64_t i = 0; i < m.n_examples; ++i) {
        const IqExample stored = reader.read(i);
        const IqExample fresh = generate_example(cfg, seed, i);
        exact += stored.samples == fresh.samples && stored.label == fresh.label &&
                 stored.snr_db == static_cast<double>(static_cast<float>(fresh.snr_db));
    }
    rep.check(exact == m.n_examples, "stored examples equal regenerated ones bit for bit: " + std::to_string(exact) +
                                         "/" + std::to_string(m.n_examples));

    const std::vector<IqExample> all = read_dataset(a.string());
    write_dataset(c.string(), m, all);
    rep.check(slurp(a) == slurp(c) && slurp(manifest_path(a.string())) == slurp(manifest_path(c.string())),
              "RSCD read + rewrite reproduces file and manifest byte for byte (" + std::to_string(fs::file_size(a)) +
                  " bytes)");

    const ExperimentConfig from_manifest = parse_config(m.config_json);
    generate_dataset(from_manifest, m.master_seed, b.string(), 4);
    rep.check(slurp(a) == slurp(b) && slurp(manifest_path(a.string())) == slurp(manifest_path(b.string())),
              "regeneration from the manifest alone with 4 workers is byte-identical to the 1-worker file");

    const FeatureTable f1 = featurize_dataset(a.string(), 1), f4 = featurize_dataset(b.string(), 4);
    rep.check(f1.values == f4.values && f1.labels == f4.labels, "feature tables identical across worker counts");
    rep.info("runtime " + fmt("%.1f", t.seconds()) + " s");
    return rep.passed();
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<std::string, std::function<bool(Report&)>> criteria{
        {"feature_oracles", feature_oracles},       {"channel_calibration", channel_calibration},
        {"gbt_correctness", gbt_correctness},       {"easy11_curve", easy11_curve},
        {"impairment_ordering", impairment_ordering}, {"monotone_sweeps", monotone_sweeps},
        {"format_determinism", format_determinism}};
    const std::vector<std::string> order{"feature_oracles", "channel_calibration", "gbt_correctness", "format_determinism",
                                         "easy11_curve",    "impairment_ordering", "monotone_sweeps"};

    CLI::App app{"rfforge acceptance criteria"};
    std::vector<std::string> selected;
    g_workers = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("criteria", selected, "criteria to run (default: all)");
    app.add_option("--workers", g_workers, "worker threads for generation and training");
    CLI11_PARSE(app, argc, argv);
    if (selected.empty()) selected = order;

    g_scratch = fs::temp_directory_path() / ("rfforge_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(g_scratch);
    int failed = 0;
    for (const auto& name : selected) {
        const auto it = criteria.find(name);
        if (it == criteria.end()) {
            std::cerr << "unknown criterion " << name << '\n';
            return 2;
        }
        Report rep;
        bool ok = false;
        std::string error;
        try {
            ok = it->second(rep);
        } catch (const std::exception& e) {
            error = e.what();
        }
        if (!error.empty()) {
            std::cout << "FAIL " << name << ": exception: " << error << '\n';
        } else {
            std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << rep.summary() << (ok || !rep.passed() ? "" : ", over budget")
                      << '\n';
        }
        std::cout << std::flush;
        failed += !ok;
    }
    fs::remove_all(g_scratch);
    return failed == 0 ? 0 : 1;
}
