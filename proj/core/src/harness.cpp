#include "rfforge/harness.hpp"

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "rfforge/channel.hpp"
#include "rfforge/errors.hpp"
#include "rfforge/modem.hpp"
#include "rfforge/random.hpp"

namespace rfforge {

namespace {

using nlohmann::json;

constexpr std::size_t kChunk = 256;

void note(const ProgressFn& progress, const std::string& msg) {
    if (progress) progress(msg);
}

void write_sidecar(const std::string& path, json j) {
    std::ofstream os(path + ".json", std::ios::trunc);
    if (!os) throw DataError("cannot open " + path + ".json for writing");
    os << j.dump(2) << '\n';
    if (!os) throw DataError("short write to " + path + ".json");
}

std::string format_value(double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

}  // namespace

IqExample generate_example(const ExperimentConfig& cfg, std::uint64_t seed, std::uint64_t index) {
    const RandomStream root(seed, index, 0);
    RandomStream param_rng = root.fork(0);
    RandomStream modem_rng = root.fork(1);
    RandomStream noise_rng = root.fork(2);

    const std::size_t k = cfg.classes.size();
    const std::uint16_t label = assigned_label(index, k);
    ChannelParams p = draw_params(cfg.impairments, param_rng);
    p.snr_db = assigned_snr(index, k, cfg.impairments.snr_grid);

    const auto& stages = cfg.impairments.stages;
    const std::size_t n_in = required_input_length(p, cfg.length, stages);
    const Waveform clean = synthesize(cfg.classes[label], n_in, p.alpha, cfg.modem, modem_rng);
    IqExample ex = impair(clean, p, cfg.length, noise_rng, stages);
    ex.label = label;
    ex.example_index = index;
    for (Complex& s : ex.samples) {
        s = Complex(static_cast<float>(s.real()), static_cast<float>(s.imag()));
    }
    return ex;
}

DatasetManifest make_manifest(const ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    ExperimentConfig echo = cfg;
    echo.seed = seed;
    DatasetManifest m;
    m.composition = cfg.composition();
    m.class_names = cfg.class_names();
    m.n_examples = cfg.n_examples;
    m.length = cfg.length;
    m.snr_grid = cfg.impairments.stages.noise ? cfg.impairments.snr_grid : std::vector<double>{kInfiniteSnr};
    m.master_seed = seed;
    m.config_json = to_json(echo);
    m.config_hash = config_hash(echo);
    return m;
}

void generate_stream(const ExperimentConfig& cfg, std::uint64_t seed, unsigned workers,
                     const std::function<void(IqExample&&)>& sink) {
    cfg.validate();
    const std::uint64_t n = cfg.n_examples;
    workers = static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(workers, n)));
    if (workers == 1) {
        for (std::uint64_t i = 0; i < n; ++i) sink(generate_example(cfg, seed, i));
        return;
    }

    const std::uint64_t window = 4ull * workers;
    std::mutex mu;
    std::condition_variable cv_ready, cv_space;
    std::map<std::uint64_t, IqExample> ready;
    std::uint64_t next_write = 0;
    bool abort = false;
    std::exception_ptr failure;
    std::atomic<std::uint64_t> next_index{0};

    auto fail = [&](std::exception_ptr e) {
        {
            std::lock_guard lk(mu);
            if (!failure) failure = e;
            abort = true;
        }
        cv_ready.notify_all();
        cv_space.notify_all();
    };

    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::uint64_t i; (i = next_index.fetch_add(1)) < n;) {
                {
                    std::unique_lock lk(mu);
                    cv_space.wait(lk, [&] { return abort || i < next_write + window; });
                    if (abort) return;
                }
                try {
                    IqExample ex = generate_example(cfg, seed, i);
                    {
                        std::lock_guard lk(mu);
                        ready.emplace(i, std::move(ex));
                    }
                    cv_ready.notify_one();
                } catch (...) {
                    fail(std::current_exception());
                    return;
                }
            }
        });
    }

    for (std::uint64_t i = 0; i < n; ++i) {
        IqExample ex;
        {
            std::unique_lock lk(mu);
            cv_ready.wait(lk, [&] { return abort || ready.count(i) > 0; });
            if (abort) break;
            auto it = ready.find(i);
            ex = std::move(it->second);
            ready.erase(it);
            next_write = i + 1;
        }
        cv_space.notify_all();
        try {
            sink(std::move(ex));
        } catch (...) {
            fail(std::current_exception());
            break;
        }
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

DatasetManifest generate_dataset(const ExperimentConfig& cfg, std::uint64_t seed, const std::string& path,
                                 unsigned workers) {
    DatasetManifest m = make_manifest(cfg, seed);
    DatasetWriter w(path, m);
    generate_stream(cfg, seed, workers, [&](IqExample&& ex) { w.write(ex); });
    w.finish();
    return m;
}

FeatureTable generate_features(const ExperimentConfig& cfg, std::uint64_t seed, unsigned workers,
                               const std::string& dataset_path) {
    std::optional<DatasetWriter> writer;
    if (!dataset_path.empty()) writer.emplace(dataset_path, make_manifest(cfg, seed));
    FeatureTable table;
    table.values.reserve(static_cast<std::size_t>(cfg.n_examples) * kFeatureCount);
    std::vector<IqExample> chunk;
    chunk.reserve(kChunk);
    auto flush = [&] {
        const auto fv = featurize_batch(chunk, workers);
        for (std::size_t i = 0; i < chunk.size(); ++i) table.append(fv[i], chunk[i].label, chunk[i].snr_db);
        chunk.clear();
    };
    generate_stream(cfg, seed, workers, [&](IqExample&& ex) {
        if (writer) writer->write(ex);
        chunk.push_back(std::move(ex));
        if (chunk.size() == kChunk) flush();
    });
    flush();
    if (writer) writer->finish();
    return table;
}

FeatureTable featurize_dataset(const std::string& dataset_path, unsigned workers, DatasetManifest* manifest) {
    DatasetReader reader(dataset_path);
    if (manifest) *manifest = reader.manifest();
    FeatureTable table;
    table.values.reserve(static_cast<std::size_t>(reader.size()) * kFeatureCount);
    std::vector<IqExample> chunk(kChunk);
    while (true) {
        std::size_t got = 0;
        while (got < kChunk && reader.next(chunk[got])) ++got;
        if (got == 0) break;
        const auto fv = featurize_batch(std::span<const IqExample>(chunk.data(), got), workers);
        for (std::size_t i = 0; i < got; ++i) table.append(fv[i], chunk[i].label, chunk[i].snr_db);
        if (got < kChunk) break;
    }
    return table;
}

SplitIndices split_table(const FeatureTable& table, const SplitSpec& spec) {
    std::vector<double> snrs(table.snr_db.begin(), table.snr_db.end());
    return split(table.labels, snrs, spec);
}

BaselineRun train_baseline(const FeatureTable& table, const ExperimentConfig& cfg, unsigned workers,
                           const ProgressFn& progress) {
    if (table.rows == 0) throw DataError("train_baseline: empty feature table");
    BaselineRun run;
    run.split = split_table(table, cfg.split);
    const FeatureTable tr = table.select(run.split.train);
    const FeatureTable te = table.select(run.split.test);
    const gbt::MatrixView xtr{tr.values, tr.rows, tr.cols};
    const gbt::ValidationSet valid{gbt::MatrixView{te.values, te.rows, te.cols}, te.labels};

    gbt::TrainOptions opt;
    opt.workers = workers;
    opt.validation = te.rows > 0 ? &valid : nullptr;
    for (auto n : FeatureVector::names()) opt.feature_names.emplace_back(n);
    if (table.cols != kFeatureCount) opt.feature_names.clear();
    if (progress) {
        opt.on_round = [&](int round, double tl, double vl) {
            if ((round + 1) % 10 == 0 || round + 1 == cfg.train.rounds) {
                std::ostringstream ss;
                ss << "round " << round + 1 << " train_logloss " << tl << " valid_logloss " << vl;
                progress(ss.str());
            }
        };
    }
    auto result = gbt::train(xtr, tr.labels, static_cast<int>(cfg.classes.size()), cfg.train, opt);
    run.model = std::move(result.model);
    run.report = std::move(result.report);
    return run;
}

Evaluation evaluate(const gbt::GbtModel& model, const FeatureTable& table, std::span<const std::size_t> rows,
                    const EvalConfig& eval, std::vector<std::string> class_names) {
    eval.validate();
    if (class_names.size() != static_cast<std::size_t>(model.n_classes())) {
        throw DataError("evaluate: class list does not match the model");
    }
    Evaluation ev;
    auto score = [&](std::size_t r) {
        if (r >= table.rows) throw DataError("evaluate: row index out of range");
        ev.predictions.push_back(model.predict(table.row(r)));
        ev.truths.push_back(table.labels[r]);
        ev.snr_db.push_back(table.snr_db[r]);
    };
    if (rows.empty()) {
        for (std::size_t r = 0; r < table.rows; ++r) score(r);
    } else {
        for (std::size_t r : rows) score(r);
    }
    if (ev.predictions.empty()) throw DataError("evaluate: nothing to score");
    ev.curve = accuracy_by_snr(ev.predictions, ev.truths, ev.snr_db, eval.bin_width);
    ev.confusion = confusion(ev.predictions, ev.truths, ev.snr_db, eval.confusion_snr_min, std::move(class_names));
    ev.accuracy = accuracy(ev.predictions, ev.truths);
    ev.high_snr_accuracy = ev.curve.accuracy_above(eval.high_snr_min);
    return ev;
}

void write_evaluation(const std::string& prefix, const Evaluation& ev, const std::string& hash) {
    const std::string curve = prefix + "_curve.csv";
    const std::string conf = prefix + "_confusion.csv";
    write_curve_csv(curve, ev.curve);
    write_confusion_csv(conf, ev.confusion);
    write_sidecar(curve, {{"config_hash", hash}, {"accuracy", ev.accuracy}, {"high_snr_accuracy", ev.high_snr_accuracy}});
    const double smin = ev.confusion.snr_min;
    write_sidecar(conf, {{"config_hash", hash}, {"snr_min", std::isfinite(smin) ? json(smin) : json(nullptr)}});
}

void write_train_report(const std::string& path, const gbt::TrainReport& report, const std::string& hash) {
    json j{{"config_hash", hash},
           {"train_logloss", report.train_logloss},
           {"valid_logloss", report.valid_logloss},
           {"train_loss_increases", report.train_loss_increases}};
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot open " + path + " for writing");
    os << j.dump(2) << '\n';
    if (!os) throw DataError("short write to " + path);
}

SweepAxis parse_sweep_axis(const std::string& text) {
    if (text == "N" || text == "n") return SweepAxis::n;
    if (text == "length" || text == "l" || text == "ell") return SweepAxis::length;
    if (text == "sigma_clk") return SweepAxis::sigma_clk;
    if (text == "tau") return SweepAxis::tau;
    throw ConfigError("unknown sweep axis '" + text + "' (N, length, sigma_clk, tau)");
}

std::string sweep_axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::n: return "N";
        case SweepAxis::length: return "length";
        case SweepAxis::sigma_clk: return "sigma_clk";
        case SweepAxis::tau: return "tau";
    }
    return "?";
}

ExperimentConfig with_axis(const ExperimentConfig& cfg, SweepAxis axis, double value) {
    ExperimentConfig c = cfg;
    auto count = [&](const char* what) {
        if (!(value >= 1.0) || value != std::floor(value)) {
            throw ConfigError(std::string("sweep: ") + what + " values must be positive integers");
        }
        return static_cast<std::uint64_t>(value);
    };
    switch (axis) {
        case SweepAxis::n: c.n_examples = count("N"); break;
        case SweepAxis::length: c.length = static_cast<std::uint32_t>(count("length")); break;
        case SweepAxis::sigma_clk: c.impairments.sigma_clk = value; break;
        case SweepAxis::tau: c.impairments.tau = value; break;
    }
    c.validate();
    return c;
}

std::uint64_t holdout_seed(std::uint64_t seed) noexcept { return fnv1a64("holdout:" + std::to_string(seed)); }

std::vector<SweepPoint> sweep(const ExperimentConfig& base, SweepAxis axis, std::span<const double> values,
                              std::uint64_t seed, unsigned workers, const std::string& out_dir,
                              const ProgressFn& progress) {
    if (values.empty()) throw ConfigError("sweep: no values");
    if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
    std::vector<SweepPoint> points;
    for (double v : values) {
        const ExperimentConfig c = with_axis(base, axis, v);
        const std::string tag = sweep_axis_name(axis) + "=" + format_value(v);
        note(progress, tag + ": generating " + std::to_string(c.n_examples) + " examples");
        const FeatureTable table = generate_features(c, seed, workers);
        note(progress, tag + ": training");
        BaselineRun run = train_baseline(table, c, workers, progress);
        SweepPoint pt;
        pt.value = v;
        if (c.holdout_examples > 0) {
            ExperimentConfig h = c;
            h.n_examples = c.holdout_examples;
            note(progress, tag + ": generating holdout set");
            const FeatureTable ht = generate_features(h, holdout_seed(seed), workers);
            pt.evaluation = evaluate(run.model, ht, {}, c.eval, c.class_names());
        } else {
            pt.evaluation = evaluate(run.model, table, run.split.test, c.eval, c.class_names());
        }
        note(progress, tag + ": high-SNR accuracy " + format_value(pt.evaluation.high_snr_accuracy));
        pt.report = std::move(run.report);
        if (!out_dir.empty()) {
            write_evaluation((std::filesystem::path(out_dir) / ("sweep_" + sweep_axis_name(axis) + "_" + format_value(v))).string(),
                             pt.evaluation, config_hash(c));
        }
        points.push_back(std::move(pt));
    }
    return points;
}

void write_sweep_csv(const std::string& path, SweepAxis axis, std::span<const SweepPoint> points,
                     const std::string& hash) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw DataError("cannot open " + path + " for writing");
    os << "axis,value,snr_db,n,accuracy\n";
    for (const SweepPoint& p : points) {
        for (const SnrBin& b : p.evaluation.curve.bins) {
            os << sweep_axis_name(axis) << ',' << format_value(p.value) << ',' << format_value(b.snr_db) << ',' << b.n
               << ',' << format_value(b.accuracy) << '\n';
        }
    }
    if (!os) throw DataError("short write to " + path);
    json values = json::array();
    for (const SweepPoint& p : points) values.push_back({{"value", p.value}, {"high_snr_accuracy", p.evaluation.high_snr_accuracy}});
    write_sidecar(path, {{"config_hash", hash}, {"axis", sweep_axis_name(axis)}, {"points", values}});
}

}  // namespace rfforge
