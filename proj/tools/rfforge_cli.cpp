// rfforge command-line driver.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <thread>

#include "rfforge/config.hpp"
#include "rfforge/errors.hpp"
#include "rfforge/harness.hpp"

namespace fs = std::filesystem;
using namespace rfforge;

namespace {

struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    unsigned workers = 1;
    std::string out;
    bool quiet = false;
};

ExperimentConfig load(const Common& c) {
    ExperimentConfig cfg = c.config_path.empty() ? ExperimentConfig{} : load_config(c.config_path);
    for (const auto& o : c.overrides) apply_override(cfg, o);
    cfg.validate();
    return cfg;
}

ProgressFn progress_for(const Common& c) {
    if (c.quiet) return {};
    return [](const std::string& msg) { std::cerr << msg << '\n'; };
}

void add_common(CLI::App* app, Common& c, bool config_required) {
    auto* opt = app->add_option("--config", c.config_path, "JSON experiment config");
    if (config_required) opt->required();
    app->add_option("--set", c.overrides, "override one config key, e.g. impairments.tau=2");
    app->add_option("--workers", c.workers, "worker threads")->check(CLI::Range(1u, 1024u));
    app->add_option("--out", c.out, "output path")->required();
    app->add_flag("--quiet", c.quiet, "no progress output");
}

FeatureTable table_from(const std::string& features, const std::string& dataset, unsigned workers,
                        FeatureFileInfo& info) {
    if (!features.empty()) return read_feature_file(features, &info);
    DatasetManifest m;
    FeatureTable t = featurize_dataset(dataset, workers, &m);
    info.class_names = m.class_names;
    info.source_dataset = dataset;
    info.config_hash = m.config_hash;
    return t;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rfforge: synthetic modulation datasets and a tree-ensemble baseline"};
    app.require_subcommand(1);

    Common gen_c;
    std::uint64_t gen_seed = 0;
    auto* gen = app.add_subcommand("generate", "synthesize an RSCD dataset");
    add_common(gen, gen_c, true);
    gen->add_option("--seed", gen_seed, "master seed")->required();

    Common feat_c;
    std::string feat_in;
    auto* feat = app.add_subcommand("featurize", "compute the 28 features of every example");
    add_common(feat, feat_c, false);
    feat->add_option("--dataset", feat_in, "RSCD dataset")->required();

    Common train_c;
    std::string train_in;
    auto* train = app.add_subcommand("train-baseline", "train the gradient-boosted baseline on the train split");
    add_common(train, train_c, true);
    train->add_option("--features", train_in, "RFFT feature file")->required();

    Common eval_c;
    std::string eval_model, eval_features, eval_dataset;
    bool eval_all = false;
    auto* ev = app.add_subcommand("evaluate", "score a model; writes <out>_curve.csv and <out>_confusion.csv");
    add_common(ev, eval_c, true);
    ev->add_option("--model", eval_model, "model JSON")->required();
    auto* ev_f = ev->add_option("--features", eval_features, "RFFT feature file");
    auto* ev_d = ev->add_option("--dataset", eval_dataset, "RSCD dataset");
    ev_f->excludes(ev_d);
    ev->add_flag("--all", eval_all, "score every row instead of the test split");

    Common sweep_c;
    std::uint64_t sweep_seed = 0;
    std::string sweep_axis;
    std::vector<double> sweep_values;
    auto* sw = app.add_subcommand("sweep", "generate/featurize/train/evaluate over one parameter");
    add_common(sw, sweep_c, true);
    sw->add_option("--seed", sweep_seed, "master seed")->required();
    sw->add_option("--axis", sweep_axis, "N, length, sigma_clk or tau")->required();
    sw->add_option("--values", sweep_values, "comma-separated values")->required()->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ErrorKind::config);
    }

    try {
        if (*gen) {
            ExperimentConfig cfg = load(gen_c);
            cfg.seed = gen_seed;
            const auto m = generate_dataset(cfg, gen_seed, gen_c.out, gen_c.workers);
            if (!gen_c.quiet) std::cerr << "wrote " << m.n_examples << " examples to " << gen_c.out << '\n';
        } else if (*feat) {
            if (!feat_c.config_path.empty()) load(feat_c);
            DatasetManifest m;
            const FeatureTable t = featurize_dataset(feat_in, feat_c.workers, &m);
            write_feature_file(feat_c.out, t, {m.class_names, feat_in, m.config_hash});
            if (!feat_c.quiet) std::cerr << "wrote " << t.rows << " feature rows to " << feat_c.out << '\n';
        } else if (*train) {
            const ExperimentConfig cfg = load(train_c);
            FeatureFileInfo info;
            const FeatureTable t = read_feature_file(train_in, &info);
            if (!info.class_names.empty() && info.class_names != cfg.class_names()) {
                throw ConfigError("config class list does not match the feature file");
            }
            BaselineRun run = train_baseline(t, cfg, train_c.workers, progress_for(train_c));
            run.model.set_config_hash(info.config_hash);
            run.model.save(train_c.out);
            write_train_report(train_c.out + ".report.json", run.report, info.config_hash);
            if (!train_c.quiet) std::cerr << "wrote model to " << train_c.out << '\n';
        } else if (*ev) {
            if (eval_features.empty() == eval_dataset.empty()) {
                throw ConfigError("evaluate needs exactly one of --features or --dataset");
            }
            const ExperimentConfig cfg = load(eval_c);
            const gbt::GbtModel model = gbt::GbtModel::load(eval_model);
            FeatureFileInfo info;
            const FeatureTable t = table_from(eval_features, eval_dataset, eval_c.workers, info);
            std::vector<std::size_t> rows;
            if (!eval_all) rows = split_table(t, cfg.split).test;
            const auto names = info.class_names.empty() ? cfg.class_names() : info.class_names;
            const Evaluation e = evaluate(model, t, rows, cfg.eval, names);
            write_evaluation(eval_c.out, e, info.config_hash);
            std::cout << "accuracy " << e.accuracy << " high_snr_accuracy " << e.high_snr_accuracy << '\n';
        } else if (*sw) {
            const ExperimentConfig cfg = load(sweep_c);
            const SweepAxis axis = parse_sweep_axis(sweep_axis);
            fs::create_directories(sweep_c.out);
            const auto points =
                sweep(cfg, axis, sweep_values, sweep_seed, sweep_c.workers, sweep_c.out, progress_for(sweep_c));
            const auto csv = (fs::path(sweep_c.out) / ("sweep_" + sweep_axis_name(axis) + ".csv")).string();
            write_sweep_csv(csv, axis, points, config_hash(cfg));
            for (const auto& p : points) {
                std::cout << sweep_axis_name(axis) << '=' << p.value << " high_snr_accuracy "
                          << p.evaluation.high_snr_accuracy << '\n';
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
