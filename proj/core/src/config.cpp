#include "rfforge/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "rfforge/errors.hpp"

namespace rfforge {

namespace {

using nlohmann::json;

json snr_value(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json_object(const ExperimentConfig& c) {
    json classes;
    const std::string comp = c.composition();
    if (comp == "custom") {
        classes = c.class_names();
    } else {
        classes = comp;
    }
    json grid = json::array();
    for (double v : c.impairments.snr_grid) grid.push_back(snr_value(v));
    const auto& a = c.modem.analog;
    const auto& s = c.impairments.stages;
    return json{
        {"classes", classes},
        {"n_examples", c.n_examples},
        {"length", c.length},
        {"sps", c.modem.sps},
        {"span_symbols", c.modem.span_symbols},
        {"gmsk_bt", c.modem.gmsk_bt},
        {"analog",
         {{"source", a.kind == AnalogSourceConfig::Kind::tone ? "tone" : "gaussian"},
          {"cutoff", a.cutoff},
          {"tone_freq", a.tone_freq},
          {"carrier_ratio", a.carrier_ratio},
          {"fm_deviation", a.fm_deviation},
          {"lowpass_taps", a.lowpass_taps},
          {"hilbert_taps", a.hilbert_taps}}},
        {"impairments",
         {{"sigma_clk", c.impairments.sigma_clk},
          {"tau", c.impairments.tau},
          {"n_paths", c.impairments.n_paths},
          {"snr_grid", grid},
          {"shared_clock", c.impairments.shared_clock},
          {"stages", {{"timing", s.timing}, {"fading", s.fading}, {"cfo", s.cfo}, {"noise", s.noise}}}}},
        {"split",
         {{"train_fraction", c.split.train_fraction}, {"seed", c.split.seed}, {"snr_bin_width", c.split.snr_bin_width}}},
        {"train",
         {{"rounds", c.train.rounds},
          {"max_depth", c.train.max_depth},
          {"learning_rate", c.train.learning_rate},
          {"lambda", c.train.lambda},
          {"gamma", c.train.gamma},
          {"min_child_weight", c.train.min_child_weight},
          {"subsample", c.train.subsample},
          {"seed", c.train.seed}}},
        {"eval",
         {{"bin_width", c.eval.bin_width},
          {"confusion_snr_min", c.eval.confusion_snr_min},
          {"high_snr_min", c.eval.high_snr_min}}},
        {"holdout_examples", c.holdout_examples},
        {"seed", c.seed ? json(*c.seed) : json(nullptr)},
    };
}

// Reads keys of one object, rejecting unknown ones.
class Fields {
public:
    Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
    }
    ~Fields() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [k, v] : j_.items()) {
            if (!seen_.count(k)) throw ConfigError(where_ + ": unknown key '" + k + "'");
        }
    }
    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where_ + ": bad value for '" + key + "'");
        }
    }
    const json* sub(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

std::vector<Modulation> parse_classes(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "normal") return normal_classes();
        if (s == "difficult") return difficult_classes();
        throw ConfigError("config: classes must be 'normal', 'difficult' or a list of names");
    }
    if (!j.is_array() || j.empty()) throw ConfigError("config: classes must be a non-empty list");
    std::vector<Modulation> out;
    for (const json& v : j) {
        if (!v.is_string()) throw ConfigError("config: class names must be strings");
        const auto m = parse_modulation(v.get<std::string>());
        if (!m) throw ConfigError("config: unknown modulation '" + v.get<std::string>() + "'");
        out.push_back(*m);
    }
    return out;
}

std::vector<double> parse_grid(const json& j) {
    if (j.is_object()) {
        double lo = 0, hi = 0, step = 0;
        Fields f(j, "impairments.snr_grid");
        f.get("lo", lo);
        f.get("hi", hi);
        f.get("step", step);
        return make_snr_grid(lo, hi, step);
    }
    if (!j.is_array()) throw ConfigError("config: snr_grid must be a list or {lo, hi, step}");
    std::vector<double> out;
    for (const json& v : j) {
        if (v.is_null()) out.push_back(kInfiniteSnr);
        else if (v.is_number()) out.push_back(v.get<double>());
        else throw ConfigError("config: snr_grid entries must be numbers or null");
    }
    return out;
}

ExperimentConfig from_json_object(const json& j) {
    ExperimentConfig c;
    Fields top(j, "config");
    if (const json* v = top.sub("classes")) c.classes = parse_classes(*v);
    top.get("n_examples", c.n_examples);
    top.get("length", c.length);
    top.get("sps", c.modem.sps);
    top.get("span_symbols", c.modem.span_symbols);
    top.get("gmsk_bt", c.modem.gmsk_bt);
    top.get("holdout_examples", c.holdout_examples);
    if (const json* v = top.sub("seed"); v && !v->is_null()) {
        if (!v->is_number_unsigned()) throw ConfigError("config: seed must be a non-negative integer");
        c.seed = v->get<std::uint64_t>();
    }
    if (const json* v = top.sub("analog")) {
        Fields f(*v, "analog");
        auto& a = c.modem.analog;
        std::string source = a.kind == AnalogSourceConfig::Kind::tone ? "tone" : "gaussian";
        f.get("source", source);
        if (source == "tone") a.kind = AnalogSourceConfig::Kind::tone;
        else if (source == "gaussian") a.kind = AnalogSourceConfig::Kind::gaussian;
        else throw ConfigError("analog: source must be 'gaussian' or 'tone'");
        f.get("cutoff", a.cutoff);
        f.get("tone_freq", a.tone_freq);
        f.get("carrier_ratio", a.carrier_ratio);
        f.get("fm_deviation", a.fm_deviation);
        f.get("lowpass_taps", a.lowpass_taps);
        f.get("hilbert_taps", a.hilbert_taps);
    }
    if (const json* v = top.sub("impairments")) {
        Fields f(*v, "impairments");
        auto& p = c.impairments;
        f.get("sigma_clk", p.sigma_clk);
        f.get("tau", p.tau);
        f.get("n_paths", p.n_paths);
        f.get("shared_clock", p.shared_clock);
        if (const json* g = f.sub("snr_grid")) p.snr_grid = parse_grid(*g);
        if (const json* s = f.sub("stages")) {
            Fields fs(*s, "impairments.stages");
            fs.get("timing", p.stages.timing);
            fs.get("fading", p.stages.fading);
            fs.get("cfo", p.stages.cfo);
            fs.get("noise", p.stages.noise);
        }
    }
    if (const json* v = top.sub("split")) {
        Fields f(*v, "split");
        f.get("train_fraction", c.split.train_fraction);
        f.get("seed", c.split.seed);
        f.get("snr_bin_width", c.split.snr_bin_width);
    }
    if (const json* v = top.sub("train")) {
        Fields f(*v, "train");
        f.get("rounds", c.train.rounds);
        f.get("max_depth", c.train.max_depth);
        f.get("learning_rate", c.train.learning_rate);
        f.get("lambda", c.train.lambda);
        f.get("gamma", c.train.gamma);
        f.get("min_child_weight", c.train.min_child_weight);
        f.get("subsample", c.train.subsample);
        f.get("seed", c.train.seed);
    }
    if (const json* v = top.sub("eval")) {
        Fields f(*v, "eval");
        f.get("bin_width", c.eval.bin_width);
        f.get("confusion_snr_min", c.eval.confusion_snr_min);
        f.get("high_snr_min", c.eval.high_snr_min);
    }
    return c;
}

}  // namespace

void EvalConfig::validate() const {
    if (!(bin_width > 0.0)) throw ConfigError("eval: bin_width must be > 0");
    if (std::isnan(confusion_snr_min) || std::isnan(high_snr_min)) throw ConfigError("eval: thresholds must be numbers");
}

std::string ExperimentConfig::composition() const {
    if (classes == normal_classes()) return "normal";
    if (classes == difficult_classes()) return "difficult";
    return "custom";
}

std::vector<std::string> ExperimentConfig::class_names() const {
    std::vector<std::string> out;
    for (Modulation m : classes) out.emplace_back(name(m));
    return out;
}

void ExperimentConfig::validate() const {
    if (classes.empty()) throw ConfigError("config: empty class list");
    std::set<Modulation> unique(classes.begin(), classes.end());
    if (unique.size() != classes.size()) throw ConfigError("config: duplicate class");
    if (n_examples < 1) throw ConfigError("config: n_examples must be >= 1");
    if (length < 16) throw ConfigError("config: length must be >= 16");
    modem.validate();
    for (Modulation m : classes) {
        if (m == Modulation::oqpsk && modem.sps % 2 != 0) throw ConfigError("config: sps must be even for OQPSK");
    }
    impairments.validate();
    split.validate();
    train.validate();
    eval.validate();
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: malformed json: ") + e.what());
    }
    ExperimentConfig c = from_json_object(j);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open config " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::string to_json(const ExperimentConfig& cfg) { return to_json_object(cfg).dump(); }

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + assignment);
    const std::string key = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::exception&) {
        value = text;
    }
    json j = to_json_object(cfg);
    json* node = &j;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!node->is_object() || !node->contains(part)) throw ConfigError("unknown config key '" + key + "'");
        node = &(*node)[part];
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    *node = value;
    ExperimentConfig next = from_json_object(j);
    next.validate();
    cfg = std::move(next);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string config_hash(const ExperimentConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(cfg))));
    return buf;
}

}  // namespace rfforge
