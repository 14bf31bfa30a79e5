#include "clickmine/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "clickmine/rng.hpp"

namespace clickmine {

namespace {

struct KeySpec {
    const char* name;
    const char* def;
    const char* doc;
};

// Single source of truth for keys, defaults and docs.
const std::vector<KeySpec>& key_specs() {
    static const std::vector<KeySpec> specs = {
        // data
        {"window_length", "5", "early-prediction window W (symbols observed)"},
        {"dataset_size", "10000", "instances after resampling / synthesis"},
        {"purchase_ratio", "0.10", "positive fraction enforced by resampling"},
        {"train_size", "2000", "initial labeled set"},
        {"test_size", "1000", "held-out evaluation set"},
        {"pool_size", "7000", "unlabeled pool for querying"},
        {"seed_split", "101", "partition shuffle seed"},
        // synthetic generator
        {"synth_resample", "true", "resample the generated corpus to purchase_ratio"},
        {"synth_oversample", "4.0", "generation factor before resampling"},
        {"synth_min_session_len", "5", "shortest generated session"},
        {"synth_max_session_len", "15", "longest generated session"},
        {"synth_base_rate", "0.03", "purchase probability without the planted pattern"},
        {"synth_lift", "0.85", "purchase probability lift when the pattern is present"},
        {"synth_pattern", "2-3", "planted pattern (dash-joined symbols)"},
        {"seed_synth", "7", "generator seed"},
        // classifier
        {"embedding_dim", "8", "embedding width"},
        {"hidden_dim", "16", "recurrent state width"},
        {"epochs", "40", "training epochs per (re)train"},
        {"batch_size", "32", "mini-batch size"},
        {"learning_rate", "0.15", "gradient-descent step"},
        {"class_weight_positive", "0", "loss weight for purchase instances; 0 disables"},
        {"seed_init", "42", "parameter init seed (mixed per iteration)"},
        {"seed_train", "1", "shuffle seed (mixed per iteration)"},
        // attribution
        {"background_size", "16", "background instances for masking"},
        {"shap_subset_size", "200", "training instances explained for mining"},
        {"shap_permutations", "200", "permutations when sampling is needed"},
        {"exact_max_window", "10", "largest window for coalition enumeration"},
        {"pool_shap_permutations", "20", "permutations per pool instance (shap_max)"},
        {"shap_max_absolute", "false", "score pool by max |phi| instead of signed max"},
        {"seed_shap", "202", "attribution sampling seed"},
        // mining
        {"lmax", "3", "longest candidate pattern"},
        {"k", "5", "patterns kept by top-k mining"},
        {"theta", "", "utility threshold; empty disables threshold mining"},
        {"utility_mode", "shap", "static | shap"},
        {"occurrence_mode", "all", "all | unique"},
        {"threshold_scope", "per-sequence-max", "per-sequence-max | database-sum"},
        {"strict_threshold", "false", "require utility > theta instead of >="},
        // experiment
        {"strategy", "huspm_shap", "random | uncertainty | shap_max | huspm_shap"},
        {"iterations", "6", "active-learning iterations N"},
        {"batch", "1000", "instances labeled per iteration b"},
        {"static_patterns", "false", "mine top-k once instead of every iteration"},
        {"seed_strategy", "33", "selection seed (mixed per iteration)"},
        {"explain_class", "auto", "auto | 0 | 1 (explain command)"},
        {"threads", "1", "worker threads for pool scoring / attribution"},
    };
    return specs;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig::RunConfig() {
    for (const auto& spec : key_specs()) values_[spec.name] = spec.def;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    RunConfig cfg;
    cfg.load_stream(in, path);
    return cfg;
}

void RunConfig::load_stream(std::istream& in, const std::string& origin) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.resize(comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') continue;  // cosmetic section
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        try {
            set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const std::exception& e) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

void RunConfig::set(const std::string& key, const std::string& value) {
    const auto it = values_.find(key);
    if (it == values_.end()) throw std::invalid_argument("unknown config key: " + key);
    it->second = value;
}

void RunConfig::apply_overrides(const std::vector<std::string>& assignments) {
    for (const auto& a : assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("override must look like key=value, got: " + a);
        set(trim(a.substr(0, eq)), trim(a.substr(eq + 1)));
    }
}

std::string RunConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw std::invalid_argument("unknown config key: " + key);
    return it->second;
}

int RunConfig::get_int(const std::string& key) const {
    const std::string v = get(key);
    try {
        std::size_t used = 0;
        const int out = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key " + key + " expects an integer, got '" + v + "'");
    }
}

std::size_t RunConfig::get_size(const std::string& key) const {
    const int v = get_int(key);
    if (v < 0) throw std::invalid_argument("config key " + key + " must be non-negative");
    return static_cast<std::size_t>(v);
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
    const std::string v = get(key);
    try {
        std::size_t used = 0;
        const std::uint64_t out = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key " + key + " expects an unsigned integer, got '" + v + "'");
    }
}

double RunConfig::get_double(const std::string& key) const {
    const std::string v = get(key);
    try {
        std::size_t used = 0;
        const double out = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return out;
    } catch (const std::exception&) {
        throw std::invalid_argument("config key " + key + " expects a number, got '" + v + "'");
    }
}

bool RunConfig::get_bool(const std::string& key) const {
    const std::string v = get(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config key " + key + " expects a boolean, got '" + v + "'");
}

void RunConfig::validate() const {
    const int window = get_int("window_length");
    if (window < 1) throw std::invalid_argument("window_length must be >= 1");
    const std::size_t dataset_size = get_size("dataset_size");
    if (dataset_size < 10) throw std::invalid_argument("dataset_size must be >= 10");
    const double ratio = get_double("purchase_ratio");
    if (ratio <= 0.0 || ratio >= 1.0)
        throw std::invalid_argument("purchase_ratio must lie in (0,1)");
    if (get_size("train_size") + get_size("test_size") + get_size("pool_size") != dataset_size)
        throw std::invalid_argument("train_size + test_size + pool_size must equal dataset_size");

    if (get_size("synth_min_session_len") > get_size("synth_max_session_len"))
        throw std::invalid_argument("synth_min_session_len exceeds synth_max_session_len");
    if (get_double("synth_oversample") < 1.0)
        throw std::invalid_argument("synth_oversample must be >= 1");
    const double base = get_double("synth_base_rate");
    if (base < 0.0 || base > 1.0) throw std::invalid_argument("synth_base_rate must lie in [0,1]");
    if (get_double("synth_lift") < 0.0) throw std::invalid_argument("synth_lift must be >= 0");
    Pattern::parse(get("synth_pattern"));

    if (get_int("embedding_dim") < 1) throw std::invalid_argument("embedding_dim must be >= 1");
    if (get_int("hidden_dim") < 1) throw std::invalid_argument("hidden_dim must be >= 1");
    if (get_int("epochs") < 0) throw std::invalid_argument("epochs must be >= 0");
    if (get_int("batch_size") < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (get_double("learning_rate") <= 0.0)
        throw std::invalid_argument("learning_rate must be positive");
    if (get_double("class_weight_positive") < 0.0)
        throw std::invalid_argument("class_weight_positive must be >= 0");

    if (get_int("background_size") < 1) throw std::invalid_argument("background_size must be >= 1");
    if (get_size("shap_subset_size") < 1)
        throw std::invalid_argument("shap_subset_size must be >= 1");
    if (get_size("shap_permutations") < 1)
        throw std::invalid_argument("shap_permutations must be >= 1");
    if (get_size("pool_shap_permutations") < 1)
        throw std::invalid_argument("pool_shap_permutations must be >= 1");
    if (get_int("exact_max_window") < 1)
        throw std::invalid_argument("exact_max_window must be >= 1");

    const int lmax = get_int("lmax");
    if (lmax < 1) throw std::invalid_argument("lmax must be >= 1");
    if (window < lmax) throw std::invalid_argument("window_length must be >= lmax");
    if (get_int("k") < 1) throw std::invalid_argument("k must be >= 1");
    if (!get("theta").empty()) get_double("theta");
    utility_mode_from_string(get("utility_mode"));
    occurrence_mode_from_string(get("occurrence_mode"));
    threshold_scope_from_string(get("threshold_scope"));
    get_bool("strict_threshold");

    strategy_from_string(get("strategy"));
    const int iterations = get_int("iterations");
    if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
    const std::size_t batch = get_size("batch");
    if (batch < 1) throw std::invalid_argument("batch must be >= 1");
    if (static_cast<std::size_t>(iterations) * batch > get_size("pool_size"))
        throw std::invalid_argument("iterations * batch exceeds pool_size");
    const std::string explain = get("explain_class");
    if (explain != "auto" && explain != "0" && explain != "1")
        throw std::invalid_argument("explain_class must be auto, 0 or 1");
    if (get_int("threads") < 1) throw std::invalid_argument("threads must be >= 1");
    get_bool("static_patterns");
    get_bool("shap_max_absolute");
    get_bool("synth_resample");
}

std::string RunConfig::resolved() const {
    std::ostringstream out;
    for (const auto& [key, value] : values_) out << key << " = " << value << '\n';
    return out.str();
}

std::string RunConfig::hash() const {
    const std::uint64_t h = hash_string(resolved());
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string RunConfig::documentation() {
    std::ostringstream out;
    for (const auto& spec : key_specs())
        out << spec.name << " = " << spec.def << "  # " << spec.doc << '\n';
    return out.str();
}

SyntheticConfig RunConfig::synthetic_config() const {
    SyntheticConfig cfg;
    cfg.size = get_size("dataset_size");
    cfg.window = get_int("window_length");
    cfg.min_session_len = get_size("synth_min_session_len");
    cfg.max_session_len = get_size("synth_max_session_len");
    cfg.base_purchase_prob = get_double("synth_base_rate");
    cfg.planted_pattern = Pattern::parse(get("synth_pattern"));
    cfg.lift = get_double("synth_lift");
    cfg.seed = get_u64("seed_synth");
    return cfg;
}

SplitSizes RunConfig::split_sizes() const {
    return {get_size("train_size"), get_size("test_size"), get_size("pool_size")};
}

ArchitectureConfig RunConfig::architecture_config() const {
    return {get_int("window_length"), get_int("embedding_dim"), get_int("hidden_dim")};
}

TrainConfig RunConfig::train_config() const {
    TrainConfig cfg;
    cfg.epochs = get_int("epochs");
    cfg.batch_size = get_int("batch_size");
    cfg.learning_rate = get_double("learning_rate");
    cfg.seed = get_u64("seed_train");
    cfg.positive_class_weight = get_double("class_weight_positive");
    return cfg;
}

MiningConfig RunConfig::mining_config() const {
    MiningConfig cfg;
    cfg.max_pattern_length = get_int("lmax");
    cfg.k = get_int("k");
    if (!get("theta").empty()) cfg.threshold = get_double("theta");
    cfg.utility_mode = utility_mode_from_string(get("utility_mode"));
    cfg.occurrence_mode = occurrence_mode_from_string(get("occurrence_mode"));
    cfg.threshold_scope = threshold_scope_from_string(get("threshold_scope"));
    cfg.strict_threshold = get_bool("strict_threshold");
    return cfg;
}

AttributionConfig RunConfig::attribution_config() const {
    AttributionConfig cfg;
    cfg.background_size = get_int("background_size");
    cfg.permutations = get_size("shap_permutations");
    cfg.exact_max_window = get_int("exact_max_window");
    cfg.seed = get_u64("seed_shap");
    cfg.threads = get_int("threads");
    return cfg;
}

ExperimentConfig RunConfig::experiment_config() const {
    ExperimentConfig cfg;
    cfg.strategy = strategy_from_string(get("strategy"));
    cfg.iterations = get_int("iterations");
    cfg.batch = get_size("batch");
    cfg.arch = architecture_config();
    cfg.train = train_config();
    cfg.mining = mining_config();
    cfg.attribution = attribution_config();
    cfg.shap_subset_size = get_size("shap_subset_size");
    cfg.pool_permutations = get_size("pool_shap_permutations");
    cfg.shap_max_absolute = get_bool("shap_max_absolute");
    cfg.static_patterns = get_bool("static_patterns");
    cfg.seed_init = get_u64("seed_init");
    cfg.seed_strategy = get_u64("seed_strategy");
    cfg.threads = get_int("threads");
    return cfg;
}

}  // namespace clickmine
