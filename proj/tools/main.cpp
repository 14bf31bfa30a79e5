// Command-line front end: ingest / synth / train / explain / mine / run.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clickmine/active_learning.hpp"
#include "clickmine/attribution.hpp"
#include "clickmine/classifier.hpp"
#include "clickmine/config.hpp"
#include "clickmine/ingest.hpp"
#include "clickmine/mining.hpp"
#include "clickmine/rng.hpp"

namespace fs = std::filesystem;
using namespace clickmine;

namespace {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "flat key = value config file");
    cmd->add_option("--set", opts.sets, "override a config key (key=value, repeatable)");
}

RunConfig build_config(const CommonOpts& opts) {
    RunConfig cfg;
    if (!opts.config_path.empty()) cfg = RunConfig::from_file(opts.config_path);
    cfg.apply_overrides(opts.sets);
    cfg.validate();
    return cfg;
}

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    return read_dataset_csv(in);
}

RecurrentClassifier load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model checkpoint: " + path);
    return RecurrentClassifier::load(in);
}

void write_file(const std::string& path, const std::string& content) {
    if (const auto parent = fs::path(path).parent_path(); !parent.empty())
        fs::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

std::string timestamp_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm_buf{};
    localtime_r(&now, &tm_buf);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm_buf);
    return buf;
}

// <stem>_<hash>_<timestamp>.txt, uniquified so reruns never overwrite
std::string report_path(const std::string& dir, const std::string& stem, const std::string& hash) {
    const std::string base = stem + "_" + hash + "_" + timestamp_now();
    std::string candidate = (fs::path(dir) / (base + ".txt")).string();
    for (int n = 1; fs::exists(candidate); ++n)
        candidate = (fs::path(dir) / (base + "-" + std::to_string(n) + ".txt")).string();
    return candidate;
}

int window_of(const Dataset& dataset) {
    return static_cast<int>(dataset.instances.front().symbols.size());
}

void require_window_match(const Dataset& dataset, int window) {
    if (window_of(dataset) != window)
        throw std::runtime_error("dataset window is " + std::to_string(window_of(dataset)) +
                                 " but window_length = " + std::to_string(window) +
                                 "; adjust the config");
}

// seed-deterministic subset used by explain / mine --model
std::vector<WindowedInstance> sample_subset(const Dataset& dataset, std::size_t count,
                                            std::uint64_t seed) {
    if (dataset.size() <= count) return dataset.instances;
    std::vector<std::size_t> idx(dataset.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng rng(seed);
    auto chosen = rng.sample(idx, count);
    std::sort(chosen.begin(), chosen.end());
    std::vector<WindowedInstance> out;
    out.reserve(count);
    for (std::size_t i : chosen) out.push_back(dataset.instances[i]);
    return out;
}

int pick_explained_class(const RunConfig& cfg, const RecurrentClassifier& model,
                         const Dataset& dataset) {
    const std::string mode = cfg.get("explain_class");
    if (mode == "0") return 0;
    if (mode == "1") return 1;
    const auto m = metrics(evaluate(model, dataset.instances));
    return choose_explanation_class(m.f1_class0, m.f1_class1).explained_class;
}

// ---- subcommands ----

int cmd_ingest(const CommonOpts& opts, const std::string& input, const std::string& out_path) {
    const auto cfg = build_config(opts);
    const int window = cfg.get_int("window_length");
    const auto rules = default_symbol_rules();

    std::ifstream in(input);
    if (!in) throw std::runtime_error("cannot open session file: " + input);

    Dataset dataset;
    std::size_t rejected_short = 0, lines = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++lines;
        try {
            const auto raw = parse_session_line(line);
            const auto sym = symbolize(raw, rules);
            auto inst = normalize_window(raw.session_id, sym.symbols, sym.label, window);
            if (inst)
                dataset.instances.push_back(std::move(*inst));
            else
                ++rejected_short;
        } catch (const std::exception& e) {
            throw std::runtime_error("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (lines == 0) throw std::runtime_error("session file is empty: " + input);
    if (dataset.instances.empty())
        throw std::runtime_error("no session met the window length " + std::to_string(window));

    std::ostringstream csv;
    write_dataset_csv(csv, dataset);
    write_file(out_path, csv.str());

    const std::size_t positives = dataset.count_positive();
    std::cout << "sessions read: " << lines << "\n"
              << "accepted: " << dataset.size() << "\n"
              << "rejected (shorter than window): " << rejected_short << "\n"
              << "positives: " << positives << " ("
              << 100.0 * static_cast<double>(positives) / static_cast<double>(dataset.size())
              << "%)\n"
              << "wrote " << out_path << "\n";
    return 0;
}

int cmd_synth(const CommonOpts& opts, const std::string& out_path,
              const std::string& sessions_path) {
    const auto cfg = build_config(opts);
    auto synth = cfg.synthetic_config();
    const bool resample = cfg.get_bool("synth_resample");
    const std::size_t final_size = cfg.get_size("dataset_size");
    if (resample)
        synth.size = static_cast<std::size_t>(
            std::ceil(cfg.get_double("synth_oversample") * static_cast<double>(final_size)));

    const auto batch = generate_synthetic_batch(synth);
    Dataset dataset = batch.windows;
    if (resample)
        dataset = resample_imbalance(dataset.instances, cfg.get_double("purchase_ratio"),
                                     final_size, mix_seed(synth.seed, 1));

    std::ostringstream csv;
    write_dataset_csv(csv, dataset);
    write_file(out_path, csv.str());

    if (!sessions_path.empty()) {
        std::map<std::string, const RawSession*> by_id;
        for (const auto& s : batch.sessions) by_id[s.session_id] = &s;
        std::ostringstream lines;
        for (const auto& inst : dataset.instances)
            lines << session_to_json(*by_id.at(inst.id)) << '\n';
        write_file(sessions_path, lines.str());
    }

    // planted-pattern statistics over the emitted instances
    const auto& pattern = synth.planted_pattern;
    std::size_t with = 0, with_pos = 0, without_pos = 0;
    for (const auto& inst : dataset.instances) {
        const bool carrier = !find_occurrences(inst.symbols, pattern).empty();
        with += carrier;
        (carrier ? with_pos : without_pos) += inst.label == 1;
    }
    const std::size_t positives = dataset.count_positive();
    const double rate = static_cast<double>(positives) / static_cast<double>(dataset.size());
    const double sigma = std::sqrt(synth.base_purchase_prob * (1.0 - synth.base_purchase_prob) /
                                   static_cast<double>(dataset.size()));
    std::cout << "instances: " << dataset.size() << "\n"
              << "positives: " << positives << " (rate " << rate << ", base "
              << synth.base_purchase_prob << ", binomial sigma " << sigma << ")\n"
              << "pattern " << pattern.to_string() << " carriers: " << with << "\n";
    if (with > 0 && with < dataset.size())
        std::cout << "purchase rate with pattern: "
                  << static_cast<double>(with_pos) / static_cast<double>(with) << ", without: "
                  << static_cast<double>(without_pos) / static_cast<double>(dataset.size() - with)
                  << "\n";
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

int cmd_train(const CommonOpts& opts, const std::string& data_path, const std::string& out_path) {
    const auto cfg = build_config(opts);
    const auto dataset = load_dataset(data_path);
    require_window_match(dataset, cfg.get_int("window_length"));

    RecurrentClassifier model(cfg.architecture_config(), cfg.get_u64("seed_init"));
    const auto history = model.train(dataset.instances, cfg.train_config());

    std::ostringstream blob;
    model.save(blob);
    write_file(out_path, blob.str());

    const auto m = metrics(evaluate(model, dataset.instances));
    std::cout << "trained on " << dataset.size() << " instances (" << dataset.count_positive()
              << " positive)\n";
    if (!history.empty())
        std::cout << "loss: " << history.front() << " -> " << history.back() << " over "
                  << history.size() << " epochs\n";
    std::cout << "train accuracy: " << m.accuracy << ", f1: " << m.f1 << "\n"
              << "wrote " << out_path << "\n";
    return 0;
}

int cmd_explain(const CommonOpts& opts, const std::string& data_path,
                const std::string& model_path, const std::string& out_path) {
    const auto cfg = build_config(opts);
    const auto dataset = load_dataset(data_path);
    const auto model = load_model(model_path);
    require_window_match(dataset, model.arch().window);

    const int cls = pick_explained_class(cfg, model, dataset);
    const std::uint64_t seed = cfg.get_u64("seed_shap");
    const auto subset = sample_subset(dataset, cfg.get_size("shap_subset_size"), seed);
    const auto background = sample_subset(
        dataset, static_cast<std::size_t>(cfg.get_int("background_size")), mix_seed(seed, 1));

    const auto matrix =
        attribution_matrix(model, subset, background, cls, cfg.attribution_config());

    std::ostringstream csv;
    write_attribution_csv(csv, matrix);
    write_file(out_path, csv.str());

    std::cout << "explained class: " << cls << "\n"
              << "rows: " << matrix.rows.size()
              << ", baseline: " << (matrix.rows.empty() ? 0.0 : matrix.rows.front().phi0) << "\n"
              << "wrote " << out_path << "\n";
    return 0;
}

int cmd_mine(const CommonOpts& opts, const std::string& data_path, const std::string& table_path,
             const std::string& model_path, const std::string& attributions_path,
             const std::string& out_path) {
    const auto cfg = build_config(opts);
    const auto mining = cfg.mining_config();
    const auto dataset = load_dataset(data_path);

    std::vector<RankedPattern> ranked;
    if (mining.utility_mode == UtilityMode::Static) {
        if (table_path.empty()) throw std::runtime_error("static mining needs --utility-table");
        std::ifstream tin(table_path);
        if (!tin) throw std::runtime_error("cannot open utility table: " + table_path);
        const auto table = read_utility_table_csv(tin);

        std::vector<SymbolSequence> db;
        db.reserve(dataset.size());
        for (const auto& inst : dataset.instances) db.push_back(inst.symbols);

        if (mining.threshold) {
            const auto mined = mine_threshold(db, table, *mining.threshold, mining);
            int rank = 1;
            for (const auto& [pattern, utility] : mined) ranked.push_back({rank++, pattern, utility});
        } else {
            std::vector<PatternUtility> utilities;
            for (const auto& p : enumerate_candidates(db, mining.max_pattern_length))
                utilities.emplace_back(
                    p, pattern_utility_static(p, db, table, mining.occurrence_mode,
                                              mining.threshold_scope));
            ranked = mine_topk(std::move(utilities), mining.k);
        }
    } else {
        AttributionMatrix matrix;
        std::vector<WindowedInstance> instances;
        if (!attributions_path.empty()) {
            std::ifstream ain(attributions_path);
            if (!ain)
                throw std::runtime_error("cannot open attribution file: " + attributions_path);
            matrix = read_attribution_csv(ain);
            std::map<std::string, const WindowedInstance*> by_id;
            for (const auto& inst : dataset.instances) by_id[inst.id] = &inst;
            for (const auto& row : matrix.rows) {
                const auto it = by_id.find(row.instance_id);
                if (it == by_id.end())
                    throw std::runtime_error("attribution row " + row.instance_id +
                                             " has no matching dataset instance");
                instances.push_back(*it->second);
            }
        } else if (!model_path.empty()) {
            const auto model = load_model(model_path);
            require_window_match(dataset, model.arch().window);
            const int cls = pick_explained_class(cfg, model, dataset);
            const std::uint64_t seed = cfg.get_u64("seed_shap");
            instances = sample_subset(dataset, cfg.get_size("shap_subset_size"), seed);
            const auto background = sample_subset(
                dataset, static_cast<std::size_t>(cfg.get_int("background_size")),
                mix_seed(seed, 1));
            matrix =
                attribution_matrix(model, instances, background, cls, cfg.attribution_config());
        } else {
            throw std::runtime_error("shap mining needs --model or --attributions");
        }
        ranked = mine_topk_shap(matrix, instances, mining);
    }

    std::ostringstream report;
    write_mining_report(report, ranked);
    write_file(out_path, report.str());
    std::cout << report.str() << "wrote " << out_path << "\n";
    return 0;
}

int cmd_run(const CommonOpts& opts, const std::string& data_path, const std::string& strategy_flag,
            bool all, const std::string& out_path, const std::string& outdir) {
    auto cfg = build_config(opts);
    if (!strategy_flag.empty()) {
        cfg.set("strategy", strategy_flag);
        cfg.validate();
    }
    const auto dataset = load_dataset(data_path);
    require_window_match(dataset, cfg.get_int("window_length"));
    if (dataset.size() != cfg.get_size("dataset_size"))
        throw std::runtime_error("dataset holds " + std::to_string(dataset.size()) +
                                 " instances but dataset_size = " + cfg.get("dataset_size") +
                                 "; adjust the config");

    const auto split = partition(dataset, cfg.split_sizes(), cfg.get_u64("seed_split"));

    std::vector<StrategyKind> kinds;
    if (all)
        kinds = all_strategies();
    else
        kinds.push_back(strategy_from_string(cfg.get("strategy")));
    if (!out_path.empty() && kinds.size() != 1)
        throw std::runtime_error(
            "--out applies to a single strategy; use --outdir with --all-strategies");

    std::vector<ExperimentReport> reports;
    for (const auto kind : kinds) {
        RunConfig echo_cfg = cfg;
        echo_cfg.set("strategy", to_string(kind));
        const auto report = run_experiment(echo_cfg.experiment_config(), dataset, split);

        std::ostringstream text;
        write_experiment_report(text, report, echo_cfg.resolved());
        const std::string path = !out_path.empty()
                                     ? out_path
                                     : report_path(outdir, to_string(kind), echo_cfg.hash());
        write_file(path, text.str());

        std::ostringstream csv;
        write_metrics_csv(csv, report);
        write_file(fs::path(path).replace_extension(".metrics.csv").string(), csv.str());
        std::cout << to_string(kind) << ": best f1 " << report.best.f1 << " (iteration "
                  << report.best_f1_iter << "), best mcc " << report.best.mcc << " -> " << path
                  << "\n";
        reports.push_back(report);
    }

    if (all) {
        std::ostringstream table;
        write_comparison_table(table, reports);
        const std::string path = report_path(outdir, "comparison", cfg.hash());
        write_file(path, table.str());
        std::cout << "comparison table -> " << path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"high-utility sequential pattern mining over SHAP values, with a pool-based "
                 "active-learning harness for clickstream purchase prediction"};
    app.require_subcommand(1);

    CommonOpts ingest_opts, synth_opts, train_opts, explain_opts, mine_opts, run_opts;

    auto* ingest = app.add_subcommand("ingest", "symbolize raw sessions into a windowed dataset");
    std::string ingest_input, ingest_out;
    ingest->add_option("--input", ingest_input, "session JSONL file")->required();
    ingest->add_option("--out", ingest_out, "windowed dataset CSV")->required();
    add_common(ingest, ingest_opts);

    auto* synth = app.add_subcommand("synth", "generate a synthetic clickstream corpus");
    std::string synth_out, synth_sessions;
    synth->add_option("--out", synth_out, "windowed dataset CSV")->required();
    synth->add_option("--sessions", synth_sessions, "also write the raw sessions as JSONL");
    add_common(synth, synth_opts);

    auto* train = app.add_subcommand("train", "train the reference classifier on a dataset");
    std::string train_data, train_out;
    train->add_option("--data", train_data, "windowed dataset CSV")->required();
    train->add_option("--out", train_out, "model checkpoint path")->required();
    add_common(train, train_opts);

    auto* explain = app.add_subcommand("explain", "export positional attributions for a dataset");
    std::string explain_data, explain_model, explain_out;
    explain->add_option("--data", explain_data, "windowed dataset CSV")->required();
    explain->add_option("--model", explain_model, "model checkpoint")->required();
    explain->add_option("--out", explain_out, "attribution CSV")->required();
    add_common(explain, explain_opts);

    auto* mine = app.add_subcommand("mine", "mine high-utility patterns (static or shap mode)");
    std::string mine_data, mine_table, mine_model, mine_attr, mine_out;
    mine->add_option("--data", mine_data, "windowed dataset CSV")->required();
    mine->add_option("--utility-table", mine_table, "symbol,utility CSV (static mode)");
    mine->add_option("--model", mine_model, "model checkpoint (shap mode)");
    mine->add_option("--attributions", mine_attr, "attribution CSV export (shap mode)");
    mine->add_option("--out", mine_out, "mining report path")->required();
    add_common(mine, mine_opts);

    auto* run = app.add_subcommand("run", "run the active-learning experiment");
    std::string run_data, run_strategy, run_out, run_outdir = "reports";
    bool run_all = false;
    run->add_option("--data", run_data, "windowed dataset CSV")->required();
    run->add_option("--strategy", run_strategy, "random|uncertainty|shap_max|huspm_shap");
    run->add_flag("--all-strategies", run_all, "run the four-way comparison on one split");
    run->add_option("--out", run_out, "explicit report path (single strategy)");
    run->add_option("--outdir", run_outdir, "report directory (default: reports)");
    add_common(run, run_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest->parsed()) return cmd_ingest(ingest_opts, ingest_input, ingest_out);
        if (synth->parsed()) return cmd_synth(synth_opts, synth_out, synth_sessions);
        if (train->parsed()) return cmd_train(train_opts, train_data, train_out);
        if (explain->parsed())
            return cmd_explain(explain_opts, explain_data, explain_model, explain_out);
        if (mine->parsed())
            return cmd_mine(mine_opts, mine_data, mine_table, mine_model, mine_attr, mine_out);
        if (run->parsed()) return cmd_run(run_opts, run_data, run_strategy, run_all, run_out, run_outdir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
