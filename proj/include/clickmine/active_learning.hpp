#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "clickmine/attribution.hpp"
#include "clickmine/classifier.hpp"
#include "clickmine/evaluation.hpp"
#include "clickmine/mining.hpp"
#include "clickmine/sequence.hpp"

namespace clickmine {

enum class StrategyKind { Random, Uncertainty, ShapMax, HuspmShap };

StrategyKind strategy_from_string(const std::string& s);
std::string to_string(StrategyKind kind);
std::vector<StrategyKind> all_strategies();

// What a query strategy is allowed to see of an unlabeled instance: id and
// symbols, never the concealed label.
struct PoolItem {
    std::size_t dataset_index = 0;
    std::string id;
    const SymbolSequence* symbols = nullptr;
};

// Uniform without replacement, seed-deterministic. Returns dataset indices.
std::vector<std::size_t> score_random(std::span<const PoolItem> pool, std::size_t batch,
                                      std::uint64_t seed);

// The batch closest to maximum binary uncertainty: smallest |p1 - 0.5|
// first, ties by ascending id.
std::vector<std::size_t> score_uncertainty(const Classifier& model, std::span<const PoolItem> pool,
                                           std::size_t batch);

struct ShapMaxConfig {
    std::size_t permutations = 20;
    std::uint64_t seed = 11;
    bool absolute = false;  // score by max |phi| instead of signed max
    int threads = 1;
};

// Scores each pool instance by the maximum positional Shapley value for the
// chosen class (permutation-sampled, per-instance seeded); largest scores
// first, ties by ascending id.
std::vector<std::size_t> score_shap_max(const Classifier& model, std::span<const PoolItem> pool,
                                        std::size_t batch,
                                        std::span<const WindowedInstance> background,
                                        int explained_class, const ShapMaxConfig& cfg);

struct HuspmSelection {
    std::vector<std::size_t> selected;  // dataset indices, in selection order
    std::vector<int> matched_rank;      // aligned; 0 = random fill
    std::size_t random_fill = 0;
};

// Walks the ranking: at each rank, takes the still-unmatched pool instances
// containing that pattern (descending occurrence count, then ascending id)
// until the batch is full; any shortfall is covered by seeded random fill.
HuspmSelection select_huspm_shap(std::span<const PoolItem> pool,
                                 std::span<const RankedPattern> topk, std::size_t batch,
                                 std::uint64_t fill_seed);

struct ExperimentConfig {
    StrategyKind strategy = StrategyKind::HuspmShap;
    int iterations = 6;
    std::size_t batch = 1000;
    ArchitectureConfig arch;
    TrainConfig train;
    MiningConfig mining;
    AttributionConfig attribution;
    std::size_t shap_subset_size = 200;
    std::size_t pool_permutations = 20;
    bool shap_max_absolute = false;
    // Mine the top-k once on the initial model instead of refreshing each
    // iteration (ablation mode).
    bool static_patterns = false;
    std::uint64_t seed_init = 42;
    std::uint64_t seed_strategy = 33;
    int threads = 1;
};

struct SelectionRecord {
    std::string id;
    int matched_rank = 0;  // huspm_shap: 1..k, 0 = random fill; other strategies: 0
};

struct IterationRecord {
    int iteration = 0;  // 0 is the evaluation before any selection
    std::size_t train_size = 0;
    std::size_t pool_size = 0;
    MetricsReport metrics;
    int explained_class = -1;               // -1 when the strategy has none
    std::vector<RankedPattern> topk;        // huspm_shap only
    std::vector<SelectionRecord> selected;  // empty at iteration 0
    std::size_t random_fill = 0;
};

struct ExperimentReport {
    StrategyKind strategy = StrategyKind::HuspmShap;
    std::vector<IterationRecord> iterations;
    // Best value of each metric across iterations and where it was reached.
    MetricsReport best;
    int best_precision_iter = 0, best_accuracy_iter = 0, best_recall_iter = 0, best_f1_iter = 0,
        best_mcc_iter = 0;
};

// Pool-based active-learning loop: evaluate the initial model, then for
// each iteration select a batch with the configured strategy, reveal the
// selected labels, retrain from scratch, and evaluate on the untouched test
// set. Deterministic per seeds.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const Dataset& dataset,
                                const DatasetSplit& split);

// config_echo is embedded verbatim so every report reproduces its run.
void write_experiment_report(std::ostream& out, const ExperimentReport& report,
                             const std::string& config_echo);

// iteration,metric,value rows for downstream tooling.
void write_metrics_csv(std::ostream& out, const ExperimentReport& report);

void write_comparison_table(std::ostream& out, std::span<const ExperimentReport> reports);

}  // namespace clickmine
