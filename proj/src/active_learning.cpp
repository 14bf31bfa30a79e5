#include "clickmine/active_learning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <set>
#include <stdexcept>

#include "clickmine/parallel.hpp"
#include "clickmine/rng.hpp"

namespace clickmine {

StrategyKind strategy_from_string(const std::string& s) {
    if (s == "random") return StrategyKind::Random;
    if (s == "uncertainty") return StrategyKind::Uncertainty;
    if (s == "shap_max") return StrategyKind::ShapMax;
    if (s == "huspm_shap") return StrategyKind::HuspmShap;
    throw std::invalid_argument("unknown strategy: " + s +
                                " (expected random|uncertainty|shap_max|huspm_shap)");
}

std::string to_string(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Random: return "random";
        case StrategyKind::Uncertainty: return "uncertainty";
        case StrategyKind::ShapMax: return "shap_max";
        case StrategyKind::HuspmShap: return "huspm_shap";
    }
    throw std::invalid_argument("unknown strategy kind");
}

std::vector<StrategyKind> all_strategies() {
    return {StrategyKind::Random, StrategyKind::Uncertainty, StrategyKind::ShapMax,
            StrategyKind::HuspmShap};
}

namespace {

void check_batch(std::span<const PoolItem> pool, std::size_t batch) {
    if (batch > pool.size())
        throw std::runtime_error("pool exhausted: batch " + std::to_string(batch) +
                                 " exceeds pool size " + std::to_string(pool.size()));
}

}  // namespace

std::vector<std::size_t> score_random(std::span<const PoolItem> pool, std::size_t batch,
                                      std::uint64_t seed) {
    check_batch(pool, batch);
    std::vector<std::size_t> positions(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) positions[i] = i;
    Rng rng(seed);
    auto chosen = rng.sample(positions, batch);
    std::vector<std::size_t> out;
    out.reserve(batch);
    for (std::size_t p : chosen) out.push_back(pool[p].dataset_index);
    return out;
}

std::vector<std::size_t> score_uncertainty(const Classifier& model, std::span<const PoolItem> pool,
                                           std::size_t batch) {
    check_batch(pool, batch);
    std::vector<std::pair<double, std::size_t>> scored;  // (|p1 - 0.5|, position)
    scored.reserve(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const double p1 = model.forward(*pool[i].symbols)[1];
        scored.emplace_back(std::abs(p1 - 0.5), i);
    }
    std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return pool[a.second].id < pool[b.second].id;
    });
    std::vector<std::size_t> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) out.push_back(pool[scored[i].second].dataset_index);
    return out;
}

std::vector<std::size_t> score_shap_max(const Classifier& model, std::span<const PoolItem> pool,
                                        std::size_t batch,
                                        std::span<const WindowedInstance> background,
                                        int explained_class, const ShapMaxConfig& cfg) {
    check_batch(pool, batch);
    std::vector<double> scores(pool.size());
    parallel_for(pool.size(), cfg.threads, [&](std::size_t i) {
        WindowedInstance probe;
        probe.id = pool[i].id;
        probe.symbols = *pool[i].symbols;
        const auto attribution =
            sampled_shapley(model, probe, background, explained_class, cfg.permutations,
                            mix_seed(cfg.seed, hash_string(pool[i].id)));
        double best = -std::numeric_limits<double>::infinity();
        for (double phi : attribution.phi) {
            const double v = cfg.absolute ? std::abs(phi) : phi;
            best = std::max(best, v);
        }
        scores[i] = best;
    });

    std::vector<std::size_t> positions(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) positions[i] = i;
    std::sort(positions.begin(), positions.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return pool[a].id < pool[b].id;
    });
    std::vector<std::size_t> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) out.push_back(pool[positions[i]].dataset_index);
    return out;
}

HuspmSelection select_huspm_shap(std::span<const PoolItem> pool,
                                 std::span<const RankedPattern> topk, std::size_t batch,
                                 std::uint64_t fill_seed) {
    if (topk.empty()) throw std::invalid_argument("top-k pattern list is empty");
    check_batch(pool, batch);

    HuspmSelection sel;
    std::vector<bool> taken(pool.size(), false);

    for (const auto& rp : topk) {
        if (sel.selected.size() == batch) break;
        // unmatched instances containing this rank's pattern
        std::vector<std::pair<std::size_t, std::size_t>> matches;  // (occurrences, position)
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (taken[i]) continue;
            const auto occ = find_occurrences(*pool[i].symbols, rp.pattern);
            if (!occ.empty()) matches.emplace_back(occ.size(), i);
        }
        std::sort(matches.begin(), matches.end(), [&](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return pool[a.second].id < pool[b.second].id;
        });
        for (const auto& [count, pos] : matches) {
            (void)count;
            if (sel.selected.size() == batch) break;
            taken[pos] = true;
            sel.selected.push_back(pool[pos].dataset_index);
            sel.matched_rank.push_back(rp.rank);
        }
    }

    // every rank exhausted: fill the remainder uniformly from the leftovers
    if (sel.selected.size() < batch) {
        std::vector<std::size_t> leftover;
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (!taken[i]) leftover.push_back(i);
        Rng rng(fill_seed);
        auto extra = rng.sample(leftover, batch - sel.selected.size());
        for (std::size_t pos : extra) {
            sel.selected.push_back(pool[pos].dataset_index);
            sel.matched_rank.push_back(0);
            ++sel.random_fill;
        }
    }
    return sel;
}

namespace {

struct LoopState {
    std::vector<std::size_t> train;  // sorted dataset indices
    std::vector<std::size_t> pool;   // sorted dataset indices
};

std::vector<WindowedInstance> gather(const Dataset& dataset, std::span<const std::size_t> idx) {
    std::vector<WindowedInstance> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(dataset.instances[i]);
    return out;
}

std::vector<PoolItem> pool_view(const Dataset& dataset, std::span<const std::size_t> idx) {
    std::vector<PoolItem> view;
    view.reserve(idx.size());
    for (std::size_t i : idx) {
        const auto& inst = dataset.instances[i];
        view.push_back({i, inst.id, &inst.symbols});
    }
    return view;
}

RecurrentClassifier retrain_from_scratch(const ExperimentConfig& cfg,
                                         const std::vector<WindowedInstance>& train_set,
                                         int iteration) {
    // identical seeds per iteration across strategies keeps comparisons fair
    RecurrentClassifier model(cfg.arch, mix_seed(cfg.seed_init, static_cast<std::uint64_t>(iteration)));
    TrainConfig tc = cfg.train;
    tc.seed = mix_seed(cfg.train.seed, static_cast<std::uint64_t>(iteration));
    model.train(train_set, tc);
    return model;
}

// seed-deterministic subset of the training set for the attribution matrix
std::vector<WindowedInstance> sample_instances(const std::vector<WindowedInstance>& from,
                                               std::size_t count, std::uint64_t seed) {
    if (from.size() <= count) return from;
    std::vector<std::size_t> idx(from.size());
    for (std::size_t i = 0; i < from.size(); ++i) idx[i] = i;
    Rng rng(seed);
    auto chosen = rng.sample(idx, count);
    std::sort(chosen.begin(), chosen.end());
    std::vector<WindowedInstance> out;
    out.reserve(count);
    for (std::size_t i : chosen) out.push_back(from[i]);
    return out;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, const Dataset& dataset,
                                const DatasetSplit& split) {
    if (cfg.iterations < 0) throw std::invalid_argument("iterations must be non-negative");
    if (cfg.batch == 0) throw std::invalid_argument("batch must be positive");
    if (static_cast<std::size_t>(cfg.iterations) * cfg.batch > split.pool.size())
        throw std::invalid_argument(
            "configuration inconsistent: iterations*batch = " +
            std::to_string(static_cast<std::size_t>(cfg.iterations) * cfg.batch) +
            " exceeds pool size " + std::to_string(split.pool.size()));
    if (cfg.arch.window < cfg.mining.max_pattern_length)
        throw std::invalid_argument("window must be >= max pattern length");

    LoopState state{split.train, split.pool};
    std::sort(state.train.begin(), state.train.end());
    std::sort(state.pool.begin(), state.pool.end());
    const auto test_set = gather(dataset, split.test);

    ExperimentReport report;
    report.strategy = cfg.strategy;

    auto train_set = gather(dataset, state.train);
    RecurrentClassifier model = retrain_from_scratch(cfg, train_set, 0);

    auto record_metrics = [&](int iteration) -> MetricsReport {
        const auto m = metrics(evaluate(model, test_set));
        IterationRecord rec;
        rec.iteration = iteration;
        rec.train_size = state.train.size();
        rec.pool_size = state.pool.size();
        rec.metrics = m;
        report.iterations.push_back(std::move(rec));
        return m;
    };

    MetricsReport current = record_metrics(0);

    std::vector<RankedPattern> static_topk;  // reused when static_patterns is on

    for (int iter = 1; iter <= cfg.iterations; ++iter) {
        const auto view = pool_view(dataset, state.pool);
        const std::uint64_t iter_seed = mix_seed(cfg.seed_strategy, static_cast<std::uint64_t>(iter));

        std::vector<std::size_t> chosen;
        std::vector<int> chosen_rank;
        std::size_t random_fill = 0;
        int explained_class = -1;
        std::vector<RankedPattern> topk;

        switch (cfg.strategy) {
            case StrategyKind::Random:
                chosen = score_random(view, cfg.batch, iter_seed);
                break;
            case StrategyKind::Uncertainty:
                chosen = score_uncertainty(model, view, cfg.batch);
                break;
            case StrategyKind::ShapMax: {
                explained_class =
                    choose_explanation_class(current.f1_class0, current.f1_class1).explained_class;
                const auto background = sample_instances(
                    train_set, static_cast<std::size_t>(cfg.attribution.background_size),
                    mix_seed(cfg.attribution.seed, static_cast<std::uint64_t>(iter) * 2 + 1));
                ShapMaxConfig sc;
                sc.permutations = cfg.pool_permutations;
                sc.seed = mix_seed(cfg.attribution.seed, static_cast<std::uint64_t>(iter) * 2);
                sc.absolute = cfg.shap_max_absolute;
                sc.threads = cfg.threads;
                chosen = score_shap_max(model, view, cfg.batch, background, explained_class, sc);
                break;
            }
            case StrategyKind::HuspmShap: {
                explained_class =
                    choose_explanation_class(current.f1_class0, current.f1_class1).explained_class;
                if (cfg.static_patterns && !static_topk.empty()) {
                    topk = static_topk;
                } else {
                    const auto subset = sample_instances(
                        train_set, cfg.shap_subset_size,
                        mix_seed(cfg.attribution.seed, static_cast<std::uint64_t>(iter) * 3));
                    const auto background = sample_instances(
                        train_set, static_cast<std::size_t>(cfg.attribution.background_size),
                        mix_seed(cfg.attribution.seed, static_cast<std::uint64_t>(iter) * 3 + 1));
                    AttributionConfig ac = cfg.attribution;
                    ac.seed = mix_seed(cfg.attribution.seed, static_cast<std::uint64_t>(iter) * 3 + 2);
                    ac.threads = cfg.threads;
                    const auto matrix =
                        attribution_matrix(model, subset, background, explained_class, ac);
                    topk = mine_topk_shap(matrix, subset, cfg.mining);
                    if (cfg.static_patterns) static_topk = topk;
                }
                if (topk.empty())
                    throw std::runtime_error("mining produced no candidate patterns");
                auto sel = select_huspm_shap(view, topk, cfg.batch, iter_seed);
                chosen = std::move(sel.selected);
                chosen_rank = std::move(sel.matched_rank);
                random_fill = sel.random_fill;
                break;
            }
        }

        // simulated oracle: reveal the selected labels and move pool -> train
        std::set<std::size_t> moving(chosen.begin(), chosen.end());
        if (moving.size() != chosen.size())
            throw std::runtime_error("strategy selected an instance twice");
        std::vector<std::size_t> rest;
        rest.reserve(state.pool.size() - chosen.size());
        for (std::size_t i : state.pool)
            if (!moving.count(i)) rest.push_back(i);
        if (state.pool.size() - rest.size() != chosen.size())
            throw std::runtime_error("strategy selected an instance outside the pool");
        state.pool = std::move(rest);
        state.train.insert(state.train.end(), chosen.begin(), chosen.end());
        std::sort(state.train.begin(), state.train.end());

        train_set = gather(dataset, state.train);
        model = retrain_from_scratch(cfg, train_set, iter);
        current = record_metrics(iter);

        auto& rec = report.iterations.back();
        rec.explained_class = explained_class;
        rec.topk = std::move(topk);
        rec.random_fill = random_fill;
        rec.selected.reserve(chosen.size());
        for (std::size_t i = 0; i < chosen.size(); ++i)
            rec.selected.push_back(
                {dataset.instances[chosen[i]].id, chosen_rank.empty() ? 0 : chosen_rank[i]});
    }

    // best-of-run summary over all recorded iterations
    report.best = report.iterations.front().metrics;
    for (const auto& rec : report.iterations) {
        const auto& m = rec.metrics;
        if (m.precision > report.best.precision) report.best.precision = m.precision, report.best_precision_iter = rec.iteration;
        if (m.accuracy > report.best.accuracy) report.best.accuracy = m.accuracy, report.best_accuracy_iter = rec.iteration;
        if (m.recall > report.best.recall) report.best.recall = m.recall, report.best_recall_iter = rec.iteration;
        if (m.f1 > report.best.f1) report.best.f1 = m.f1, report.best_f1_iter = rec.iteration;
        if (m.mcc > report.best.mcc) report.best.mcc = m.mcc, report.best_mcc_iter = rec.iteration;
    }
    return report;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

void write_metrics(std::ostream& out, const MetricsReport& m) {
    out << "precision = " << fmt(m.precision) << '\n';
    out << "accuracy = " << fmt(m.accuracy) << '\n';
    out << "recall = " << fmt(m.recall) << '\n';
    out << "f1 = " << fmt(m.f1) << '\n';
    out << "mcc = " << fmt(m.mcc) << '\n';
    out << "f1_class0 = " << fmt(m.f1_class0) << '\n';
    out << "f1_class1 = " << fmt(m.f1_class1) << '\n';
    if (m.degenerate) out << "degenerate = true\n";
}

}  // namespace

void write_experiment_report(std::ostream& out, const ExperimentReport& report,
                             const std::string& config_echo) {
    out << "clickmine experiment report\n";
    out << "strategy = " << to_string(report.strategy) << "\n\n";
    out << "[config]\n" << config_echo;
    if (!config_echo.empty() && config_echo.back() != '\n') out << '\n';

    for (const auto& rec : report.iterations) {
        out << "\n[iteration " << rec.iteration << "]\n";
        out << "train_size = " << rec.train_size << '\n';
        out << "pool_size = " << rec.pool_size << '\n';
        write_metrics(out, rec.metrics);
        if (rec.explained_class >= 0) out << "explained_class = " << rec.explained_class << '\n';
        if (!rec.topk.empty()) {
            out << "topk:\n";
            for (const auto& rp : rec.topk)
                out << "  " << rp.rank << ", " << rp.pattern.to_string() << ", " << fmt(rp.utility)
                    << '\n';
        }
        if (!rec.selected.empty()) {
            out << "random_fill = " << rec.random_fill << '\n';
            out << "selected:\n";
            for (const auto& s : rec.selected) {
                out << "  " << s.id;
                if (s.matched_rank > 0)
                    out << ", rank " << s.matched_rank;
                else if (report.strategy == StrategyKind::HuspmShap)
                    out << ", fill";
                out << '\n';
            }
        }
    }

    out << "\n[best]\n";
    out << "precision = " << fmt(report.best.precision) << " (iteration " << report.best_precision_iter << ")\n";
    out << "accuracy = " << fmt(report.best.accuracy) << " (iteration " << report.best_accuracy_iter << ")\n";
    out << "recall = " << fmt(report.best.recall) << " (iteration " << report.best_recall_iter << ")\n";
    out << "f1 = " << fmt(report.best.f1) << " (iteration " << report.best_f1_iter << ")\n";
    out << "mcc = " << fmt(report.best.mcc) << " (iteration " << report.best_mcc_iter << ")\n";
}

void write_metrics_csv(std::ostream& out, const ExperimentReport& report) {
    out << "iteration,metric,value\n";
    for (const auto& rec : report.iterations) {
        const auto& m = rec.metrics;
        const std::pair<const char*, double> rows[] = {
            {"precision", m.precision}, {"accuracy", m.accuracy}, {"recall", m.recall},
            {"f1", m.f1},               {"mcc", m.mcc},           {"f1_class0", m.f1_class0},
            {"f1_class1", m.f1_class1},
        };
        for (const auto& [name, value] : rows)
            out << rec.iteration << ',' << name << ',' << fmt(value) << '\n';
    }
}

void write_comparison_table(std::ostream& out, std::span<const ExperimentReport> reports) {
    out << "metric";
    for (const auto& r : reports) out << ", " << to_string(r.strategy);
    out << '\n';
    const char* names[] = {"precision", "accuracy", "recall", "f1", "mcc"};
    for (int row = 0; row < 5; ++row) {
        out << names[row];
        for (const auto& r : reports) {
            double v = 0.0;
            switch (row) {
                case 0: v = r.best.precision; break;
                case 1: v = r.best.accuracy; break;
                case 2: v = r.best.recall; break;
                case 3: v = r.best.f1; break;
                case 4: v = r.best.mcc; break;
            }
            out << ", " << fmt(v);
        }
        out << '\n';
    }
}

}  // namespace clickmine
