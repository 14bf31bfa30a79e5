#include "clickmine/mining.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace clickmine {

UtilityMode utility_mode_from_string(const std::string& s) {
    if (s == "static") return UtilityMode::Static;
    if (s == "shap") return UtilityMode::Shap;
    throw std::invalid_argument("unknown utility_mode: " + s + " (expected static|shap)");
}

std::string to_string(UtilityMode mode) {
    return mode == UtilityMode::Static ? "static" : "shap";
}

ThresholdScope threshold_scope_from_string(const std::string& s) {
    if (s == "per-sequence-max") return ThresholdScope::PerSequenceMax;
    if (s == "database-sum") return ThresholdScope::DatabaseSum;
    throw std::invalid_argument("unknown threshold_scope: " + s +
                                " (expected per-sequence-max|database-sum)");
}

std::string to_string(ThresholdScope scope) {
    return scope == ThresholdScope::PerSequenceMax ? "per-sequence-max" : "database-sum";
}

namespace {

// length first, then lexicographic: the deterministic tie order
bool pattern_before(const Pattern& a, const Pattern& b) {
    if (a.length() != b.length()) return a.length() < b.length();
    return a.elements() < b.elements();
}

bool ranked_before(const PatternUtility& a, const PatternUtility& b) {
    if (a.second != b.second) return a.second > b.second;
    return pattern_before(a.first, b.first);
}

}  // namespace

std::vector<Pattern> enumerate_candidates(std::span<const SymbolSequence> instances, int lmax) {
    if (lmax < 1) throw std::invalid_argument("max pattern length must be >= 1");
    std::set<std::vector<Symbol>> seen;
    for (const auto& seq : instances) {
        for (std::size_t start = 0; start < seq.size(); ++start) {
            std::vector<Symbol> sub;
            for (std::size_t len = 1; len <= static_cast<std::size_t>(lmax) && start + len <= seq.size(); ++len) {
                const Symbol next = seq[start + len - 1];
                if (!sub.empty() && sub.back() == next) break;  // immediate repeat ends the run
                sub.push_back(next);
                seen.insert(sub);
            }
        }
    }
    std::vector<Pattern> out;
    out.reserve(seen.size());
    for (const auto& elems : seen) out.push_back(Pattern::from(elems));
    std::sort(out.begin(), out.end(), pattern_before);
    return out;
}

double pattern_utility_static(const Pattern& pattern, std::span<const SymbolSequence> db,
                              const UtilityTable& table, OccurrenceMode mode,
                              ThresholdScope scope) {
    double per_occurrence = 0.0;
    for (Symbol s : pattern.elements()) per_occurrence += table.value(s);

    double db_sum = 0.0;
    double best = 0.0;
    bool found = false;
    for (const auto& seq : db) {
        const auto occ = find_occurrences(seq, pattern);
        if (occ.empty()) continue;
        const double seq_utility = mode == OccurrenceMode::All
                                       ? per_occurrence * static_cast<double>(occ.size())
                                       : per_occurrence;
        db_sum += seq_utility;
        best = found ? std::max(best, seq_utility) : seq_utility;
        found = true;
    }
    if (!found) return 0.0;
    return scope == ThresholdScope::PerSequenceMax ? best : db_sum;
}

std::vector<PatternUtility> mine_threshold(std::span<const SymbolSequence> db,
                                           const UtilityTable& table, double theta,
                                           const MiningConfig& cfg) {
    std::vector<PatternUtility> out;
    for (const auto& pattern : enumerate_candidates(db, cfg.max_pattern_length)) {
        const double u =
            pattern_utility_static(pattern, db, table, cfg.occurrence_mode, cfg.threshold_scope);
        const bool keep = cfg.strict_threshold ? u > theta : u >= theta;
        if (keep) out.emplace_back(pattern, u);
    }
    std::sort(out.begin(), out.end(), ranked_before);
    return out;
}

double pattern_utility_shap(const Pattern& pattern, const AttributionMatrix& matrix,
                            std::span<const WindowedInstance> instances, OccurrenceMode mode) {
    return aggregate_subsequence(matrix, instances, pattern, mode);
}

std::vector<RankedPattern> mine_topk(std::vector<PatternUtility> utilities, int k) {
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    std::sort(utilities.begin(), utilities.end(), ranked_before);
    if (utilities.size() > static_cast<std::size_t>(k))
        utilities.erase(utilities.begin() + k, utilities.end());
    std::vector<RankedPattern> out;
    out.reserve(utilities.size());
    for (std::size_t i = 0; i < utilities.size(); ++i)
        out.push_back({static_cast<int>(i) + 1, utilities[i].first, utilities[i].second});
    return out;
}

std::vector<RankedPattern> mine_topk_shap(const AttributionMatrix& matrix,
                                          std::span<const WindowedInstance> instances,
                                          const MiningConfig& cfg) {
    std::vector<SymbolSequence> sequences;
    sequences.reserve(instances.size());
    for (const auto& inst : instances) sequences.push_back(inst.symbols);

    std::vector<PatternUtility> utilities;
    for (const auto& pattern : enumerate_candidates(sequences, cfg.max_pattern_length))
        utilities.emplace_back(pattern,
                               pattern_utility_shap(pattern, matrix, instances, cfg.occurrence_mode));
    return mine_topk(std::move(utilities), cfg.k);
}

void write_mining_report(std::ostream& out, std::span<const RankedPattern> ranked) {
    out << "rank, pattern, utility\n";
    char buf[40];
    for (const auto& rp : ranked) {
        std::snprintf(buf, sizeof(buf), "%.6f", rp.utility);
        out << rp.rank << ", " << rp.pattern.to_string() << ", " << buf << '\n';
    }
}

}  // namespace clickmine
