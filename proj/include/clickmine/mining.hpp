#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "clickmine/attribution.hpp"
#include "clickmine/sequence.hpp"

namespace clickmine {

enum class UtilityMode { Static, Shap };
enum class ThresholdScope { PerSequenceMax, DatabaseSum };

UtilityMode utility_mode_from_string(const std::string& s);
std::string to_string(UtilityMode mode);
ThresholdScope threshold_scope_from_string(const std::string& s);
std::string to_string(ThresholdScope scope);

struct MiningConfig {
    int max_pattern_length = 3;  // longest candidate considered
    int k = 5;
    std::optional<double> threshold;
    UtilityMode utility_mode = UtilityMode::Shap;
    OccurrenceMode occurrence_mode = OccurrenceMode::All;
    ThresholdScope threshold_scope = ThresholdScope::PerSequenceMax;
    // With >= (default) a pattern whose utility equals the threshold
    // qualifies; set true for the strict reading.
    bool strict_threshold = false;
};

struct RankedPattern {
    int rank = 0;
    Pattern pattern;
    double utility = 0.0;
};

using PatternUtility = std::pair<Pattern, double>;

// Every distinct contiguous sub-sequence (length 1..lmax, adjacent elements
// differing) that occurs in at least one instance; ordered by (length,
// lexicographic) for determinism.
std::vector<Pattern> enumerate_candidates(std::span<const SymbolSequence> instances, int lmax);

// Static dollar utility. Each occurrence is worth the sum of its elements'
// table values; Unique counts at most one occurrence per sequence; the
// scope picks the max per-sequence utility or the database sum.
double pattern_utility_static(const Pattern& pattern, std::span<const SymbolSequence> db,
                              const UtilityTable& table, OccurrenceMode mode,
                              ThresholdScope scope);

// All candidates whose static utility meets the threshold, ordered like
// mine_topk's output.
std::vector<PatternUtility> mine_threshold(std::span<const SymbolSequence> db,
                                           const UtilityTable& table, double theta,
                                           const MiningConfig& cfg);

// Summed positional SHAP over the pattern's occurrences across the
// explained subset (signed; negative utilities are possible).
double pattern_utility_shap(const Pattern& pattern, const AttributionMatrix& matrix,
                            std::span<const WindowedInstance> instances, OccurrenceMode mode);

// k highest-utility patterns, non-increasing; ties broken by shorter
// length first, then lexicographic symbol order.
std::vector<RankedPattern> mine_topk(std::vector<PatternUtility> utilities, int k);

// Candidate enumeration + SHAP scoring + top-k in one step.
std::vector<RankedPattern> mine_topk_shap(const AttributionMatrix& matrix,
                                          std::span<const WindowedInstance> instances,
                                          const MiningConfig& cfg);

// rank, pattern (dash-joined symbols), utility
void write_mining_report(std::ostream& out, std::span<const RankedPattern> ranked);

}  // namespace clickmine
