#pragma once

// Independent reference implementations used only as test oracles. Each one
// recomputes its result from first principles and must stay decoupled from
// the library code paths it checks.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <vector>

#include "clickmine/attribution.hpp"
#include "clickmine/classifier.hpp"
#include "clickmine/sequence.hpp"

namespace oracle {

using clickmine::Classifier;
using clickmine::OccurrenceMode;
using clickmine::Pattern;
using clickmine::Symbol;
using clickmine::SymbolSequence;
using clickmine::WindowedInstance;

// plain double loop over start positions
inline std::vector<std::size_t> naive_find_occurrences(const SymbolSequence& seq,
                                                       const std::vector<Symbol>& pat) {
    std::vector<std::size_t> starts;
    if (pat.empty() || pat.size() > seq.size()) return starts;
    for (std::size_t q = 0; q + pat.size() <= seq.size(); ++q) {
        std::size_t k = 0;
        while (k < pat.size() && seq[q + k] == pat[k]) ++k;
        if (k == pat.size()) starts.push_back(q);
    }
    return starts;
}

// mean model output over the background with positions outside `keep`
// replaced by the background instance's symbols
inline double coalition_value(const Classifier& model, const WindowedInstance& instance,
                              std::span<const WindowedInstance> background, int cls,
                              const std::vector<bool>& keep) {
    double acc = 0.0;
    for (const auto& b : background) {
        SymbolSequence hybrid = b.symbols;
        for (std::size_t j = 0; j < keep.size(); ++j)
            if (keep[j]) hybrid[j] = instance.symbols[j];
        acc += model.forward(hybrid)[cls];
    }
    return acc / static_cast<double>(background.size());
}

// Shapley values via full enumeration of all W! position orderings:
// phi_j = mean over orderings of the marginal contribution of j when it
// joins the positions placed before it.
inline std::vector<double> permutation_shapley(const Classifier& model,
                                               const WindowedInstance& instance,
                                               std::span<const WindowedInstance> background,
                                               int cls) {
    const std::size_t w = instance.symbols.size();
    std::vector<std::size_t> perm(w);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> phi(w, 0.0);
    std::size_t count = 0;
    do {
        std::vector<bool> keep(w, false);
        double prev = coalition_value(model, instance, background, cls, keep);
        for (std::size_t j : perm) {
            keep[j] = true;
            const double cur = coalition_value(model, instance, background, cls, keep);
            phi[j] += cur - prev;
            prev = cur;
        }
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (double& v : phi) v /= static_cast<double>(count);
    return phi;
}

// position scan for the element aggregation
inline double naive_aggregate_element(const std::vector<std::vector<double>>& phi,
                                      const std::vector<SymbolSequence>& seqs, Symbol t) {
    double total = 0.0;
    for (std::size_t l = 0; l < seqs.size(); ++l)
        for (std::size_t j = 0; j < seqs[l].size(); ++j)
            if (seqs[l][j] == t) total += phi[l][j];
    return total;
}

// position scan for the sub-sequence aggregation
inline double naive_aggregate_subsequence(const std::vector<std::vector<double>>& phi,
                                          const std::vector<SymbolSequence>& seqs,
                                          const std::vector<Symbol>& pat, OccurrenceMode mode) {
    double total = 0.0;
    for (std::size_t l = 0; l < seqs.size(); ++l) {
        const auto starts = naive_find_occurrences(seqs[l], pat);
        if (starts.empty()) continue;
        if (mode == OccurrenceMode::All) {
            for (std::size_t q : starts)
                for (std::size_t k = 0; k < pat.size(); ++k) total += phi[l][q + k];
        } else {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t q : starts) {
                double occ = 0.0;
                for (std::size_t k = 0; k < pat.size(); ++k) occ += phi[l][q + k];
                best = std::max(best, occ);
            }
            total += best;
        }
    }
    return total;
}

// Brute-force miner: re-enumerates every contiguous sub-sequence and
// recomputes utilities by direct scanning.
struct MinedPattern {
    std::vector<Symbol> elements;
    double utility = 0.0;
};

inline std::set<std::vector<Symbol>> naive_candidates(const std::vector<SymbolSequence>& db,
                                                      int lmax) {
    std::set<std::vector<Symbol>> out;
    for (const auto& seq : db)
        for (std::size_t a = 0; a < seq.size(); ++a)
            for (std::size_t len = 1; len <= static_cast<std::size_t>(lmax) && a + len <= seq.size(); ++len) {
                std::vector<Symbol> sub(seq.begin() + a, seq.begin() + a + len);
                bool ok = true;
                for (std::size_t i = 1; i < sub.size(); ++i)
                    if (sub[i] == sub[i - 1]) ok = false;
                if (ok) out.insert(sub);
            }
    return out;
}

inline double naive_static_utility(const std::vector<Symbol>& pat,
                                   const std::vector<SymbolSequence>& db,
                                   const std::map<Symbol, double>& table, OccurrenceMode mode,
                                   bool per_sequence_max) {
    double per_occ = 0.0;
    for (Symbol s : pat) per_occ += table.at(s);
    double sum = 0.0, best = 0.0;
    bool any = false;
    for (const auto& seq : db) {
        const std::size_t occ = naive_find_occurrences(seq, pat).size();
        if (occ == 0) continue;
        const double u = mode == OccurrenceMode::All ? per_occ * static_cast<double>(occ) : per_occ;
        sum += u;
        best = any ? std::max(best, u) : u;
        any = true;
    }
    if (!any) return 0.0;
    return per_sequence_max ? best : sum;
}

inline std::vector<MinedPattern> naive_mine_threshold(const std::vector<SymbolSequence>& db,
                                                      const std::map<Symbol, double>& table,
                                                      double theta, int lmax, OccurrenceMode mode,
                                                      bool per_sequence_max, bool strict) {
    std::vector<MinedPattern> out;
    for (const auto& pat : naive_candidates(db, lmax)) {
        const double u = naive_static_utility(pat, db, table, mode, per_sequence_max);
        if (strict ? u > theta : u >= theta) out.push_back({pat, u});
    }
    std::sort(out.begin(), out.end(), [](const MinedPattern& a, const MinedPattern& b) {
        if (a.utility != b.utility) return a.utility > b.utility;
        if (a.elements.size() != b.elements.size()) return a.elements.size() < b.elements.size();
        return a.elements < b.elements;
    });
    return out;
}

inline std::vector<MinedPattern> naive_mine_topk(const std::vector<SymbolSequence>& db,
                                                 const std::map<Symbol, double>& table, int k,
                                                 int lmax, OccurrenceMode mode,
                                                 bool per_sequence_max) {
    auto all = naive_mine_threshold(db, table, -std::numeric_limits<double>::infinity(), lmax,
                                    mode, per_sequence_max, false);
    if (all.size() > static_cast<std::size_t>(k)) all.resize(static_cast<std::size_t>(k));
    return all;
}

}  // namespace oracle
