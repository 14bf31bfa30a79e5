#include "clickmine/attribution.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "clickmine/parallel.hpp"
#include "clickmine/rng.hpp"

namespace clickmine {

namespace {

constexpr int kExactWindowCap = 16;

void check_inputs(const Classifier& model, const WindowedInstance& instance,
                  std::span<const WindowedInstance> background, int explained_class) {
    if (explained_class != 0 && explained_class != 1)
        throw std::invalid_argument("explained class must be 0 or 1");
    if (background.empty()) throw std::invalid_argument("background set is empty");
    const std::size_t w = instance.symbols.size();
    if (static_cast<int>(w) != model.window())
        throw std::invalid_argument("instance length does not match the model window");
    for (const auto& b : background)
        if (b.symbols.size() != w)
            throw std::invalid_argument("background instance length differs from the explained instance");
}

// v(S): mean class probability of the hybrid taking the instance's symbols
// on positions in S and the background's elsewhere.
double coalition_value(const Classifier& model, const WindowedInstance& instance,
                       std::span<const WindowedInstance> background, int explained_class,
                       std::uint64_t mask, SymbolSequence& scratch) {
    const std::size_t w = instance.symbols.size();
    double acc = 0.0;
    for (const auto& b : background) {
        for (std::size_t j = 0; j < w; ++j)
            scratch[j] = (mask >> j) & 1 ? instance.symbols[j] : b.symbols[j];
        acc += model.forward(scratch)[explained_class];
    }
    return acc / static_cast<double>(background.size());
}

}  // namespace

double AttributionVector::sum_with_baseline() const {
    double s = phi0;
    for (double v : phi) s += v;
    return s;
}

double baseline_value(const Classifier& model, std::span<const WindowedInstance> background,
                      int explained_class) {
    if (background.empty()) throw std::invalid_argument("background set is empty");
    if (explained_class != 0 && explained_class != 1)
        throw std::invalid_argument("explained class must be 0 or 1");
    double acc = 0.0;
    for (const auto& b : background) acc += model.forward(b.symbols)[explained_class];
    return acc / static_cast<double>(background.size());
}

AttributionVector exact_shapley(const Classifier& model, const WindowedInstance& instance,
                                std::span<const WindowedInstance> background, int explained_class) {
    check_inputs(model, instance, background, explained_class);
    const int w = static_cast<int>(instance.symbols.size());
    if (w > kExactWindowCap)
        throw std::invalid_argument("window " + std::to_string(w) +
                                    " too large for coalition enumeration; use sampled_shapley");

    const std::uint64_t masks = 1ULL << w;
    std::vector<double> value(masks);
    SymbolSequence scratch(instance.symbols.size());
    for (std::uint64_t m = 0; m < masks; ++m)
        value[m] = coalition_value(model, instance, background, explained_class, m, scratch);

    std::vector<double> fact(static_cast<std::size_t>(w) + 1, 1.0);
    for (int i = 1; i <= w; ++i) fact[i] = fact[i - 1] * static_cast<double>(i);

    AttributionVector out;
    out.instance_id = instance.id;
    out.explained_class = explained_class;
    out.phi0 = value[0];
    out.phi.assign(static_cast<std::size_t>(w), 0.0);
    for (int j = 0; j < w; ++j) {
        const std::uint64_t bit = 1ULL << j;
        double phi = 0.0;
        for (std::uint64_t m = 0; m < masks; ++m) {
            if (m & bit) continue;
            const int s = std::popcount(m);
            const double weight = fact[s] * fact[w - s - 1] / fact[w];
            phi += weight * (value[m | bit] - value[m]);
        }
        out.phi[static_cast<std::size_t>(j)] = phi;
    }
    return out;
}

AttributionVector sampled_shapley(const Classifier& model, const WindowedInstance& instance,
                                  std::span<const WindowedInstance> background, int explained_class,
                                  std::size_t num_permutations, std::uint64_t seed) {
    check_inputs(model, instance, background, explained_class);
    if (num_permutations == 0) throw std::invalid_argument("num_permutations must be >= 1");
    const std::size_t w = instance.symbols.size();
    if (w > 63) throw std::invalid_argument("window too large for mask bookkeeping");

    // All W! orderings are enumerated once when they fit in the budget;
    // the estimator is then exact.
    std::uint64_t total_perms = 1;
    bool exhaustive = true;
    for (std::size_t i = 2; i <= w; ++i) {
        if (total_perms > num_permutations / i) {
            exhaustive = false;
            break;
        }
        total_perms *= i;
    }
    exhaustive = exhaustive && total_perms <= num_permutations;

    std::unordered_map<std::uint64_t, double> memo;
    SymbolSequence scratch(w);
    auto value = [&](std::uint64_t mask) {
        auto it = memo.find(mask);
        if (it != memo.end()) return it->second;
        const double v = coalition_value(model, instance, background, explained_class, mask, scratch);
        memo.emplace(mask, v);
        return v;
    };

    std::vector<double> sum(w, 0.0), sum_sq(w, 0.0);
    std::vector<std::size_t> perm(w);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);

    const std::size_t draws = exhaustive ? static_cast<std::size_t>(total_perms) : num_permutations;
    for (std::size_t p = 0; p < draws; ++p) {
        if (!exhaustive) rng.shuffle(perm);
        std::uint64_t mask = 0;
        double prev = value(0);
        for (std::size_t j : perm) {
            mask |= 1ULL << j;
            const double cur = value(mask);
            const double marginal = cur - prev;
            sum[j] += marginal;
            sum_sq[j] += marginal * marginal;
            prev = cur;
        }
        if (exhaustive && !std::next_permutation(perm.begin(), perm.end())) break;
    }

    AttributionVector out;
    out.instance_id = instance.id;
    out.explained_class = explained_class;
    out.phi0 = value(0);
    out.phi.assign(w, 0.0);
    out.std_error.assign(w, 0.0);
    const double n = static_cast<double>(draws);
    for (std::size_t j = 0; j < w; ++j) {
        const double mean = sum[j] / n;
        out.phi[j] = mean;
        const double var = std::max(0.0, sum_sq[j] / n - mean * mean);
        out.std_error[j] = std::sqrt(var / n);
    }
    return out;
}

ClassChoice choose_explanation_class(double f1_class0, double f1_class1) {
    if (f1_class0 < 0.0 || f1_class0 > 1.0 || f1_class1 < 0.0 || f1_class1 > 1.0)
        throw std::invalid_argument("per-class scores must lie in [0,1]");
    ClassChoice choice;
    choice.score_class0 = f1_class0;
    choice.score_class1 = f1_class1;
    choice.explained_class = f1_class1 <= f1_class0 ? 1 : 0;  // tie -> purchase class
    return choice;
}

namespace {

void check_alignment(const AttributionMatrix& matrix, std::span<const WindowedInstance> instances) {
    if (matrix.rows.size() != instances.size())
        throw std::invalid_argument("attribution matrix and instance list differ in length");
    for (std::size_t i = 0; i < instances.size(); ++i)
        if (matrix.rows[i].phi.size() != instances[i].symbols.size())
            throw std::invalid_argument("attribution row width differs from instance window");
}

}  // namespace

double aggregate_element(const AttributionMatrix& matrix,
                         std::span<const WindowedInstance> instances, Symbol t) {
    check_alignment(matrix, instances);
    double total = 0.0;
    for (std::size_t l = 0; l < instances.size(); ++l) {
        const auto& symbols = instances[l].symbols;
        const auto& phi = matrix.rows[l].phi;
        for (std::size_t j = 0; j < symbols.size(); ++j)
            if (symbols[j] == t) total += phi[j];
    }
    return total;
}

double aggregate_subsequence(const AttributionMatrix& matrix,
                             std::span<const WindowedInstance> instances, const Pattern& pattern,
                             OccurrenceMode mode) {
    check_alignment(matrix, instances);
    const std::size_t n = pattern.length();
    double total = 0.0;
    for (std::size_t l = 0; l < instances.size(); ++l) {
        const auto starts = find_occurrences(instances[l].symbols, pattern);
        if (starts.empty()) continue;
        const auto& phi = matrix.rows[l].phi;
        if (mode == OccurrenceMode::All) {
            for (std::size_t q : starts)
                for (std::size_t k = 0; k < n; ++k) total += phi[q + k];
        } else {
            // keep the single best-scoring occurrence in this instance
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t q : starts) {
                double occ = 0.0;
                for (std::size_t k = 0; k < n; ++k) occ += phi[q + k];
                best = std::max(best, occ);
            }
            total += best;
        }
    }
    return total;
}

AttributionMatrix attribution_matrix(const Classifier& model,
                                     std::span<const WindowedInstance> subset,
                                     std::span<const WindowedInstance> background,
                                     int explained_class, const AttributionConfig& cfg) {
    AttributionMatrix matrix;
    matrix.explained_class = explained_class;
    matrix.rows.resize(subset.size());
    const bool exact = model.window() <= cfg.exact_max_window;
    parallel_for(subset.size(), cfg.threads, [&](std::size_t i) {
        if (exact) {
            matrix.rows[i] = exact_shapley(model, subset[i], background, explained_class);
        } else {
            matrix.rows[i] = sampled_shapley(model, subset[i], background, explained_class,
                                             cfg.permutations, mix_seed(cfg.seed, i));
        }
    });
    return matrix;
}

void write_attribution_csv(std::ostream& out, const AttributionMatrix& matrix) {
    char buf[40];
    for (const auto& row : matrix.rows) {
        out << row.instance_id << ',' << row.explained_class;
        std::snprintf(buf, sizeof(buf), "%.17g", row.phi0);
        out << ',' << buf;
        for (double v : row.phi) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << ',' << buf;
        }
        out << '\n';
    }
}

AttributionMatrix read_attribution_csv(std::istream& in) {
    AttributionMatrix matrix;
    std::string line;
    std::size_t lineno = 0, width = 0;
    bool have_class = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        AttributionVector row;
        if (!std::getline(ss, row.instance_id, ','))
            throw std::runtime_error("attribution line " + std::to_string(lineno) + ": missing id");
        if (!std::getline(ss, field, ','))
            throw std::runtime_error("attribution line " + std::to_string(lineno) + ": missing class");
        row.explained_class = std::stoi(field);
        if (row.explained_class != 0 && row.explained_class != 1)
            throw std::runtime_error("attribution line " + std::to_string(lineno) + ": class must be 0 or 1");
        if (!std::getline(ss, field, ','))
            throw std::runtime_error("attribution line " + std::to_string(lineno) + ": missing phi0");
        row.phi0 = std::stod(field);
        while (std::getline(ss, field, ',')) row.phi.push_back(std::stod(field));
        if (row.phi.empty())
            throw std::runtime_error("attribution line " + std::to_string(lineno) + ": no phi values");
        if (width == 0)
            width = row.phi.size();
        else if (row.phi.size() != width)
            throw std::runtime_error("attribution line " + std::to_string(lineno) + ": ragged width");
        if (!have_class) {
            matrix.explained_class = row.explained_class;
            have_class = true;
        } else if (matrix.explained_class != row.explained_class) {
            throw std::runtime_error("attribution line " + std::to_string(lineno) +
                                     ": explained class differs between rows");
        }
        matrix.rows.push_back(std::move(row));
    }
    if (matrix.rows.empty()) throw std::runtime_error("attribution file holds no rows");
    return matrix;
}

}  // namespace clickmine
