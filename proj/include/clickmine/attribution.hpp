#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "clickmine/classifier.hpp"
#include "clickmine/sequence.hpp"

namespace clickmine {

// Positional Shapley values for one instance and one explained class.
// Efficiency: phi0 + sum(phi) equals the model's class probability on the
// instance (to 1e-9 in exact mode; up to sampling error otherwise).
struct AttributionVector {
    std::string instance_id;
    int explained_class = 1;
    double phi0 = 0.0;               // expected class probability over the background
    std::vector<double> phi;         // one value per sequence position
    std::vector<double> std_error;   // per position; empty in exact mode

    double sum_with_baseline() const;
};

struct AttributionMatrix {
    int explained_class = 1;
    std::vector<AttributionVector> rows;  // aligned with the explained instance list
};

struct ClassChoice {
    int explained_class = 1;
    double score_class0 = 0.0;
    double score_class1 = 0.0;
};

// Mean class probability over the background set.
double baseline_value(const Classifier& model, std::span<const WindowedInstance> background,
                      int explained_class);

// Exact Shapley values by coalition enumeration; masked positions take
// their values from the background instances (averaged). Cost is
// 2^W * |background| forward passes, so W is capped at 16.
AttributionVector exact_shapley(const Classifier& model, const WindowedInstance& instance,
                                std::span<const WindowedInstance> background, int explained_class);

// Monte-Carlo permutation estimator, deterministic per seed. When W! fits
// within num_permutations every permutation is enumerated exactly once and
// the estimate coincides with the exact value.
AttributionVector sampled_shapley(const Classifier& model, const WindowedInstance& instance,
                                  std::span<const WindowedInstance> background, int explained_class,
                                  std::size_t num_permutations, std::uint64_t seed);

// The class whose score is worse gets explained; ties go to class 1
// (purchase, the rare class).
ClassChoice choose_explanation_class(double f1_class0, double f1_class1);

// Sum of phi over every position holding symbol t, across all rows.
double aggregate_element(const AttributionMatrix& matrix,
                         std::span<const WindowedInstance> instances, Symbol t);

// Sum of phi over occurrence windows of the pattern. Mode All counts every
// occurrence; Unique keeps only the best-scoring occurrence per instance.
double aggregate_subsequence(const AttributionMatrix& matrix,
                             std::span<const WindowedInstance> instances, const Pattern& pattern,
                             OccurrenceMode mode);

// Batch computation over an explained subset. Exact mode is used when the
// window allows it, otherwise the permutation estimator. Rows are assembled
// in input order and each row derives its own RNG stream from (seed, row),
// so the output is identical for any thread count.
struct AttributionConfig {
    int background_size = 16;
    std::size_t permutations = 200;
    int exact_max_window = 10;
    std::uint64_t seed = 202;
    int threads = 1;
};

AttributionMatrix attribution_matrix(const Classifier& model,
                                     std::span<const WindowedInstance> subset,
                                     std::span<const WindowedInstance> background,
                                     int explained_class, const AttributionConfig& cfg);

// Audit export: instance_id,class,phi0,phi_1..phi_W per line.
void write_attribution_csv(std::ostream& out, const AttributionMatrix& matrix);
AttributionMatrix read_attribution_csv(std::istream& in);

}  // namespace clickmine
