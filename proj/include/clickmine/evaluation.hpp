#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace clickmine {

// Positive class is purchase (= 1) throughout.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + fp + tn + fn; }
};

struct MetricsReport {
    double precision = 0.0;
    double accuracy = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double mcc = 0.0;
    double f1_class0 = 0.0;
    double f1_class1 = 0.0;
    // Set when any metric hit a zero denominator and was defined as 0.
    bool degenerate = false;
};

// argmax over the probability vector; an exact 0.5 tie predicts class 1.
int predict_label(const std::array<double, 2>& prob);

ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& labels);

MetricsReport metrics(const ConfusionMatrix& cm);

}  // namespace clickmine
