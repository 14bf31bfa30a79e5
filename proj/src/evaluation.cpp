#include "clickmine/evaluation.hpp"

#include <cmath>
#include <stdexcept>

namespace clickmine {

int predict_label(const std::array<double, 2>& prob) {
    return prob[1] >= prob[0] ? 1 : 0;
}

ConfusionMatrix confusion(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.size() != labels.size())
        throw std::invalid_argument("confusion: predictions and labels differ in length");
    if (predictions.empty())
        throw std::invalid_argument("confusion: empty input");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool pred = predictions[i] == 1;
        const bool truth = labels[i] == 1;
        if (pred && truth)
            ++cm.tp;
        else if (pred && !truth)
            ++cm.fp;
        else if (!pred && truth)
            ++cm.fn;
        else
            ++cm.tn;
    }
    return cm;
}

namespace {

// Zero denominator -> 0, flagged.
double ratio(double num, double den, bool& degenerate) {
    if (den == 0.0) {
        degenerate = true;
        return 0.0;
    }
    return num / den;
}

double f1_from(double precision, double recall, bool& degenerate) {
    return ratio(2.0 * precision * recall, precision + recall, degenerate);
}

}  // namespace

MetricsReport metrics(const ConfusionMatrix& cm) {
    const double tp = static_cast<double>(cm.tp);
    const double fp = static_cast<double>(cm.fp);
    const double tn = static_cast<double>(cm.tn);
    const double fn = static_cast<double>(cm.fn);

    MetricsReport r;
    r.precision = ratio(tp, tp + fp, r.degenerate);
    r.recall = ratio(tp, tp + fn, r.degenerate);
    r.accuracy = ratio(tp + tn, tp + fp + tn + fn, r.degenerate);
    r.f1 = f1_from(r.precision, r.recall, r.degenerate);
    r.f1_class1 = r.f1;

    // Class-0 F1: swap the positive role.
    bool deg0 = false;
    const double prec0 = ratio(tn, tn + fn, deg0);
    const double rec0 = ratio(tn, tn + fp, deg0);
    r.f1_class0 = f1_from(prec0, rec0, deg0);
    r.degenerate = r.degenerate || deg0;

    const double denom =
        std::sqrt((tp + fp) * (tp + fn) * (tn + fp) * (tn + fn));
    r.mcc = ratio(tp * tn - fp * fn, denom, r.degenerate);
    return r;
}

}  // namespace clickmine
