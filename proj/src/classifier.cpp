#include "clickmine/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "clickmine/rng.hpp"

namespace clickmine {

namespace {

constexpr int kClasses = 2;
constexpr const char* kCheckpointTag = "clickmine-model";
constexpr const char* kCheckpointVersion = "v1";

void softmax2(const std::array<double, 2>& logits, std::array<double, 2>& probs) {
    const double m = std::max(logits[0], logits[1]);
    const double e0 = std::exp(logits[0] - m);
    const double e1 = std::exp(logits[1] - m);
    const double z = e0 + e1;
    probs[0] = e0 / z;
    probs[1] = e1 / z;
}

double cross_entropy2(const std::array<double, 2>& logits, int label) {
    const double m = std::max(logits[0], logits[1]);
    const double lse = m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
    return lse - logits[label];
}

}  // namespace

RecurrentClassifier::RecurrentClassifier(const ArchitectureConfig& arch, std::uint64_t seed)
    : arch_(arch), init_seed_(seed) {
    if (arch.window < 1) throw std::invalid_argument("window must be >= 1");
    if (arch.embedding_dim < 1) throw std::invalid_argument("embedding_dim must be >= 1");
    if (arch.hidden_dim < 1) throw std::invalid_argument("hidden_dim must be >= 1");

    const std::size_t e = static_cast<std::size_t>(arch.embedding_dim);
    const std::size_t h = static_cast<std::size_t>(arch.hidden_dim);
    off_emb_ = 0;
    off_win_ = off_emb_ + kAlphabetSize * e;
    off_wrec_ = off_win_ + h * e;
    off_bh_ = off_wrec_ + h * h;
    off_wout_ = off_bh_ + h;
    off_bout_ = off_wout_ + kClasses * h;
    params_.assign(off_bout_ + kClasses, 0.0);

    Rng rng(seed);
    const double emb_scale = 0.5;
    const double in_scale = 1.0 / std::sqrt(static_cast<double>(e));
    const double rec_scale = 1.0 / std::sqrt(static_cast<double>(h));
    for (std::size_t i = off_emb_; i < off_win_; ++i) params_[i] = rng.uniform(-emb_scale, emb_scale);
    for (std::size_t i = off_win_; i < off_wrec_; ++i) params_[i] = rng.uniform(-in_scale, in_scale);
    for (std::size_t i = off_wrec_; i < off_bh_; ++i) params_[i] = rng.uniform(-rec_scale, rec_scale);
    // hidden bias starts at zero
    for (std::size_t i = off_wout_; i < off_bout_; ++i) params_[i] = rng.uniform(-rec_scale, rec_scale);
    // readout bias starts at zero
}

std::pair<std::size_t, std::size_t> RecurrentClassifier::tensor_range(Tensor t) const {
    switch (t) {
        case Tensor::Embedding: return {off_emb_, off_win_};
        case Tensor::InputWeights: return {off_win_, off_wrec_};
        case Tensor::RecurrentWeights: return {off_wrec_, off_bh_};
        case Tensor::HiddenBias: return {off_bh_, off_wout_};
        case Tensor::ReadoutWeights: return {off_wout_, off_bout_};
        case Tensor::ReadoutBias: return {off_bout_, params_.size()};
    }
    throw std::invalid_argument("unknown tensor id");
}

std::span<double> RecurrentClassifier::tensor(Tensor t) {
    auto [lo, hi] = tensor_range(t);
    return std::span<double>(params_).subspan(lo, hi - lo);
}

std::span<const double> RecurrentClassifier::tensor(Tensor t) const {
    auto [lo, hi] = tensor_range(t);
    return std::span<const double>(params_).subspan(lo, hi - lo);
}

std::array<double, 2> RecurrentClassifier::forward(const SymbolSequence& symbols) const {
    const std::size_t w = static_cast<std::size_t>(arch_.window);
    if (symbols.size() != w)
        throw std::invalid_argument("sequence length " + std::to_string(symbols.size()) +
                                    " does not match trained window " + std::to_string(w));
    const std::size_t e = static_cast<std::size_t>(arch_.embedding_dim);
    const std::size_t h = static_cast<std::size_t>(arch_.hidden_dim);

    std::vector<double> hid(h, 0.0), act(h);
    for (Symbol s : symbols) {
        if (!is_valid_symbol(s)) throw std::invalid_argument("symbol outside alphabet");
        const double* x = &params_[off_emb_ + (static_cast<std::size_t>(s) - 1) * e];
        for (std::size_t i = 0; i < h; ++i) {
            double a = params_[off_bh_ + i];
            const double* win = &params_[off_win_ + i * e];
            for (std::size_t k = 0; k < e; ++k) a += win[k] * x[k];
            const double* wrec = &params_[off_wrec_ + i * h];
            for (std::size_t k = 0; k < h; ++k) a += wrec[k] * hid[k];
            act[i] = std::tanh(a);
        }
        hid.swap(act);
    }

    std::array<double, 2> logits;
    for (int c = 0; c < kClasses; ++c) {
        double a = params_[off_bout_ + c];
        const double* wout = &params_[off_wout_ + static_cast<std::size_t>(c) * h];
        for (std::size_t k = 0; k < h; ++k) a += wout[k] * hid[k];
        logits[c] = a;
    }
    std::array<double, 2> probs;
    softmax2(logits, probs);
    return probs;
}

double RecurrentClassifier::backward(const WindowedInstance& inst, double weight,
                                     std::vector<double>& grad) const {
    const std::size_t w = static_cast<std::size_t>(arch_.window);
    if (inst.symbols.size() != w)
        throw std::invalid_argument("instance length does not match trained window");
    if (inst.label != 0 && inst.label != 1)
        throw std::invalid_argument("label must be 0 or 1");
    const std::size_t e = static_cast<std::size_t>(arch_.embedding_dim);
    const std::size_t h = static_cast<std::size_t>(arch_.hidden_dim);

    // forward pass, keeping every hidden state for BPTT
    std::vector<double> states((w + 1) * h, 0.0);
    for (std::size_t t = 0; t < w; ++t) {
        const double* x = &params_[off_emb_ + (static_cast<std::size_t>(inst.symbols[t]) - 1) * e];
        const double* prev = &states[t * h];
        double* cur = &states[(t + 1) * h];
        for (std::size_t i = 0; i < h; ++i) {
            double a = params_[off_bh_ + i];
            const double* win = &params_[off_win_ + i * e];
            for (std::size_t k = 0; k < e; ++k) a += win[k] * x[k];
            const double* wrec = &params_[off_wrec_ + i * h];
            for (std::size_t k = 0; k < h; ++k) a += wrec[k] * prev[k];
            cur[i] = std::tanh(a);
        }
    }
    const double* last = &states[w * h];
    std::array<double, 2> logits;
    for (int c = 0; c < kClasses; ++c) {
        double a = params_[off_bout_ + c];
        const double* wout = &params_[off_wout_ + static_cast<std::size_t>(c) * h];
        for (std::size_t k = 0; k < h; ++k) a += wout[k] * last[k];
        logits[c] = a;
    }
    std::array<double, 2> probs;
    softmax2(logits, probs);
    const double loss = weight * cross_entropy2(logits, inst.label);

    // readout layer
    std::array<double, 2> dlogits{weight * probs[0], weight * probs[1]};
    dlogits[inst.label] -= weight;
    std::vector<double> dh(h, 0.0);
    for (int c = 0; c < kClasses; ++c) {
        grad[off_bout_ + c] += dlogits[c];
        double* gout = &grad[off_wout_ + static_cast<std::size_t>(c) * h];
        const double* wout = &params_[off_wout_ + static_cast<std::size_t>(c) * h];
        for (std::size_t k = 0; k < h; ++k) {
            gout[k] += dlogits[c] * last[k];
            dh[k] += wout[k] * dlogits[c];
        }
    }

    // backprop through time
    std::vector<double> da(h), dprev(h);
    for (std::size_t t = w; t-- > 0;) {
        const double* cur = &states[(t + 1) * h];
        const double* prev = &states[t * h];
        const std::size_t sym = static_cast<std::size_t>(inst.symbols[t]) - 1;
        const double* x = &params_[off_emb_ + sym * e];
        for (std::size_t i = 0; i < h; ++i) da[i] = dh[i] * (1.0 - cur[i] * cur[i]);
        std::fill(dprev.begin(), dprev.end(), 0.0);
        double* gemb = &grad[off_emb_ + sym * e];
        for (std::size_t i = 0; i < h; ++i) {
            grad[off_bh_ + i] += da[i];
            double* gwin = &grad[off_win_ + i * e];
            const double* win = &params_[off_win_ + i * e];
            for (std::size_t k = 0; k < e; ++k) {
                gwin[k] += da[i] * x[k];
                gemb[k] += win[k] * da[i];
            }
            double* gwrec = &grad[off_wrec_ + i * h];
            const double* wrec = &params_[off_wrec_ + i * h];
            for (std::size_t k = 0; k < h; ++k) {
                gwrec[k] += da[i] * prev[k];
                dprev[k] += wrec[k] * da[i];
            }
        }
        dh.swap(dprev);
    }
    return loss;
}

std::vector<double> RecurrentClassifier::train(const std::vector<WindowedInstance>& data,
                                               const TrainConfig& cfg) {
    if (cfg.learning_rate <= 0.0) throw std::invalid_argument("learning_rate must be positive");
    if (cfg.epochs < 0) throw std::invalid_argument("epochs must be non-negative");
    if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (cfg.positive_class_weight < 0.0)
        throw std::invalid_argument("positive_class_weight must be non-negative");
    if (data.empty()) throw std::invalid_argument("empty training set");

    std::size_t positives = 0;
    for (const auto& inst : data) positives += inst.label == 1;
    if ((positives == 0 || positives == data.size()) && cfg.positive_class_weight == 0.0)
        throw std::invalid_argument("single-class training set; set positive_class_weight to proceed");

    const double w_pos = cfg.positive_class_weight > 0.0 ? cfg.positive_class_weight : 1.0;

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(cfg.seed);

    std::vector<double> grad(params_.size());
    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(cfg.epochs));

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0, weight_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            std::fill(grad.begin(), grad.end(), 0.0);
            double batch_weight = 0.0;
            for (std::size_t i = start; i < end; ++i) {
                const auto& inst = data[order[i]];
                const double w = inst.label == 1 ? w_pos : 1.0;
                loss_sum += backward(inst, w, grad);
                batch_weight += w;
            }
            weight_sum += batch_weight;
            const double step = cfg.learning_rate / batch_weight;
            for (std::size_t i = 0; i < params_.size(); ++i) params_[i] -= step * grad[i];
        }
        const double epoch_loss = loss_sum / weight_sum;
        if (!std::isfinite(epoch_loss))
            throw std::runtime_error("training diverged (non-finite loss); lower the learning rate");
        history.push_back(epoch_loss);
    }
    return history;
}

double RecurrentClassifier::loss(const WindowedInstance& inst) const {
    // forward keeps probabilities; recompute logits path via backward-free call
    const auto probs = forward(inst.symbols);
    if (inst.label != 0 && inst.label != 1)
        throw std::invalid_argument("label must be 0 or 1");
    // guard against log(0) for extremely confident wrong predictions
    const double p = std::max(probs[inst.label], 1e-300);
    return -std::log(p);
}

double RecurrentClassifier::gradient_check(const WindowedInstance& inst, double epsilon) const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");

    std::vector<double> analytic(params_.size(), 0.0);
    backward(inst, 1.0, analytic);

    RecurrentClassifier probe = *this;
    double worst = 0.0;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        const double saved = probe.params_[i];
        probe.params_[i] = saved + epsilon;
        const double up = probe.loss(inst);
        probe.params_[i] = saved - epsilon;
        const double down = probe.loss(inst);
        probe.params_[i] = saved;
        const double fd = (up - down) / (2.0 * epsilon);
        const double denom = std::max(std::abs(analytic[i]), std::abs(fd));
        const double err = denom < 1e-7 ? std::abs(analytic[i] - fd)
                                        : std::abs(analytic[i] - fd) / denom;
        worst = std::max(worst, err);
    }
    return worst;
}

void RecurrentClassifier::save(std::ostream& out) const {
    out << kCheckpointTag << ' ' << kCheckpointVersion << '\n';
    out << "window " << arch_.window << '\n';
    out << "embedding_dim " << arch_.embedding_dim << '\n';
    out << "hidden_dim " << arch_.hidden_dim << '\n';
    out << "init_seed " << init_seed_ << '\n';
    out << "params " << params_.size() << '\n';
    char buf[48];
    for (std::size_t i = 0; i < params_.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%a", params_[i]);  // hexfloat: exact round trip
        out << buf << (((i + 1) % 8 == 0) ? '\n' : ' ');
    }
    if (params_.size() % 8 != 0) out << '\n';
    out << "end\n";
}

RecurrentClassifier RecurrentClassifier::load(std::istream& in) {
    auto expect = [&](const std::string& want) {
        std::string got;
        if (!(in >> got) || got != want)
            throw std::runtime_error("bad checkpoint: expected '" + want + "', got '" + got + "'");
    };
    expect(kCheckpointTag);
    expect(kCheckpointVersion);
    ArchitectureConfig arch;
    std::uint64_t seed = 0;
    std::size_t count = 0;
    expect("window");
    in >> arch.window;
    expect("embedding_dim");
    in >> arch.embedding_dim;
    expect("hidden_dim");
    in >> arch.hidden_dim;
    expect("init_seed");
    in >> seed;
    expect("params");
    in >> count;
    if (!in) throw std::runtime_error("bad checkpoint header");

    RecurrentClassifier model(arch, seed);
    if (count != model.params_.size())
        throw std::runtime_error("checkpoint parameter count does not match architecture");
    for (std::size_t i = 0; i < count; ++i) {
        std::string tok;
        if (!(in >> tok)) throw std::runtime_error("checkpoint truncated");
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw std::runtime_error("bad checkpoint value: " + tok);
        model.params_[i] = v;
    }
    expect("end");
    return model;
}

ConfusionMatrix evaluate(const Classifier& model, std::span<const WindowedInstance> instances) {
    std::vector<int> preds, labels;
    preds.reserve(instances.size());
    labels.reserve(instances.size());
    for (const auto& inst : instances) {
        preds.push_back(predict_label(model.forward(inst.symbols)));
        labels.push_back(inst.label);
    }
    return confusion(preds, labels);
}

}  // namespace clickmine
