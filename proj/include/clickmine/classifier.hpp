#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "clickmine/evaluation.hpp"
#include "clickmine/sequence.hpp"

namespace clickmine {

struct ArchitectureConfig {
    int window = 5;
    int embedding_dim = 8;
    int hidden_dim = 16;
};

struct TrainConfig {
    int epochs = 40;
    int batch_size = 32;
    double learning_rate = 0.15;
    std::uint64_t seed = 1;
    // Loss weight for positive (purchase) instances; 0 disables weighting.
    double positive_class_weight = 0.0;
};

// Read-only prediction contract shared by attribution and the query
// strategies. forward() must be safe to call concurrently on a trained
// model; outputs are a valid 2-class probability vector.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual std::array<double, 2> forward(const SymbolSequence& symbols) const = 0;
    virtual int window() const = 0;
};

// Compact reference model: per-symbol embedding -> single tanh recurrent
// layer -> last hidden state -> affine -> softmax. Trained from scratch at
// every active-learning iteration; never warm-started.
class RecurrentClassifier final : public Classifier {
public:
    // Deterministic scaled-uniform initialization per seed.
    RecurrentClassifier(const ArchitectureConfig& arch, std::uint64_t seed);

    std::array<double, 2> forward(const SymbolSequence& symbols) const override;
    int window() const override { return arch_.window; }

    // Mini-batch gradient descent on mean cross-entropy. Returns the
    // per-epoch loss history; deterministic per cfg.seed (fixed shuffle
    // order). epochs = 0 leaves the parameters untouched.
    std::vector<double> train(const std::vector<WindowedInstance>& data, const TrainConfig& cfg);

    // Unweighted cross-entropy of one labeled instance.
    double loss(const WindowedInstance& inst) const;

    // Analytic gradient vs central finite differences over every
    // parameter; returns the max relative error (absolute difference when
    // both gradients are below 1e-7).
    double gradient_check(const WindowedInstance& inst, double epsilon = 1e-5) const;

    enum class Tensor { Embedding, InputWeights, RecurrentWeights, HiddenBias, ReadoutWeights, ReadoutBias };
    std::span<double> tensor(Tensor t);
    std::span<const double> tensor(Tensor t) const;
    std::span<const double> parameters() const { return params_; }
    std::size_t parameter_count() const { return params_.size(); }

    const ArchitectureConfig& arch() const { return arch_; }
    std::uint64_t init_seed() const { return init_seed_; }

    // Versioned text checkpoint; round-trip reproduces forward outputs
    // bit-for-bit (hexfloat encoding).
    void save(std::ostream& out) const;
    static RecurrentClassifier load(std::istream& in);

private:
    // Accumulates the weighted gradient into `grad`; returns the weighted loss.
    double backward(const WindowedInstance& inst, double weight, std::vector<double>& grad) const;
    std::pair<std::size_t, std::size_t> tensor_range(Tensor t) const;

    ArchitectureConfig arch_;
    std::uint64_t init_seed_ = 0;
    std::vector<double> params_;
    std::size_t off_emb_ = 0, off_win_ = 0, off_wrec_ = 0, off_bh_ = 0, off_wout_ = 0, off_bout_ = 0;
};

ConfusionMatrix evaluate(const Classifier& model, std::span<const WindowedInstance> instances);

}  // namespace clickmine
