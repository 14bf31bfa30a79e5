#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "clickmine/classifier.hpp"
#include "clickmine/rng.hpp"

using namespace clickmine;

namespace {

WindowedInstance make_instance(std::string id, SymbolSequence symbols, int label) {
    return {std::move(id), std::move(symbols), label};
}

SymbolSequence random_sequence(Rng& rng, std::size_t len) {
    SymbolSequence seq(len);
    for (auto& s : seq) s = static_cast<Symbol>(1 + rng.below(4));
    return seq;
}

// toy task: label = sequence contains an add-to-cart action
std::vector<WindowedInstance> separable_toy(std::size_t count, int window, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<WindowedInstance> out;
    while (out.size() < count) {
        auto seq = random_sequence(rng, static_cast<std::size_t>(window));
        const bool has3 = std::find(seq.begin(), seq.end(), Symbol{3}) != seq.end();
        out.push_back(make_instance("t" + std::to_string(out.size()), std::move(seq), has3 ? 1 : 0));
    }
    return out;
}

}  // namespace

TEST_CASE("initialization is deterministic per seed") {
    const ArchitectureConfig arch{5, 8, 16};
    RecurrentClassifier a(arch, 7), b(arch, 7), c(arch, 8);
    REQUIRE(a.parameter_count() == b.parameter_count());
    bool identical = true;
    for (std::size_t i = 0; i < a.parameter_count(); ++i)
        identical = identical && a.parameters()[i] == b.parameters()[i];
    CHECK(identical);

    bool differs = false;
    for (std::size_t i = 0; i < a.parameter_count(); ++i)
        differs = differs || std::abs(a.parameters()[i] - c.parameters()[i]) > 1e-12;
    CHECK(differs);
}

TEST_CASE("bad architecture configs are rejected") {
    CHECK_THROWS_AS(RecurrentClassifier({5, 0, 16}, 1), std::invalid_argument);
    CHECK_THROWS_AS(RecurrentClassifier({5, 8, 0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(RecurrentClassifier({0, 8, 16}, 1), std::invalid_argument);
}

TEST_CASE("forward emits a probability vector") {
    RecurrentClassifier model({5, 8, 16}, 3);
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = model.forward(random_sequence(rng, 5));
        CHECK(p[0] >= 0.0);
        CHECK(p[1] >= 0.0);
        CHECK(std::abs(p[0] + p[1] - 1.0) <= 1e-9);
    }
    CHECK_THROWS_AS(model.forward({1, 2}), std::invalid_argument);
}

TEST_CASE("a zeroed readout yields the symmetric prediction") {
    RecurrentClassifier model({5, 8, 16}, 3);
    for (double& v : model.tensor(RecurrentClassifier::Tensor::ReadoutWeights)) v = 0.0;
    for (double& v : model.tensor(RecurrentClassifier::Tensor::ReadoutBias)) v = 0.0;
    const auto p = model.forward({1, 2, 3, 4, 1});
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("predictions are order sensitive") {
    // seeded witness: reversing the sequence moves the output
    RecurrentClassifier model({5, 8, 16}, 11);
    const auto fwd = model.forward({1, 2, 3, 4, 1});
    const auto rev = model.forward({1, 4, 3, 2, 1});
    CHECK(std::abs(fwd[1] - rev[1]) > 1e-9);
}

TEST_CASE("training fits a linearly separable toy task") {
    const auto data = separable_toy(200, 5, 5);
    RecurrentClassifier model({5, 8, 16}, 1);
    TrainConfig tc;
    tc.epochs = 40;
    tc.learning_rate = 0.15;
    tc.seed = 2;
    const auto history = model.train(data, tc);
    REQUIRE(history.size() == 40);
    CHECK(history.back() <= history.front());

    const auto cm = evaluate(model, data);
    const double accuracy =
        static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
    CHECK(accuracy >= 0.95);
}

TEST_CASE("zero epochs leave the parameters untouched") {
    const auto data = separable_toy(40, 5, 6);
    RecurrentClassifier model({5, 8, 16}, 1);
    const std::vector<double> before(model.parameters().begin(), model.parameters().end());
    TrainConfig tc;
    tc.epochs = 0;
    const auto history = model.train(data, tc);
    CHECK(history.empty());
    bool identical = true;
    for (std::size_t i = 0; i < before.size(); ++i)
        identical = identical && before[i] == model.parameters()[i];
    CHECK(identical);
}

TEST_CASE("single-class training requires explicit weighting") {
    std::vector<WindowedInstance> data;
    for (int i = 0; i < 10; ++i) data.push_back(make_instance("n" + std::to_string(i), {1, 2, 1, 2, 1}, 0));
    RecurrentClassifier model({5, 4, 6}, 1);
    TrainConfig tc;
    tc.epochs = 1;
    CHECK_THROWS_AS(model.train(data, tc), std::invalid_argument);

    tc.positive_class_weight = 2.0;
    CHECK_NOTHROW(model.train(data, tc));
}

TEST_CASE("training is deterministic per seed") {
    const auto data = separable_toy(80, 5, 9);
    TrainConfig tc;
    tc.epochs = 5;
    tc.seed = 4;
    RecurrentClassifier a({5, 6, 8}, 2), b({5, 6, 8}, 2);
    a.train(data, tc);
    b.train(data, tc);
    bool identical = true;
    for (std::size_t i = 0; i < a.parameter_count(); ++i)
        identical = identical && a.parameters()[i] == b.parameters()[i];
    CHECK(identical);
}

TEST_CASE("a divergent run aborts with a diagnostic") {
    const auto data = separable_toy(30, 5, 10);
    RecurrentClassifier model({5, 6, 8}, 2);
    TrainConfig tc;
    tc.epochs = 8;
    tc.learning_rate = 1e305;
    CHECK_THROWS_WITH_AS(model.train(data, tc), doctest::Contains("learning rate"),
                         std::runtime_error);
}

TEST_CASE("invalid train configs are rejected") {
    const auto data = separable_toy(10, 5, 3);
    RecurrentClassifier model({5, 4, 4}, 1);
    TrainConfig tc;
    tc.learning_rate = 0.0;
    CHECK_THROWS_AS(model.train(data, tc), std::invalid_argument);
    tc = {};
    tc.batch_size = 0;
    CHECK_THROWS_AS(model.train(data, tc), std::invalid_argument);
    tc = {};
    CHECK_THROWS_AS(model.train({}, tc), std::invalid_argument);
}

TEST_CASE("analytic gradients match finite differences") {
    Rng rng(23);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        RecurrentClassifier model({6, 4, 6}, seed);
        const auto inst = make_instance("g", random_sequence(rng, 6), seed % 2 ? 1 : 0);
        CHECK(model.gradient_check(inst) <= 1e-4);
    }
}

TEST_CASE("dead units fall back to the absolute difference") {
    RecurrentClassifier model({5, 4, 6}, 8);
    // a zeroed readout kills most gradients upstream
    for (double& v : model.tensor(RecurrentClassifier::Tensor::ReadoutWeights)) v = 0.0;
    for (double& v : model.tensor(RecurrentClassifier::Tensor::ReadoutBias)) v = 0.0;
    const auto inst = make_instance("d", {1, 2, 3, 4, 1}, 1);
    CHECK(model.gradient_check(inst) <= 1e-4);
}

TEST_CASE("gradient check rejects a zero step") {
    RecurrentClassifier model({5, 4, 6}, 8);
    const auto inst = make_instance("z", {1, 2, 3, 4, 1}, 0);
    CHECK_THROWS_AS(model.gradient_check(inst, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(model.gradient_check(inst, -1e-5), std::invalid_argument);
}

TEST_CASE("checkpoints round-trip bit-for-bit") {
    const auto data = separable_toy(60, 5, 12);
    RecurrentClassifier model({5, 8, 16}, 4);
    TrainConfig tc;
    tc.epochs = 3;
    model.train(data, tc);

    std::stringstream buf;
    model.save(buf);
    const auto loaded = RecurrentClassifier::load(buf);

    CHECK(loaded.arch().window == model.arch().window);
    CHECK(loaded.init_seed() == model.init_seed());
    Rng rng(40);
    for (int trial = 0; trial < 20; ++trial) {
        const auto seq = random_sequence(rng, 5);
        const auto a = model.forward(seq);
        const auto b = loaded.forward(seq);
        CHECK(a[0] == b[0]);
        CHECK(a[1] == b[1]);
    }
}

TEST_CASE("corrupted checkpoints are rejected") {
    std::stringstream buf("clickmine-model v9\n");
    CHECK_THROWS_AS(RecurrentClassifier::load(buf), std::runtime_error);

    RecurrentClassifier model({5, 4, 4}, 1);
    std::stringstream good;
    model.save(good);
    std::string text = good.str();
    text.resize(text.size() / 2);  // truncate
    std::stringstream broken(text);
    CHECK_THROWS_AS(RecurrentClassifier::load(broken), std::runtime_error);
}
