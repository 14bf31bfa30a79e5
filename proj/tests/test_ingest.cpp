#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "clickmine/ingest.hpp"
#include "clickmine/rng.hpp"

using namespace clickmine;

TEST_CASE("symbolize maps actions and strips the purchase event") {
    const auto rules = default_symbol_rules();

    auto s = symbolize({"s1", {"view", "detail", "add", "BUY"}, false}, rules);
    CHECK(s.symbols == SymbolSequence{1, 2, 3});
    CHECK(s.label == 1);

    s = symbolize({"s2", {"view", "view"}, false}, rules);
    CHECK(s.symbols == SymbolSequence{1, 1});
    CHECK(s.label == 0);

    CHECK_THROWS_WITH_AS(symbolize({"s3", {"remove", "view", "UNKNOWN"}, false}, rules),
                         doctest::Contains("UNKNOWN"), std::runtime_error);
}

TEST_CASE("symbolize accepts numeric codes and the purchase flag") {
    const auto rules = default_symbol_rules();
    auto s = symbolize({"s1", {"1", "4", "2"}, true}, rules);
    CHECK(s.symbols == SymbolSequence{1, 4, 2});
    CHECK(s.label == 1);
}

TEST_CASE("symbolization preserves order and is invertible on the rule map") {
    const auto rules = default_symbol_rules();
    const std::vector<std::string> names{"view", "detail", "add", "remove", "view"};
    const auto s = symbolize({"s", names, false}, rules);
    REQUIRE(s.symbols.size() == names.size());
    for (std::size_t i = 0; i < names.size(); ++i)
        CHECK(static_cast<int>(s.symbols[i]) == rules.at(names[i]));
}

TEST_CASE("normalize_window keeps the first W symbols or rejects") {
    auto inst = normalize_window("a", {1, 2, 3, 1, 2, 3, 1}, 0, 5);
    REQUIRE(inst.has_value());
    CHECK(inst->symbols == SymbolSequence{1, 2, 3, 1, 2});

    CHECK_FALSE(normalize_window("b", {1, 2}, 0, 5).has_value());

    inst = normalize_window("c", {2, 3, 4, 1, 2}, 1, 5);
    REQUIRE(inst.has_value());
    CHECK(inst->symbols == SymbolSequence{2, 3, 4, 1, 2});
    CHECK(inst->label == 1);

    CHECK_THROWS_AS(normalize_window("d", {1}, 0, 0), std::invalid_argument);
}

namespace {

std::vector<WindowedInstance> make_population(std::size_t positives, std::size_t negatives) {
    std::vector<WindowedInstance> out;
    for (std::size_t i = 0; i < positives + negatives; ++i) {
        WindowedInstance inst;
        inst.id = "i" + std::to_string(i);
        inst.symbols = {1, 2, 3};
        inst.label = i < positives ? 1 : 0;
        out.push_back(std::move(inst));
    }
    return out;
}

}  // namespace

TEST_CASE("resample hits the requested ratio exactly") {
    const auto population = make_population(300, 2000);
    const auto ds = resample_imbalance(population, 0.10, 1000, 5);
    CHECK(ds.size() == 1000);
    CHECK(ds.count_positive() == 100);
}

TEST_CASE("resample takes everything on an exact fit") {
    const auto population = make_population(2, 2);
    const auto ds = resample_imbalance(population, 0.5, 4, 1);
    CHECK(ds.size() == 4);
    CHECK(ds.count_positive() == 2);
}

TEST_CASE("resample names the deficient class") {
    const auto population = make_population(10, 1000);
    CHECK_THROWS_WITH_AS(resample_imbalance(population, 0.9, 100, 1),
                         doctest::Contains("positive"), std::runtime_error);
    const auto inverted = make_population(1000, 10);
    CHECK_THROWS_WITH_AS(resample_imbalance(inverted, 0.1, 200, 1),
                         doctest::Contains("negative"), std::runtime_error);
}

TEST_CASE("resample is deterministic per seed") {
    const auto population = make_population(50, 450);
    const auto a = resample_imbalance(population, 0.2, 100, 77);
    const auto b = resample_imbalance(population, 0.2, 100, 77);
    const auto c = resample_imbalance(population, 0.2, 100, 78);
    REQUIRE(a.size() == b.size());
    bool same = true, same_other_seed = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        same = same && a.instances[i].id == b.instances[i].id;
        same_other_seed = same_other_seed && a.instances[i].id == c.instances[i].id;
    }
    CHECK(same);
    CHECK_FALSE(same_other_seed);
}

TEST_CASE("partition is disjoint, covering and stratified") {
    Dataset ds;
    ds.instances = make_population(100, 900);
    const auto split = partition(ds, {200, 100, 700}, 11);
    CHECK(split.train.size() == 200);
    CHECK(split.test.size() == 100);
    CHECK(split.pool.size() == 700);

    std::set<std::size_t> all;
    for (const auto* part : {&split.train, &split.test, &split.pool})
        all.insert(part->begin(), part->end());
    CHECK(all.size() == 1000);  // disjoint and covering
    CHECK(*all.rbegin() == 999);

    const double whole = 0.1;
    for (const auto* part : {&split.train, &split.test, &split.pool}) {
        std::size_t pos = 0;
        for (std::size_t i : *part) pos += ds.instances[i].label;
        const double frac = static_cast<double>(pos) / static_cast<double>(part->size());
        CHECK(std::abs(frac - whole) <= 1.0 / static_cast<double>(part->size()));
    }
}

TEST_CASE("partition rejects mismatched sizes and repeats per seed") {
    Dataset ds;
    ds.instances = make_population(10, 90);
    CHECK_THROWS_AS(partition(ds, {50, 30, 19}, 1), std::invalid_argument);

    const auto a = partition(ds, {20, 10, 70}, 3);
    const auto b = partition(ds, {20, 10, 70}, 3);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);
    CHECK(a.pool == b.pool);
}

TEST_CASE("stratification holds across random size splits") {
    Rng rng(21);
    Dataset ds;
    ds.instances = make_population(37, 463);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t train = 10 + rng.below(200);
        const std::size_t test = 10 + rng.below(200);
        const std::size_t pool = 500 - train - test;
        const auto split = partition(ds, {train, test, pool}, rng.next());
        for (const auto* part : {&split.train, &split.test, &split.pool}) {
            std::size_t pos = 0;
            for (std::size_t i : *part) pos += ds.instances[i].label;
            const double frac = static_cast<double>(pos) / static_cast<double>(part->size());
            CHECK(std::abs(frac - 37.0 / 500.0) <= 1.0 / static_cast<double>(part->size()));
        }
    }
}

TEST_CASE("the default experiment scale assembles end to end") {
    // 10,000 points at a 10% purchase ratio, split 2,000 / 1,000 / 7,000
    SyntheticConfig synth;
    synth.size = 30000;
    synth.seed = 77;
    const auto raw = generate_synthetic(synth);
    const auto ds = resample_imbalance(raw.instances, 0.10, 10000, 8);
    CHECK(ds.size() == 10000);
    CHECK(ds.count_positive() == 1000);

    const auto split = partition(ds, {2000, 1000, 7000}, 9);
    std::set<std::size_t> all;
    for (const auto* part : {&split.train, &split.test, &split.pool})
        all.insert(part->begin(), part->end());
    CHECK(all.size() == 10000);
    CHECK(split.train.size() == 2000);
    CHECK(split.test.size() == 1000);
    CHECK(split.pool.size() == 7000);
}

TEST_CASE("synthetic generation is byte-identical per seed") {
    SyntheticConfig cfg;
    cfg.size = 400;
    const auto a = generate_synthetic(cfg);
    const auto b = generate_synthetic(cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.instances[i].id == b.instances[i].id);
        CHECK(a.instances[i].symbols == b.instances[i].symbols);
        CHECK(a.instances[i].label == b.instances[i].label);
    }
}

TEST_CASE("zero lift leaves the positive rate at the base rate") {
    SyntheticConfig cfg;
    cfg.size = 4000;
    cfg.lift = 0.0;
    cfg.base_purchase_prob = 0.2;
    cfg.seed = 31;
    const auto ds = generate_synthetic(cfg);
    const double rate = static_cast<double>(ds.count_positive()) / static_cast<double>(ds.size());
    const double sigma = std::sqrt(0.2 * 0.8 / static_cast<double>(ds.size()));
    CHECK(std::abs(rate - 0.2) <= 3.0 * sigma);
}

TEST_CASE("a planted pattern raises the purchase rate of its carriers") {
    SyntheticConfig cfg;
    cfg.size = 3000;
    cfg.lift = 0.8;
    cfg.base_purchase_prob = 0.05;
    cfg.seed = 13;
    const auto ds = generate_synthetic(cfg);
    std::size_t with = 0, with_pos = 0, without = 0, without_pos = 0;
    for (const auto& inst : ds.instances) {
        if (!find_occurrences(inst.symbols, cfg.planted_pattern).empty()) {
            ++with;
            with_pos += inst.label;
        } else {
            ++without;
            without_pos += inst.label;
        }
    }
    REQUIRE(with > 0);
    REQUIRE(without > 0);
    CHECK(static_cast<double>(with_pos) / with > static_cast<double>(without_pos) / without);
}

TEST_CASE("degenerate transition rows are rejected") {
    SyntheticConfig cfg;
    cfg.transition[2] = {0.3, 0.3, 0.3, 0.2};  // sums to 1.1
    CHECK_THROWS_WITH_AS(generate_synthetic(cfg), doctest::Contains("sum"), std::invalid_argument);

    SyntheticConfig neg;
    neg.initial = {1.2, -0.2, 0.0, 0.0};
    CHECK_THROWS_AS(generate_synthetic(neg), std::invalid_argument);
}

TEST_CASE("session JSON lines parse and round-trip") {
    const auto s = parse_session_line(
        R"({"session_id": "abc", "events": [1, 2, "add"], "purchase": true})");
    CHECK(s.session_id == "abc");
    CHECK(s.events == std::vector<std::string>{"1", "2", "add"});
    CHECK(s.has_purchase);

    const auto back = parse_session_line(session_to_json(s));
    CHECK(back.session_id == s.session_id);
    CHECK(back.events == s.events);
    CHECK(back.has_purchase == s.has_purchase);

    CHECK_THROWS(parse_session_line("not json"));
    CHECK_THROWS(parse_session_line(R"({"session_id": "x", "events": []})"));
    CHECK_THROWS(parse_session_line(R"({"session_id": "x", "events": [1.5]})"));
}

TEST_CASE("dataset csv round-trips and validates") {
    Dataset ds;
    ds.instances = {{"a", {1, 2, 3}, 1}, {"b", {3, 2, 1}, 0}};
    std::stringstream buf;
    write_dataset_csv(buf, ds);
    CHECK(buf.str() == "a,1,1,2,3\nb,0,3,2,1\n");

    const auto back = read_dataset_csv(buf);
    REQUIRE(back.size() == 2);
    CHECK(back.instances[0].id == "a");
    CHECK(back.instances[1].symbols == SymbolSequence{3, 2, 1});

    std::stringstream ragged("a,1,1,2,3\nb,0,3,2\n");
    CHECK_THROWS_WITH_AS(read_dataset_csv(ragged), doctest::Contains("line 2"), std::runtime_error);

    std::stringstream bad_symbol("a,1,1,9,3\n");
    CHECK_THROWS_AS(read_dataset_csv(bad_symbol), std::runtime_error);

    std::stringstream empty("");
    CHECK_THROWS_AS(read_dataset_csv(empty), std::runtime_error);
}

TEST_CASE("utility table csv requires full alphabet coverage") {
    std::stringstream good("# the worked dollar table\n1,10\n2,15\n3,20\n4,5\n");
    const auto table = read_utility_table_csv(good);
    CHECK(table.value(3) == 20.0);

    std::stringstream missing("1,10\n2,15\n3,20\n");
    CHECK_THROWS_WITH_AS(read_utility_table_csv(missing), doctest::Contains("4"),
                         std::runtime_error);
}
