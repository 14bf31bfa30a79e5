#include "clickmine/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "clickmine/rng.hpp"

namespace clickmine {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

SymbolRules default_symbol_rules() {
    return SymbolRules{
        {"1", 1},          {"page_view", 1},        {"pageview", 1},    {"view", 1},
        {"2", 2},          {"product_detail", 2},   {"detail", 2},      {"browse_detail", 2},
        {"3", 3},          {"add_to_cart", 3},      {"add", 3},         {"cart_add", 3},
        {"4", 4},          {"remove_from_cart", 4}, {"remove", 4},      {"cart_remove", 4},
        {"purchase", kPurchaseMarker},
        {"buy", kPurchaseMarker},
        {"purchased", kPurchaseMarker},
    };
}

SymbolizedSession symbolize(const RawSession& raw, const SymbolRules& rules) {
    SymbolizedSession out;
    out.label = raw.has_purchase ? 1 : 0;
    for (const auto& event : raw.events) {
        const auto it = rules.find(lower(event));
        if (it == rules.end())
            throw std::runtime_error("unknown action name: " + event);
        if (it->second == kPurchaseMarker) {
            out.label = 1;  // purchase is the label, never a symbol
            continue;
        }
        if (!is_valid_symbol(it->second))
            throw std::runtime_error("rule maps '" + event + "' outside the alphabet");
        out.symbols.push_back(static_cast<Symbol>(it->second));
    }
    return out;
}

std::optional<WindowedInstance> normalize_window(std::string id, const SymbolSequence& symbols,
                                                 int label, int window) {
    if (window < 1) throw std::invalid_argument("window length must be >= 1");
    if (symbols.size() < static_cast<std::size_t>(window)) return std::nullopt;
    WindowedInstance inst;
    inst.id = std::move(id);
    inst.symbols.assign(symbols.begin(), symbols.begin() + window);
    inst.label = label;
    return inst;
}

Dataset resample_imbalance(const std::vector<WindowedInstance>& instances, double ratio,
                           std::size_t size, std::uint64_t seed) {
    if (ratio <= 0.0 || ratio >= 1.0)
        throw std::invalid_argument("purchase ratio must lie in (0,1)");
    const std::size_t want_pos = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(size)));
    const std::size_t want_neg = size - want_pos;

    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < instances.size(); ++i)
        (instances[i].label == 1 ? pos : neg).push_back(i);

    if (pos.size() < want_pos)
        throw std::runtime_error("insufficient positive instances: need " +
                                 std::to_string(want_pos) + ", have " + std::to_string(pos.size()));
    if (neg.size() < want_neg)
        throw std::runtime_error("insufficient negative instances: need " +
                                 std::to_string(want_neg) + ", have " + std::to_string(neg.size()));

    Rng rng(seed);
    auto chosen_pos = rng.sample(pos, want_pos);
    auto chosen_neg = rng.sample(neg, want_neg);

    std::vector<std::size_t> all;
    all.reserve(size);
    all.insert(all.end(), chosen_pos.begin(), chosen_pos.end());
    all.insert(all.end(), chosen_neg.begin(), chosen_neg.end());
    rng.shuffle(all);

    Dataset out;
    out.instances.reserve(size);
    for (std::size_t idx : all) out.instances.push_back(instances[idx]);
    return out;
}

DatasetSplit partition(const Dataset& dataset, const SplitSizes& sizes, std::uint64_t seed) {
    if (sizes.total() != dataset.size())
        throw std::invalid_argument("split sizes sum to " + std::to_string(sizes.total()) +
                                    " but dataset holds " + std::to_string(dataset.size()));

    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < dataset.size(); ++i)
        (dataset.instances[i].label == 1 ? pos : neg).push_back(i);

    Rng rng(seed);
    rng.shuffle(pos);
    rng.shuffle(neg);

    // Largest-remainder allocation of positives keeps every part's class
    // fraction within 1/|part| of the whole.
    const std::array<std::size_t, 3> part_sizes{sizes.train, sizes.test, sizes.pool};
    const double frac = dataset.size() ? static_cast<double>(pos.size()) / static_cast<double>(dataset.size()) : 0.0;
    std::array<std::size_t, 3> part_pos{};
    std::array<double, 3> remainder{};
    std::size_t assigned = 0;
    for (int p = 0; p < 3; ++p) {
        const double target = frac * static_cast<double>(part_sizes[p]);
        part_pos[p] = static_cast<std::size_t>(std::floor(target));
        remainder[p] = target - std::floor(target);
        assigned += part_pos[p];
    }
    std::array<int, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return remainder[a] > remainder[b]; });
    for (int p = 0; assigned < pos.size(); ++p)
        ++part_pos[order[p % 3]], ++assigned;

    DatasetSplit split;
    std::array<std::vector<std::size_t>*, 3> parts{&split.train, &split.test, &split.pool};
    std::size_t pos_at = 0, neg_at = 0;
    for (int p = 0; p < 3; ++p) {
        const std::size_t n_pos = std::min(part_pos[p], part_sizes[p]);
        const std::size_t n_neg = part_sizes[p] - n_pos;
        if (pos_at + n_pos > pos.size() || neg_at + n_neg > neg.size())
            throw std::runtime_error("partition: class populations cannot satisfy stratified sizes");
        parts[p]->insert(parts[p]->end(), pos.begin() + pos_at, pos.begin() + pos_at + n_pos);
        parts[p]->insert(parts[p]->end(), neg.begin() + neg_at, neg.begin() + neg_at + n_neg);
        pos_at += n_pos;
        neg_at += n_neg;
        std::sort(parts[p]->begin(), parts[p]->end());
    }
    return split;
}

namespace {

void check_distribution(const std::array<double, kAlphabetSize>& row, const char* what) {
    double sum = 0.0;
    for (double p : row) {
        if (p < 0.0) throw std::invalid_argument(std::string(what) + " has a negative entry");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument(std::string(what) + " does not sum to 1 (got " +
                                    std::to_string(sum) + ")");
}

Symbol draw_categorical(const std::array<double, kAlphabetSize>& dist, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (int s = 0; s < kAlphabetSize; ++s) {
        acc += dist[s];
        if (u < acc) return static_cast<Symbol>(s + 1);
    }
    return kMaxSymbol;  // u landed in the rounding tail
}

}  // namespace

SyntheticBatch generate_synthetic_batch(const SyntheticConfig& cfg) {
    if (cfg.window < 1) throw std::invalid_argument("window length must be >= 1");
    if (cfg.min_session_len > cfg.max_session_len)
        throw std::invalid_argument("min_session_len exceeds max_session_len");
    if (cfg.lift < 0.0) throw std::invalid_argument("lift must be non-negative");
    check_distribution(cfg.initial, "initial distribution");
    for (int s = 0; s < kAlphabetSize; ++s)
        check_distribution(cfg.transition[s], "transition row");

    Rng rng(cfg.seed);
    SyntheticBatch batch;
    batch.sessions.reserve(cfg.size);
    batch.windows.instances.reserve(cfg.size);

    std::size_t emitted = 0;
    while (emitted < cfg.size) {
        const std::size_t len =
            cfg.min_session_len + rng.below(cfg.max_session_len - cfg.min_session_len + 1);
        SymbolSequence session;
        session.reserve(len);
        session.push_back(draw_categorical(cfg.initial, rng));
        for (std::size_t t = 1; t < len; ++t)
            session.push_back(draw_categorical(cfg.transition[session.back() - 1], rng));

        if (session.size() < static_cast<std::size_t>(cfg.window)) continue;

        // Label probability depends on the early window the model will see.
        SymbolSequence window(session.begin(), session.begin() + cfg.window);
        const bool planted = !find_occurrences(window, cfg.planted_pattern).empty();
        const double p = std::min(1.0, cfg.base_purchase_prob + (planted ? cfg.lift : 0.0));
        const int label = rng.uniform() < p ? 1 : 0;

        char idbuf[32];
        std::snprintf(idbuf, sizeof(idbuf), "synth-%06zu", emitted);

        RawSession raw;
        raw.session_id = idbuf;
        for (Symbol s : session) raw.events.push_back(std::to_string(static_cast<int>(s)));
        raw.has_purchase = label == 1;
        batch.sessions.push_back(std::move(raw));

        WindowedInstance inst;
        inst.id = idbuf;
        inst.symbols = std::move(window);
        inst.label = label;
        batch.windows.instances.push_back(std::move(inst));
        ++emitted;
    }
    return batch;
}

Dataset generate_synthetic(const SyntheticConfig& cfg) {
    return generate_synthetic_batch(cfg).windows;
}

RawSession parse_session_line(const std::string& line) {
    nlohmann::json j = nlohmann::json::parse(line);
    if (!j.is_object()) throw std::runtime_error("session record is not a JSON object");
    RawSession s;
    s.session_id = j.at("session_id").get<std::string>();
    const auto& events = j.at("events");
    if (!events.is_array() || events.empty())
        throw std::runtime_error("session events must be a non-empty array");
    for (const auto& e : events) {
        if (e.is_number_integer())
            s.events.push_back(std::to_string(e.get<int>()));
        else if (e.is_string())
            s.events.push_back(e.get<std::string>());
        else
            throw std::runtime_error("session event must be an integer code or action name");
    }
    if (j.contains("purchase")) s.has_purchase = j.at("purchase").get<bool>();
    return s;
}

std::string session_to_json(const RawSession& s) {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : s.events) {
        // Numeric codes round-trip as integers.
        bool numeric = !e.empty() && e.find_first_not_of("0123456789") == std::string::npos;
        if (numeric)
            events.push_back(std::stoi(e));
        else
            events.push_back(e);
    }
    nlohmann::json j{{"session_id", s.session_id}, {"events", events}, {"purchase", s.has_purchase}};
    return j.dump();
}

void write_dataset_csv(std::ostream& out, const Dataset& dataset) {
    for (const auto& inst : dataset.instances) {
        out << inst.id << ',' << inst.label;
        for (Symbol s : inst.symbols) out << ',' << static_cast<int>(s);
        out << '\n';
    }
}

Dataset read_dataset_csv(std::istream& in) {
    Dataset out;
    std::string line;
    std::size_t lineno = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        WindowedInstance inst;
        if (!std::getline(ss, inst.id, ','))
            throw std::runtime_error("line " + std::to_string(lineno) + ": missing id");
        if (!std::getline(ss, field, ','))
            throw std::runtime_error("line " + std::to_string(lineno) + ": missing label");
        if (field != "0" && field != "1")
            throw std::runtime_error("line " + std::to_string(lineno) + ": label must be 0 or 1");
        inst.label = field == "1" ? 1 : 0;
        while (std::getline(ss, field, ',')) {
            int code;
            try {
                code = std::stoi(field);
            } catch (const std::exception&) {
                throw std::runtime_error("line " + std::to_string(lineno) + ": bad symbol '" + field + "'");
            }
            if (!is_valid_symbol(code))
                throw std::runtime_error("line " + std::to_string(lineno) + ": symbol " +
                                         std::to_string(code) + " outside alphabet");
            inst.symbols.push_back(static_cast<Symbol>(code));
        }
        if (inst.symbols.empty())
            throw std::runtime_error("line " + std::to_string(lineno) + ": no symbols");
        if (width == 0)
            width = inst.symbols.size();
        else if (inst.symbols.size() != width)
            throw std::runtime_error("line " + std::to_string(lineno) + ": window length " +
                                     std::to_string(inst.symbols.size()) + " differs from " +
                                     std::to_string(width));
        out.instances.push_back(std::move(inst));
    }
    if (out.instances.empty()) throw std::runtime_error("dataset file holds no instances");
    return out;
}

UtilityTable read_utility_table_csv(std::istream& in) {
    UtilityTable table;
    std::array<bool, kAlphabetSize> seen{};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::stringstream ss(line);
        std::string sym_field, val_field;
        if (!std::getline(ss, sym_field, ',') || !std::getline(ss, val_field))
            throw std::runtime_error("utility table line " + std::to_string(lineno) +
                                     ": expected symbol,utility");
        int sym;
        double val;
        try {
            sym = std::stoi(sym_field);
            val = std::stod(val_field);
        } catch (const std::exception&) {
            throw std::runtime_error("utility table line " + std::to_string(lineno) + ": parse error");
        }
        if (!is_valid_symbol(sym))
            throw std::runtime_error("utility table line " + std::to_string(lineno) +
                                     ": symbol outside alphabet");
        table.set(static_cast<Symbol>(sym), val);
        seen[sym - 1] = true;
    }
    for (int s = 0; s < kAlphabetSize; ++s)
        if (!seen[s])
            throw std::runtime_error("utility table misses symbol " + std::to_string(s + 1));
    return table;
}

}  // namespace clickmine
