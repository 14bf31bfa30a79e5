#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "clickmine/sequence.hpp"

namespace clickmine {

// One raw session as it arrives on the wire. Events are action names or
// numeric codes kept as text; the purchase flag carries the label for
// records whose events are already symbolized.
struct RawSession {
    std::string session_id;
    std::vector<std::string> events;
    bool has_purchase = false;
};

// Maps a lowercase action name to its symbol; purchase actions map to
// kPurchaseMarker and are removed from the symbol stream.
inline constexpr int kPurchaseMarker = 0;
using SymbolRules = std::map<std::string, int>;

SymbolRules default_symbol_rules();

struct SymbolizedSession {
    SymbolSequence symbols;
    int label = 0;  // 1 iff the session contains a purchase anywhere
};

// Throws std::runtime_error naming the offending event when a name is not
// covered by the rules.
SymbolizedSession symbolize(const RawSession& raw, const SymbolRules& rules);

// First `window` symbols with the session label attached; nullopt when the
// session is shorter than the window (dropped, never padded).
std::optional<WindowedInstance> normalize_window(std::string id, const SymbolSequence& symbols,
                                                 int label, int window);

// Exactly `size` instances with floor(ratio*size) positives, drawn without
// replacement, seed-deterministic. Throws naming the deficient class.
Dataset resample_imbalance(const std::vector<WindowedInstance>& instances, double ratio,
                           std::size_t size, std::uint64_t seed);

struct SplitSizes {
    std::size_t train = 2000;
    std::size_t test = 1000;
    std::size_t pool = 7000;

    std::size_t total() const { return train + test + pool; }
};

// Stratified, seed-deterministic, disjoint split covering the dataset.
// Each part's positive fraction is within 1/|part| of the whole.
DatasetSplit partition(const Dataset& dataset, const SplitSizes& sizes, std::uint64_t seed);

// Markov-chain clickstream generator. A planted pattern observed inside the
// early window raises the purchase probability by `lift`.
struct SyntheticConfig {
    std::size_t size = 10000;  // windowed instances to emit
    int window = 5;
    std::size_t min_session_len = 5;
    std::size_t max_session_len = 15;
    std::array<double, kAlphabetSize> initial{0.55, 0.25, 0.15, 0.05};
    std::array<std::array<double, kAlphabetSize>, kAlphabetSize> transition{{
        {0.45, 0.35, 0.15, 0.05},
        {0.25, 0.30, 0.35, 0.10},
        {0.30, 0.30, 0.25, 0.15},
        {0.50, 0.25, 0.20, 0.05},
    }};
    double base_purchase_prob = 0.03;
    Pattern planted_pattern = Pattern::from({2, 3});
    double lift = 0.85;
    std::uint64_t seed = 7;
};

struct SyntheticBatch {
    std::vector<RawSession> sessions;  // full sessions, events as numeric text
    Dataset windows;                   // aligned windowed instances
};

SyntheticBatch generate_synthetic_batch(const SyntheticConfig& cfg);
Dataset generate_synthetic(const SyntheticConfig& cfg);

// ---- file formats ----

// One session per line:
//   {"session_id": "...", "events": [...], "purchase": bool}
RawSession parse_session_line(const std::string& line);
std::string session_to_json(const RawSession& s);

// One instance per line: id,label,s1,...,sW (no header).
void write_dataset_csv(std::ostream& out, const Dataset& dataset);
Dataset read_dataset_csv(std::istream& in);

// symbol,utility lines; '#' comments allowed.
UtilityTable read_utility_table_csv(std::istream& in);

}  // namespace clickmine
