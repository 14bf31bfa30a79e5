#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace clickmine {

// Clickstream action code: 1 = page view, 2 = product detail,
// 3 = add to cart, 4 = remove from cart. A purchase is never a symbol;
// it is the session label.
using Symbol = std::uint8_t;

inline constexpr int kAlphabetSize = 4;
inline constexpr Symbol kMinSymbol = 1;
inline constexpr Symbol kMaxSymbol = 4;

constexpr bool is_valid_symbol(int code) {
    return code >= kMinSymbol && code <= kMaxSymbol;
}

// Ordered run of action symbols, exactly as observed.
using SymbolSequence = std::vector<Symbol>;

// "2-3-1" (dash-joined, the layout used in reports).
std::string sequence_to_string(const SymbolSequence& seq);

bool is_valid_pattern(const std::vector<Symbol>& elements);

// Contiguous sub-sequence of actions with no immediate repetition
// (adjacent elements differ). Matching is contiguous, never gapped.
class Pattern {
public:
    // Throws std::invalid_argument when elements are empty, out of the
    // alphabet, or contain an immediate repeat.
    static Pattern from(std::vector<Symbol> elements);
    static std::optional<Pattern> try_from(std::vector<Symbol> elements);
    // Accepts "2-3", "2,3" or "23".
    static Pattern parse(const std::string& text);

    const std::vector<Symbol>& elements() const { return elements_; }
    std::size_t length() const { return elements_.size(); }
    std::string to_string() const { return sequence_to_string(elements_); }

    friend bool operator==(const Pattern&, const Pattern&) = default;
    friend std::strong_ordering operator<=>(const Pattern&, const Pattern&) = default;

private:
    explicit Pattern(std::vector<Symbol> e) : elements_(std::move(e)) {}
    std::vector<Symbol> elements_;
};

// Every start index (0-based) where `p` occurs contiguously in `seq`,
// ascending; overlapping occurrences are all reported. Positions are
// printed 1-based in reports.
std::vector<std::size_t> find_occurrences(const SymbolSequence& seq, const Pattern& p);

// How repeated occurrences inside one sequence are counted when
// aggregating utility: all of them, or the single best one.
enum class OccurrenceMode { All, Unique };

OccurrenceMode occurrence_mode_from_string(const std::string& s);
std::string to_string(OccurrenceMode mode);

// A session cut to a fixed early-prediction window with its eventual label.
struct WindowedInstance {
    std::string id;
    SymbolSequence symbols;  // exactly the window length
    int label = 0;           // 1 = purchase, 0 = no purchase
};

// Per-symbol external utility (the static dollar table).
class UtilityTable {
public:
    UtilityTable() { values_.fill(0.0); }
    explicit UtilityTable(std::array<double, kAlphabetSize> values) : values_(values) {}

    double value(Symbol s) const;
    void set(Symbol s, double v);

private:
    std::array<double, kAlphabetSize> values_;  // indexed by symbol - 1
};

struct Dataset {
    std::vector<WindowedInstance> instances;

    std::size_t size() const { return instances.size(); }
    std::size_t count_positive() const;
};

// Disjoint index sets over a Dataset. Pool labels are concealed from query
// strategies; only the simulated oracle reads them on selection.
struct DatasetSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
    std::vector<std::size_t> pool;
};

}  // namespace clickmine
