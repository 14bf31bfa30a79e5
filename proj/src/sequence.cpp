#include "clickmine/sequence.hpp"

#include <stdexcept>

namespace clickmine {

std::string sequence_to_string(const SymbolSequence& seq) {
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i) out += '-';
        out += std::to_string(static_cast<int>(seq[i]));
    }
    return out;
}

bool is_valid_pattern(const std::vector<Symbol>& elements) {
    if (elements.empty()) return false;
    for (std::size_t i = 0; i < elements.size(); ++i) {
        if (!is_valid_symbol(elements[i])) return false;
        if (i > 0 && elements[i] == elements[i - 1]) return false;
    }
    return true;
}

Pattern Pattern::from(std::vector<Symbol> elements) {
    if (!is_valid_pattern(elements))
        throw std::invalid_argument("invalid pattern: " + sequence_to_string(elements) +
                                    " (must be non-empty, alphabet 1..4, no immediate repeats)");
    return Pattern(std::move(elements));
}

std::optional<Pattern> Pattern::try_from(std::vector<Symbol> elements) {
    if (!is_valid_pattern(elements)) return std::nullopt;
    return Pattern(std::move(elements));
}

Pattern Pattern::parse(const std::string& text) {
    std::vector<Symbol> elems;
    for (char c : text) {
        if (c == '-' || c == ',' || c == ' ') continue;
        if (c < '0' || c > '9')
            throw std::invalid_argument("cannot parse pattern: " + text);
        elems.push_back(static_cast<Symbol>(c - '0'));
    }
    return Pattern::from(std::move(elems));
}

std::vector<std::size_t> find_occurrences(const SymbolSequence& seq, const Pattern& p) {
    std::vector<std::size_t> starts;
    const auto& pat = p.elements();
    const std::size_t n = pat.size();
    if (n > seq.size()) return starts;
    for (std::size_t q = 0; q + n <= seq.size(); ++q) {
        bool match = true;
        for (std::size_t k = 0; k < n; ++k) {
            if (seq[q + k] != pat[k]) {
                match = false;
                break;
            }
        }
        if (match) starts.push_back(q);
    }
    return starts;
}

OccurrenceMode occurrence_mode_from_string(const std::string& s) {
    if (s == "all") return OccurrenceMode::All;
    if (s == "unique") return OccurrenceMode::Unique;
    throw std::invalid_argument("unknown occurrence_mode: " + s + " (expected all|unique)");
}

std::string to_string(OccurrenceMode mode) {
    return mode == OccurrenceMode::All ? "all" : "unique";
}

double UtilityTable::value(Symbol s) const {
    if (!is_valid_symbol(s))
        throw std::invalid_argument("utility lookup for symbol outside alphabet");
    return values_[s - 1];
}

void UtilityTable::set(Symbol s, double v) {
    if (!is_valid_symbol(s))
        throw std::invalid_argument("utility entry for symbol outside alphabet");
    values_[s - 1] = v;
}

std::size_t Dataset::count_positive() const {
    std::size_t n = 0;
    for (const auto& inst : instances) n += inst.label == 1;
    return n;
}

}  // namespace clickmine
