#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "clickmine/active_learning.hpp"
#include "clickmine/ingest.hpp"

namespace clickmine {

// Flat key = value configuration covering every knob of the pipeline.
// Every key has a documented default; unknown keys are rejected; flags
// override file values. The resolved form (all keys, sorted) is embedded
// in reports so any run is self-reproducing.
class RunConfig {
public:
    RunConfig();  // defaults only

    // '#' and ';' start comments; [section] headers are cosmetic.
    static RunConfig from_file(const std::string& path);
    void load_stream(std::istream& in, const std::string& origin);

    void set(const std::string& key, const std::string& value);  // throws on unknown key
    void apply_overrides(const std::vector<std::string>& assignments);  // "key=value" forms

    std::string get(const std::string& key) const;
    int get_int(const std::string& key) const;
    std::size_t get_size(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;

    // Cross-field checks; throws with the offending keys named.
    void validate() const;

    // Sorted "key = value" lines for all keys.
    std::string resolved() const;
    // FNV-1a over the resolved text, 16 hex digits.
    std::string hash() const;

    // Documented defaults, one "key = value  # doc" line per key.
    static std::string documentation();

    // module config builders
    SyntheticConfig synthetic_config() const;
    SplitSizes split_sizes() const;
    ArchitectureConfig architecture_config() const;
    TrainConfig train_config() const;
    MiningConfig mining_config() const;
    AttributionConfig attribution_config() const;
    ExperimentConfig experiment_config() const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace clickmine
