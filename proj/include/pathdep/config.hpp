#pragma once

#include "pathdep/experiments.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pathdep {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Declarative experiment description: sections of key = value pairs, '#'
// comments. Parsing validates ranges, registry names and sweep balance.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical text form; parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

// FNV-1a hash of the canonical form: changes iff the content changes.
std::uint64_t config_hash(const ExperimentConfig& config);

}  // namespace pathdep
