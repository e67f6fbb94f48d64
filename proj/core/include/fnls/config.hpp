#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "fnls/solver.hpp"

namespace fnls {

struct ConfigError : std::runtime_error {
    int line;
    ConfigError(int line_, const std::string& what_)
        : std::runtime_error("config line " + std::to_string(line_) + ": " + what_),
          line(line_) {}
};

/// Model + solver settings parsed from the plain-text key-value format
/// (`key = value`, '#' comments). Unknown keys are errors.
struct ParsedConfig {
    ModelParams params;
    SolverConfig solver;
    bool dump_orbitals = false;
    std::map<std::string, std::string> given;  // keys present in the file
};

ParsedConfig parse_config_text(const std::string& text);
ParsedConfig load_config_file(const std::string& path);

/// Every field with defaults resolved, in the file format itself.
std::string effective_config_string(const ParsedConfig& cfg);

}  // namespace fnls
