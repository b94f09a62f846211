#pragma once

#include <stdexcept>
#include <string>

namespace takeup {

inline constexpr const char* kVersion = "0.1.0";

// Error taxonomy used across the toolkit. Each class maps to a distinct
// CLI exit code (see tools/).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct MissingInputError : std::runtime_error {
    explicit MissingInputError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace takeup
