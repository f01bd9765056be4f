#pragma once

#include <stdexcept>
#include <string>

namespace ydk {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& m) : std::runtime_error("ConfigError: " + m) {}
};

struct ExpansionError : std::runtime_error {
    explicit ExpansionError(const std::string& m) : std::runtime_error("ExpansionError: " + m) {}
};

struct NilpotencyError : std::runtime_error {
    explicit NilpotencyError(const std::string& m) : std::runtime_error("NilpotencyError: " + m) {}
};

struct IndexError : std::out_of_range {
    explicit IndexError(const std::string& m) : std::out_of_range("IndexError: " + m) {}
};

struct StructureError : std::runtime_error {
    explicit StructureError(const std::string& m) : std::runtime_error("StructureError: " + m) {}
};

struct AlgebraError : std::runtime_error {
    explicit AlgebraError(const std::string& m) : std::runtime_error("AlgebraError: " + m) {}
};

struct TruncationError : std::runtime_error {
    explicit TruncationError(const std::string& m) : std::runtime_error("TruncationError: " + m) {}
};

struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& m) : std::runtime_error("PreconditionError: " + m) {}
};

struct GenerationError : std::runtime_error {
    explicit GenerationError(const std::string& m) : std::runtime_error("GenerationError: " + m) {}
};

// A failure of an internally asserted structural fact (e.g. a coproduct that
// should collapse into the smaller algebra but does not). Always a bug, never
// a user error.
struct InternalInvariantError : std::logic_error {
    explicit InternalInvariantError(const std::string& m)
        : std::logic_error("InternalInvariantError: " + m) {}
};

} // namespace ydk
