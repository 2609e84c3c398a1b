#pragma once

#include <stdexcept>
#include <string>

namespace vitalcast {

/// Bad data fed to an operation (shape mismatch, non-finite values, ...).
struct InputError : std::runtime_error {
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid configuration (non-positive window sizes, k larger than a subset, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File-level failure. Subclasses distinguish the load failure modes.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct BadMagicError : IoError {
    explicit BadMagicError(const std::string& msg) : IoError(msg) {}
};

struct VersionError : IoError {
    explicit VersionError(const std::string& msg) : IoError(msg) {}
};

struct TruncatedError : IoError {
    explicit TruncatedError(const std::string& msg) : IoError(msg) {}
};

struct ChecksumError : IoError {
    explicit ChecksumError(const std::string& msg) : IoError(msg) {}
};

/// Synthetic cohort generation could not reach its target within bounded retries.
struct GenerationError : std::runtime_error {
    explicit GenerationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace vitalcast
