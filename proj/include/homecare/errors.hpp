#pragma once

#include <stdexcept>
#include <string>

namespace homecare {

enum class ErrorCategory {
    config,
    io,
    parse,
    validation,
    training,
    internal,
};

const char* to_string(ErrorCategory category);

/// Base of all errors thrown by this library. The category maps to a CLI
/// exit code and the prefix of the printed error line.
class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error(ErrorCategory::config, message) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error(ErrorCategory::io, message) {}
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& message) : Error(ErrorCategory::parse, message) {}
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message) : Error(ErrorCategory::validation, message) {}
};

class TrainingError : public Error {
public:
    explicit TrainingError(const std::string& message) : Error(ErrorCategory::training, message) {}
};

inline const char* to_string(ErrorCategory category) {
    switch (category) {
        case ErrorCategory::config: return "config";
        case ErrorCategory::io: return "io";
        case ErrorCategory::parse: return "parse";
        case ErrorCategory::validation: return "validation";
        case ErrorCategory::training: return "training";
        case ErrorCategory::internal: return "internal";
    }
    return "internal";
}

}  // namespace homecare
