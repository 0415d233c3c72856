#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace naibx {

/// Machine-readable error category. The CLI prints it as a fixed prefix.
enum class ErrorCode {
    input,        // bad argument to a library call
    config,       // invalid configuration / CLI usage
    parse,        // dataset parse failure
    io,           // file system failure
    model_version,
    model_truncated,
    model_invariant,
    mismatch,     // incompatible models (merge) or shapes
    budget,       // oracle refused to enumerate
    untrained,
};

inline std::string_view error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::input: return "E_INPUT";
        case ErrorCode::config: return "E_CONFIG";
        case ErrorCode::parse: return "E_PARSE";
        case ErrorCode::io: return "E_IO";
        case ErrorCode::model_version: return "E_MODEL_VERSION";
        case ErrorCode::model_truncated: return "E_MODEL_TRUNCATED";
        case ErrorCode::model_invariant: return "E_MODEL_INVARIANT";
        case ErrorCode::mismatch: return "E_MISMATCH";
        case ErrorCode::budget: return "E_BUDGET";
        case ErrorCode::untrained: return "E_UNTRAINED";
    }
    return "E_UNKNOWN";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// Dataset parse failure carrying the 1-based line it occurred on.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& message)
        : Error(ErrorCode::parse, "line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace naibx
