#pragma once

#include <stdexcept>
#include <string>

namespace collegium {

enum class ErrorKind {
    Validation,      // invariant or precondition violated
    Parse,           // malformed record / file / config
    Protocol,        // agent reply does not follow its output protocol
    MissingKey,      // required key absent in a protocol object
    MissingPlaceholder,
    DuplicateId,
    NotFound,
    DimensionMismatch,
    Transport,       // remote backend / embedding failure
    ScriptExhausted, // scripted backend ran out of responses
    Io,
    Config,
};

const char* error_kind_name(ErrorKind kind);

// Single exception type used across the library. `kind()` lets callers and
// tests discriminate failure classes without a class per error.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message),
          kind_(kind),
          message_(message) {}

    ErrorKind kind() const { return kind_; }
    const std::string& message() const { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

inline const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Protocol: return "protocol";
    case ErrorKind::MissingKey: return "missing-key";
    case ErrorKind::MissingPlaceholder: return "missing-placeholder";
    case ErrorKind::DuplicateId: return "duplicate-id";
    case ErrorKind::NotFound: return "not-found";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::Transport: return "transport";
    case ErrorKind::ScriptExhausted: return "script-exhausted";
    case ErrorKind::Io: return "io";
    case ErrorKind::Config: return "config";
    }
    return "error";
}

}  // namespace collegium
