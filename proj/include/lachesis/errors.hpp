#pragma once

#include <stdexcept>
#include <string>

namespace lachesis {

enum class ErrorCode {
    MissingParent,
    InvalidSeq,
    InvalidParents,
    DuplicateId,
    UnknownEvent,
    NoSelfEvent,
    ParseError,
    MissingPair,
    NegativeLatency,
    InvalidRange,
    ConfigError,
};

/// Error thrown by store, metric and simulator operations. Carries a
/// machine-checkable code so callers (CLI, tests) can branch on the cause.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

} // namespace lachesis
