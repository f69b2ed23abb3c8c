#pragma once

#include <stdexcept>
#include <string>

namespace wavecast {

enum class ErrorKind {
    Usage,      // bad argument or configuration value
    Format,     // malformed input file
    Data,       // well-formed input violating a data invariant
    Alignment,  // series cannot be joined
    Io,         // file could not be read or written
    State,      // operation called out of order
    Numeric,    // singular system, divergence, non-finite values
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) {
        throw Error(kind, what);
    }
}

}  // namespace wavecast
