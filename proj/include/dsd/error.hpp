#pragma once

#include <stdexcept>
#include <string>

namespace dsd {

/// Broad failure categories; the CLI maps each one to its own exit code.
enum class ErrorKind {
    invalid_input,  // bad arguments, malformed data, violated preconditions
    numerical,      // solver breakdown, non-convergence, singular systems
    io,             // unreadable or unwritable files
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline Error invalid_input(const std::string& what) { return Error(ErrorKind::invalid_input, what); }
inline Error numerical_error(const std::string& what) { return Error(ErrorKind::numerical, what); }
inline Error io_error(const std::string& what) { return Error(ErrorKind::io, what); }

}  // namespace dsd
