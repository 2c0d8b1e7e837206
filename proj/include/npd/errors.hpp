#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace npd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input violated an operation's precondition (non-finite values,
/// charge imbalance, negative concentrations, shape mismatch, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent run configuration. Carries every issue found,
/// each prefixed with the offending key path.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    std::vector<std::string> issues_;
};

/// Malformed snapshot or diagnostics file.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace npd
