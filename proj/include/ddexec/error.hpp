#pragma once

#include <stdexcept>
#include <string>

namespace ddexec {

// Error categories map one-to-one onto CLI exit codes (see tools/ddexec_cli.cpp).
// Precondition violations on library calls throw std::invalid_argument.

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace detail
}  // namespace ddexec
