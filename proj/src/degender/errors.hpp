#pragma once

#include <stdexcept>
#include <string>

namespace degender {

// Caller asked for something invalid (bad flag value, violated precondition).
// Maps to exit code 1 / DG_ERR_USAGE.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// An input file or record is malformed or inconsistent.
// Maps to exit code 2 / DG_ERR_DATA.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace degender
