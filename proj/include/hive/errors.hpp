#pragma once

#include <stdexcept>
#include <string>

namespace hive {

// Bad input data: unreadable or malformed files, invalid manifests, shape
// violations discovered at ingestion time. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure during training or feature extraction (NaN loss and the
// like). The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hive
