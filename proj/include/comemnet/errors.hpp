#pragma once

#include <stdexcept>
#include <string>

namespace comemnet {

// Bad user input or inconsistent configuration. The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Non-finite values surfaced during training; aborts the current epoch/period.
struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace comemnet
