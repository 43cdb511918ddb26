#pragma once

#include <stdexcept>

namespace ds {

// Raised when a cancellable computation hits its deadline. The CLI maps it
// to exit code 3.
class TimeoutError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ds
