#pragma once

#include <stdexcept>
#include <string>

namespace wick {

// Domain errors map to CLI exit code 1; usage errors to 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SizeLimitError : Error {
    SizeLimitError(std::size_t requested, std::size_t cap)
        : Error("size limit exceeded: " + std::to_string(requested) +
                " requested, cap is " + std::to_string(cap)),
          requested(requested), cap(cap) {}
    std::size_t requested;
    std::size_t cap;
};

struct GridMismatchError : Error {
    using Error::Error;
};

// Thrown when a Wick product of random variables is requested for a model
// that is not declared free of polynomial relations between its variables.
struct WellDefinednessError : Error {
    using Error::Error;
};

struct ConvergenceError : Error {
    using Error::Error;
};

struct UsageError : Error {
    using Error::Error;
};

} // namespace wick
