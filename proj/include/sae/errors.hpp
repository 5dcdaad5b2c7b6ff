#pragma once

#include <stdexcept>
#include <string>

namespace sae {

/// Malformed or inconsistent input data (files, shapes coming from disk).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iteration caps exceeded, non-finite losses and similar numerical breakdowns.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sae
