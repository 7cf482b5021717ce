#pragma once

#include <stdexcept>
#include <string>

namespace hsim {

// Invalid system description (bad labels, forbidden couplings, bad values).
class SpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent input data (CSV maps, grids, sample lists).
class DataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Singular solves, non-convergent iterations, unstable step sizes.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace hsim
