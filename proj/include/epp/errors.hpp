#ifndef EPP_ERRORS_HPP
#define EPP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace epp {

// Exit-code protocol shared by the library and the CLI:
// 0 success, 1 check failure, 2 invalid input / parse, 3 zero-probability
// outcome, 4 capacity guard exceeded.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed files, invalid distributions, mismatched expert sets.
struct InvalidInputError : Error {
    using Error::Error;
};

// A predictive distribution assigned probability 0 to the realized outcome.
struct ZeroProbabilityError : Error {
    explicit ZeroProbabilityError(int round)
        : Error("zero-probability outcome at round " + std::to_string(round)),
          round(round) {}
    int round;
};

// An enumeration guard (partition count, expert-sequence count, path count)
// would be exceeded.
struct CapacityError : Error {
    using Error::Error;
};

// Numeric search failed to meet its constraint (signals a broken premise,
// e.g. a substitution request for a non-mixable configuration).
struct NumericError : Error {
    using Error::Error;
};

} // namespace epp

#endif
