#ifndef FEQ_ERRORS_HPP
#define FEQ_ERRORS_HPP

#include <stdexcept>

namespace feq {

// Bad or inconsistent run parameters; maps to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requested sector is larger than the exact engine can hold; exit code 3.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A proved inequality failed inside its hypothesis; exit code 4.
struct BoundViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace feq

#endif
