#ifndef HV_ERRORS_HPP
#define HV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hv {

// Reference point fails to strictly dominate a loss, or a threshold
// formula is evaluated outside its valid range.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Dimension mismatch between vectors/matrices that must agree.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed binary file (bad magic, truncation).
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two files that must describe the same records disagree on counts.
struct MismatchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unparseable or invalid experiment configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative refinement failed to reach its tolerance.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hv

#endif  // HV_ERRORS_HPP
