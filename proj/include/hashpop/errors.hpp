#pragma once

#include <stdexcept>
#include <string>

namespace hashpop {

// Input file / schema problems (CLI exit code 2).
struct schema_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A dataset or series with nothing usable in it.
struct empty_input_error : schema_error {
    using schema_error::schema_error;
};

// Numerical failure: non-convergence, overflow (CLI exit code 3).
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg, long terms_used = -1)
        : std::runtime_error(msg), terms_used(terms_used) {}
    long terms_used;
};

// Master-equation state space too small for the requested tolerance.
struct truncation_error : numeric_error {
    truncation_error(const std::string& msg, long long required_x_max)
        : numeric_error(msg), required_x_max(required_x_max) {}
    long long required_x_max;
};

// Operation applied to a variant it does not support.
struct unsupported_variant_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A requested moment does not exist (e.g. Pareto tail too heavy).
struct divergent_moment_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Series carries no signal to fit (all zero).
struct no_signal_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Normal equations lost rank during a fit.
struct rank_deficiency_error : numeric_error {
    explicit rank_deficiency_error(const std::string& msg) : numeric_error(msg) {}
};

}  // namespace hashpop
