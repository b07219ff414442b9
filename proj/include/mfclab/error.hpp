#pragma once

#include <stdexcept>
#include <string>

namespace mfclab {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Fixed-point sweep ran out of iterations; carries the last residuals seen.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& msg, double hjb_res, double fp_res, int iters)
        : Error(msg), hjb_residual(hjb_res), fp_residual(fp_res), iterations(iters) {}
    double hjb_residual;
    double fp_residual;
    int iterations;
};

// A discrete scheme produced values outside its admissible set (negative
// density, non-finite field, failed stabilization).
struct SchemeError : Error {
    using Error::Error;
};

struct ModelError : Error {
    using Error::Error;
};

struct ContractError : Error {
    using Error::Error;
};

// Near-singular linearized operator; carries the condition estimate.
struct InstabilityError : Error {
    InstabilityError(const std::string& msg, double cond)
        : Error(msg), condition_estimate(cond) {}
    double condition_estimate;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg, int line = -1)
        : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_number(line) {}
    int line_number;
};

}  // namespace mfclab
