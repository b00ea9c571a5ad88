#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evcharge {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// One normalised power setpoint per EVSE port, each in [-1, 1].
using ActionVector = Eigen::VectorXd;

/// Flat observation handed to learning agents.
using StateVector = Eigen::VectorXd;

/// Raised when a run configuration or input file is unusable. The CLI maps it
/// to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input data (profile files, policy artifacts).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Failure while a simulation or training run is in progress.
class RuntimeFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace evcharge
