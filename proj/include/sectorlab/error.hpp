#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sectorlab {

// Base error for all recoverable failures in the library. Messages carry the
// offending file/column/ticker/date so CLI output is actionable.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// GMV solver failed to meet its convergence criterion within the iteration
// cap. Carries the best feasible iterate found so far.
class SolverError : public Error {
public:
    SolverError(const std::string& msg, std::vector<double> best_iterate)
        : Error(msg), best_feasible(std::move(best_iterate)) {}

    std::vector<double> best_feasible;
};

// A backtest ledger whose rolling Sharpe ratio is undefined on every day
// (e.g. a constant-value portfolio) cannot be scored on the Sharpe axis.
class DegenerateUniverseError : public Error {
public:
    using Error::Error;
};

} // namespace sectorlab
