#pragma once

#include <span>
#include <string>
#include <vector>

#include "sectorlab/date.hpp"
#include "sectorlab/error.hpp"

namespace sectorlab {

// Dense symmetric covariance of SETF log-returns over a lookback window.
struct CovarianceMatrix {
    std::size_t n = 0;
    std::vector<double> m; // row-major n*n
    int lookback_days = 0;
    Date end_date;

    double at(std::size_t i, std::size_t j) const { return m[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return m[i * n + j]; }
    double trace() const;
};

// Sample covariance (divisor R-1 over R return observations) of
// r_t = ln(p_t / p_{t-1}) per series. Series must be date-aligned, equal
// length and strictly positive. A ridge of 1e-10 * mean(diag) is added when
// the smallest eigenvalue dips below 1e-12 * trace.
CovarianceMatrix log_return_covariance(
    const std::vector<std::vector<double>>& price_histories, int lookback_days,
    Date end_date);

struct SolveReport {
    double objective = 0.0;
    int iterations = 0;
    double max_constraint_violation = 0.0;
    bool converged = false;
    std::string warning; // set for degenerate (all-zero) covariance inputs
};

struct PortfolioWeights {
    std::vector<double> omega;
    SolveReport report;
};

struct SolveTraceRow {
    int iteration = 0;
    double objective = 0.0;
    double constraint_violation = 0.0;
};

struct GmvOptions {
    int max_iterations = 5000;
    double tolerance = 1e-10; // on the projected-gradient norm
    std::vector<SolveTraceRow>* trace = nullptr;
};

// Long-only global-minimum-variance weights: minimize w' S w subject to
// sum(w) = 1, w >= 0. Accelerated projected gradient with backtracking,
// followed by an exact KKT polish on the identified support. Deterministic:
// fixed start (uniform), fixed iteration order, no data-dependent threading.
PortfolioWeights solve_gmv(const CovarianceMatrix& sigma, const GmvOptions& opts = {});

// Sum_i |w_new_i - w_old_i| * etf_price_i, priced at the new rebalance time.
double rebalancing_turnover(std::span<const double> omega_old,
                            std::span<const double> omega_new,
                            std::span<const double> etf_prices_at_new);

// Euclidean projection onto the probability simplex.
std::vector<double> project_to_simplex(std::span<const double> v);

// Smallest eigenvalue of a symmetric matrix (cyclic Jacobi sweeps).
double min_eigenvalue_symmetric(const std::vector<double>& mat, std::size_t n);

void save_solve_trace(const std::vector<SolveTraceRow>& trace, const std::string& path);

} // namespace sectorlab
