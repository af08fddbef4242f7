#include "sectorlab/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "sectorlab/csv.hpp"

namespace sectorlab {

double CovarianceMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) t += at(i, i);
    return t;
}

CovarianceMatrix log_return_covariance(
    const std::vector<std::vector<double>>& price_histories, int lookback_days,
    Date end_date) {
    const std::size_t n = price_histories.size();
    if (n == 0) throw Error("covariance: no price series given");
    const std::size_t len = price_histories[0].size();
    for (std::size_t i = 0; i < n; ++i) {
        if (price_histories[i].size() != len) {
            throw Error("covariance: series " + std::to_string(i) + " has " +
                        std::to_string(price_histories[i].size()) +
                        " observations, expected " + std::to_string(len));
        }
        for (double p : price_histories[i]) {
            if (!(p > 0.0) || !std::isfinite(p)) {
                throw Error("covariance: non-positive price in series " + std::to_string(i));
            }
        }
    }
    if (len < 3) {
        throw Error("covariance: fewer than 2 aligned return observations (" +
                    std::to_string(len) + " prices)");
    }

    const std::size_t r_count = len - 1;
    std::vector<std::vector<double>> returns(n, std::vector<double>(r_count));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < r_count; ++t) {
            returns[i][t] = std::log(price_histories[i][t + 1] / price_histories[i][t]);
        }
    }

    std::vector<double> mean(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (double r : returns[i]) mean[i] += r;
        mean[i] /= static_cast<double>(r_count);
    }

    CovarianceMatrix cov;
    cov.n = n;
    cov.m.assign(n * n, 0.0);
    cov.lookback_days = lookback_days;
    cov.end_date = end_date;
    const double divisor = static_cast<double>(r_count - 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < r_count; ++t) {
                acc += (returns[i][t] - mean[i]) * (returns[j][t] - mean[j]);
            }
            const double v = acc / divisor;
            cov.at(i, j) = v;
            cov.at(j, i) = v;
        }
    }

    const double tr = cov.trace();
    if (tr > 0.0) {
        const double min_eig = min_eigenvalue_symmetric(cov.m, n);
        if (min_eig < 1e-12 * tr) {
            const double ridge = 1e-10 * (tr / static_cast<double>(n));
            for (std::size_t i = 0; i < n; ++i) cov.at(i, i) += ridge;
        }
    }
    return cov;
}

std::vector<double> project_to_simplex(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());

    double running = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        running += sorted[j];
        const double candidate = (running - 1.0) / static_cast<double>(j + 1);
        if (sorted[j] - candidate > 0.0) theta = candidate;
    }

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::max(v[i] - theta, 0.0);
    return out;
}

double min_eigenvalue_symmetric(const std::vector<double>& mat, std::size_t n) {
    if (n == 0) throw Error("eigenvalue of empty matrix");
    std::vector<double> a = mat;
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) off += at(i, j) * at(i, j);
        }
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale += std::abs(at(i, i));
        if (off <= 1e-30 * std::max(scale * scale, 1e-300)) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double app = at(p, p);
                const double aqq = at(q, q);
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : 1.0 / (tau - std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }

    double min_eig = at(0, 0);
    for (std::size_t i = 1; i < n; ++i) min_eig = std::min(min_eig, at(i, i));
    return min_eig;
}

namespace {

void matvec(const CovarianceMatrix& s, std::span<const double> x,
            std::vector<double>& out) {
    const std::size_t n = s.n;
    out.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += s.at(i, j) * x[j];
        out[i] = acc;
    }
}

double quad_form(const CovarianceMatrix& s, std::span<const double> x) {
    std::vector<double> sx;
    matvec(s, x, sx);
    double v = 0.0;
    for (std::size_t i = 0; i < s.n; ++i) v += x[i] * sx[i];
    return v;
}

// Solve the equality-constrained problem restricted to a support set:
// minimize w' S w with sum(w) = 1, via the KKT system. Returns false when
// the linear system is too ill-conditioned to trust.
bool solve_on_support(const CovarianceMatrix& s, const std::vector<std::size_t>& support,
                      std::vector<double>& out) {
    const std::size_t k = support.size();
    const std::size_t dim = k + 1; // weights + multiplier
    std::vector<double> a(dim * dim, 0.0);
    std::vector<double> b(dim, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            a[i * dim + j] = 2.0 * s.at(support[i], support[j]);
        }
        a[i * dim + k] = 1.0;
        a[k * dim + i] = 1.0;
    }
    b[k] = 1.0;

    // Gaussian elimination with partial pivoting.
    std::vector<std::size_t> perm(dim);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t col = 0; col < dim; ++col) {
        std::size_t pivot = col;
        double best = std::abs(a[perm[col] * dim + col]);
        for (std::size_t r = col + 1; r < dim; ++r) {
            const double v = std::abs(a[perm[r] * dim + col]);
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (best < 1e-14) return false;
        std::swap(perm[col], perm[pivot]);
        const double diag = a[perm[col] * dim + col];
        for (std::size_t r = col + 1; r < dim; ++r) {
            const double factor = a[perm[r] * dim + col] / diag;
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < dim; ++c) {
                a[perm[r] * dim + c] -= factor * a[perm[col] * dim + c];
            }
            b[perm[r]] -= factor * b[perm[col]];
        }
    }
    std::vector<double> x(dim, 0.0);
    for (std::size_t rc = dim; rc-- > 0;) {
        double acc = b[perm[rc]];
        for (std::size_t c = rc + 1; c < dim; ++c) acc -= a[perm[rc] * dim + c] * x[c];
        x[rc] = acc / a[perm[rc] * dim + rc];
    }

    out.assign(s.n, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        if (!std::isfinite(x[i])) return false;
        out[support[i]] = x[i];
    }
    return true;
}

double constraint_violation(std::span<const double> w) {
    double sum = 0.0, neg = 0.0;
    for (double v : w) {
        sum += v;
        neg = std::min(neg, v);
    }
    return std::max(std::abs(sum - 1.0), -neg);
}

} // namespace

PortfolioWeights solve_gmv(const CovarianceMatrix& sigma, const GmvOptions& opts) {
    const std::size_t n = sigma.n;
    if (n == 0) throw Error("solve_gmv: empty covariance matrix");
    for (double v : sigma.m) {
        if (!std::isfinite(v)) throw Error("solve_gmv: non-finite covariance entry");
    }

    PortfolioWeights result;
    result.omega.assign(n, 1.0 / static_cast<double>(n));

    // All-zero covariance: every feasible point is optimal.
    double max_abs = 0.0;
    for (double v : sigma.m) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) {
        result.report.objective = 0.0;
        result.report.converged = true;
        result.report.warning = "degenerate covariance (all zero); returning equal weights";
        result.report.max_constraint_violation = constraint_violation(result.omega);
        return result;
    }

    // Accelerated projected gradient (FISTA with restart) and backtracking
    // line search on the step size.
    std::vector<double> x = result.omega;
    std::vector<double> y = x;
    std::vector<double> grad(n), x_new(n), sx(n);
    double t_momentum = 1.0;
    double step = 1.0 / (2.0 * max_abs * static_cast<double>(n)); // safe initial guess
    double fx = quad_form(sigma, x);
    int iterations_used = opts.max_iterations;
    bool converged = false;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        matvec(sigma, y, sx);
        for (std::size_t i = 0; i < n; ++i) grad[i] = 2.0 * sx[i];
        const double fy = [&] {
            double v = 0.0;
            for (std::size_t i = 0; i < n; ++i) v += y[i] * sx[i];
            return v;
        }();

        // Backtracking: shrink the step until the quadratic upper bound holds.
        double trial_step = step * 2.0; // allow recovery after conservative steps
        std::vector<double> candidate;
        double f_candidate = 0.0;
        for (int bt = 0; bt < 60; ++bt) {
            std::vector<double> z(n);
            for (std::size_t i = 0; i < n; ++i) z[i] = y[i] - trial_step * grad[i];
            candidate = project_to_simplex(z);
            f_candidate = quad_form(sigma, candidate);
            double gap = 0.0, sq = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double diff = candidate[i] - y[i];
                gap += grad[i] * diff;
                sq += diff * diff;
            }
            if (f_candidate <= fy + gap + sq / (2.0 * trial_step) + 1e-18) break;
            trial_step *= 0.5;
        }
        step = trial_step;

        // Projected-gradient mapping norm at y as the convergence measure.
        double pg_norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double diff = (y[i] - candidate[i]) / step;
            pg_norm += diff * diff;
        }
        pg_norm = std::sqrt(pg_norm);

        // Monotone safeguard: fall back to the previous point when the
        // accelerated step increases the objective.
        if (f_candidate > fx) {
            y = x;
            t_momentum = 1.0;
        } else {
            const double t_next = (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum)) / 2.0;
            for (std::size_t i = 0; i < n; ++i) {
                y[i] = candidate[i] + ((t_momentum - 1.0) / t_next) * (candidate[i] - x[i]);
            }
            t_momentum = t_next;
            x = candidate;
            fx = f_candidate;
        }

        if (opts.trace) {
            opts.trace->push_back({iter, fx, constraint_violation(x)});
        }
        if (pg_norm <= opts.tolerance) {
            iterations_used = iter + 1;
            converged = true;
            break;
        }
    }

    // KKT polish: re-solve exactly on the support found by the iteration,
    // then verify stationarity. Keep the polished point only when feasible
    // and at least as good as the iterate.
    std::vector<double> best = x;
    double best_obj = quad_form(sigma, best);
    {
        double support_floor = 1e-9;
        for (int attempt = 0; attempt < 3; ++attempt, support_floor *= 1e2) {
            std::vector<std::size_t> support;
            for (std::size_t i = 0; i < n; ++i) {
                if (x[i] > support_floor) support.push_back(i);
            }
            if (support.empty()) break;
            std::vector<double> polished;
            if (!solve_on_support(sigma, support, polished)) continue;
            bool feasible = true;
            for (double v : polished) {
                if (v < -1e-10) feasible = false;
            }
            if (!feasible) continue;
            for (double& v : polished) v = std::max(v, 0.0);
            double total = std::accumulate(polished.begin(), polished.end(), 0.0);
            if (total <= 0.0) continue;
            for (double& v : polished) v /= total;
            const double obj = quad_form(sigma, polished);
            if (obj <= best_obj + 1e-16 * std::abs(best_obj)) {
                best = polished;
                best_obj = obj;
                break;
            }
        }
    }

    // KKT check: gradient equalized on the support, no descent direction off
    // the support (relative to the problem's scale).
    matvec(sigma, best, sx);
    double lambda = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (best[i] > 1e-12) lambda = std::min(lambda, 2.0 * sx[i]);
    }
    double kkt_gap = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = 2.0 * sx[i];
        if (best[i] > 1e-12) {
            kkt_gap = std::max(kkt_gap, std::abs(g - lambda));
        } else {
            kkt_gap = std::max(kkt_gap, std::max(lambda - g, 0.0));
        }
    }
    const double scale = std::max(max_abs, 1e-300);
    if (kkt_gap <= 1e-7 * scale) converged = true;

    result.omega = best;
    result.report.objective = best_obj;
    result.report.iterations = iterations_used;
    result.report.max_constraint_violation = constraint_violation(best);
    result.report.converged = converged;

    if (!converged) {
        throw SolverError("solve_gmv: no convergence after " +
                              std::to_string(opts.max_iterations) +
                              " iterations (KKT gap " + std::to_string(kkt_gap) + ")",
                          best);
    }
    return result;
}

double rebalancing_turnover(std::span<const double> omega_old,
                            std::span<const double> omega_new,
                            std::span<const double> etf_prices_at_new) {
    if (omega_old.size() != omega_new.size() ||
        omega_new.size() != etf_prices_at_new.size()) {
        throw Error("rebalancing_turnover: vector length mismatch (" +
                    std::to_string(omega_old.size()) + ", " +
                    std::to_string(omega_new.size()) + ", " +
                    std::to_string(etf_prices_at_new.size()) + ")");
    }
    double turnover = 0.0;
    for (std::size_t i = 0; i < omega_old.size(); ++i) {
        turnover += std::abs(omega_new[i] - omega_old[i]) * etf_prices_at_new[i];
    }
    return turnover;
}

void save_solve_trace(const std::vector<SolveTraceRow>& trace, const std::string& path) {
    csv::Writer w(path);
    w.row({"iteration", "objective", "constraint_violation"});
    for (const auto& row : trace) {
        w.row({std::to_string(row.iteration), csv::format_double(row.objective),
               csv::format_double(row.constraint_violation)});
    }
    w.close();
}

} // namespace sectorlab
