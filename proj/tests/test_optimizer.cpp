#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "sectorlab/csv.hpp"
#include "sectorlab/optimizer.hpp"

using namespace sectorlab;

namespace {

CovarianceMatrix make_cov(std::size_t n, const std::vector<double>& entries) {
    CovarianceMatrix cov;
    cov.n = n;
    cov.m = entries;
    return cov;
}

double quad(const CovarianceMatrix& s, const std::vector<double>& w) {
    double v = 0.0;
    for (std::size_t i = 0; i < s.n; ++i) {
        for (std::size_t j = 0; j < s.n; ++j) v += w[i] * s.at(i, j) * w[j];
    }
    return v;
}

// Independent reference solver: plain projected gradient with a fixed step
// from the Gershgorin bound, run from many feasible starts.
std::vector<double> oracle_pgd(const CovarianceMatrix& s, const std::vector<double>& start,
                               int max_iters) {
    const std::size_t n = s.n;
    double row_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) row += std::abs(s.at(i, j));
        row_max = std::max(row_max, row);
    }
    const double step = 1.0 / (2.0 * std::max(row_max, 1e-12));

    std::vector<double> x = start;
    std::vector<double> g(n);
    for (int it = 0; it < max_iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += s.at(i, j) * x[j];
            g[i] = 2.0 * acc;
        }
        std::vector<double> z(n);
        for (std::size_t i = 0; i < n; ++i) z[i] = x[i] - step * g[i];
        const std::vector<double> next = project_to_simplex(z);
        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) moved += std::abs(next[i] - x[i]);
        x = next;
        if (moved < 1e-15) break;
    }
    return x;
}

double oracle_best_objective(const CovarianceMatrix& s, std::mt19937& rng,
                             int starts, int max_iters) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> start(s.n, 1.0 / static_cast<double>(s.n));
    best = std::min(best, quad(s, oracle_pgd(s, start, max_iters)));
    for (int r = 1; r < starts; ++r) {
        double total = 0.0;
        for (auto& v : start) {
            v = -std::log(unif(rng)); // exponential spacings -> uniform simplex
            total += v;
        }
        for (auto& v : start) v /= total;
        best = std::min(best, quad(s, oracle_pgd(s, start, max_iters)));
    }
    return best;
}

// Exhaustive reference for small n: grid over the simplex, halving the
// spacing locally around the incumbent until it reaches 1e-3.
double oracle_grid(const CovarianceMatrix& s) {
    const std::size_t n = s.n;
    REQUIRE(n <= 4);
    std::vector<double> center(n, 1.0 / static_cast<double>(n));
    double radius = 1.0;
    double spacing = 0.05;
    double best = quad(s, center);
    std::vector<double> best_w = center;

    while (spacing >= 1e-3 / 2.0) {
        const int steps = static_cast<int>(std::ceil(radius / spacing));
        std::vector<int> idx(n, 0);
        // enumerate integer offsets around the center in each coordinate of
        // the first n-1 dims; last coordinate is the simplex remainder
        std::vector<double> w(n);
        std::function<void(std::size_t, double)> walk = [&](std::size_t d, double used) {
            if (d + 1 == n) {
                w[d] = 1.0 - used;
                if (w[d] < -1e-12) return;
                w[d] = std::max(w[d], 0.0);
                const double obj = quad(s, w);
                if (obj < best) {
                    best = obj;
                    best_w = w;
                }
                return;
            }
            for (int k = -steps; k <= steps; ++k) {
                const double v = center[d] + k * spacing;
                if (v < 0.0 || used + v > 1.0 + 1e-12) continue;
                w[d] = std::max(v, 0.0);
                walk(d + 1, used + w[d]);
            }
        };
        walk(0, 0.0);
        center = best_w;
        radius = 4.0 * spacing;
        spacing /= 2.0;
    }
    return best;
}

CovarianceMatrix random_psd(std::mt19937& rng, std::size_t n) {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> a(n * n);
    for (auto& v : a) v = unif(rng);
    CovarianceMatrix cov;
    cov.n = n;
    cov.m.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < n; ++k) acc += a[k * n + i] * a[k * n + j];
            cov.at(i, j) = acc / static_cast<double>(n);
        }
    }
    return cov;
}

} // namespace

TEST_CASE("identity covariance gives equal weights") {
    for (std::size_t n : {2u, 5u, 9u}) {
        std::vector<double> entries(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) entries[i * n + i] = 1.0;
        const auto w = solve_gmv(make_cov(n, entries));
        for (double v : w.omega) {
            CHECK(std::abs(v - 1.0 / static_cast<double>(n)) <= 1e-8);
        }
    }
}

TEST_CASE("two-asset diagonal case matches the analytic weights") {
    const double s1 = 0.04, s2 = 0.09;
    const auto w = solve_gmv(make_cov(2, {s1, 0.0, 0.0, s2}));
    CHECK(std::abs(w.omega[0] - s2 / (s1 + s2)) <= 1e-8);
    CHECK(std::abs(w.omega[1] - s1 / (s1 + s2)) <= 1e-8);
}

TEST_CASE("diagonal covariance weights are inverse-variance") {
    const std::vector<double> variances = {0.02, 0.05, 0.11, 0.04, 0.31};
    const std::size_t n = variances.size();
    std::vector<double> entries(n * n, 0.0);
    double inv_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        entries[i * n + i] = variances[i];
        inv_sum += 1.0 / variances[i];
    }
    const auto w = solve_gmv(make_cov(n, entries));
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(w.omega[i] - (1.0 / variances[i]) / inv_sum) <= 1e-8);
    }
}

TEST_CASE("random PSD instances never lose to the multi-start oracle") {
    std::mt19937 rng(31415);
    for (int instance = 0; instance < 40; ++instance) {
        const CovarianceMatrix cov = random_psd(rng, 6);
        const auto w = solve_gmv(cov);

        double sum = 0.0;
        for (double v : w.omega) {
            CHECK(v >= -1e-10);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-8);

        const double oracle = oracle_best_objective(cov, rng, 20, 50000);
        CHECK(w.report.objective <= oracle + 1e-8);
    }
}

TEST_CASE("small instances against the refined grid oracle") {
    std::mt19937 rng(777);
    for (std::size_t n : {2u, 3u, 4u}) {
        for (int instance = 0; instance < 5; ++instance) {
            const CovarianceMatrix cov = random_psd(rng, n);
            const auto w = solve_gmv(cov);
            const double grid = oracle_grid(cov);
            CHECK(w.report.objective <= grid + 1e-8);
        }
    }
}

TEST_CASE("argmin is scale invariant") {
    std::mt19937 rng(4242);
    const CovarianceMatrix cov = random_psd(rng, 6);
    const auto base = solve_gmv(cov);
    for (double c : {1e-6, 1e-3, 1e3, 1e6}) {
        CovarianceMatrix scaled = cov;
        for (auto& v : scaled.m) v *= c;
        const auto w = solve_gmv(scaled);
        for (std::size_t i = 0; i < cov.n; ++i) {
            CHECK(std::abs(w.omega[i] - base.omega[i]) <= 1e-6);
        }
    }
}

TEST_CASE("duplicating an asset never raises the optimal variance") {
    std::mt19937 rng(99);
    for (int instance = 0; instance < 10; ++instance) {
        const CovarianceMatrix cov = random_psd(rng, 5);
        const double base = solve_gmv(cov).report.objective;

        // asset 5 clones asset 0
        CovarianceMatrix bigger;
        bigger.n = 6;
        bigger.m.assign(36, 0.0);
        for (std::size_t i = 0; i < 6; ++i) {
            for (std::size_t j = 0; j < 6; ++j) {
                bigger.at(i, j) = cov.at(i == 5 ? 0 : i, j == 5 ? 0 : j);
            }
        }
        const double extended = solve_gmv(bigger).report.objective;
        CHECK(extended <= base + 1e-10);
    }
}

TEST_CASE("a zero-variance asset absorbs the whole portfolio") {
    const auto w = solve_gmv(make_cov(2, {0.0, 0.0, 0.0, 0.04}));
    CHECK(std::abs(w.omega[0] - 1.0) <= 1e-8);
    CHECK(std::abs(w.omega[1]) <= 1e-8);
    CHECK(w.report.objective <= 1e-12);
}

TEST_CASE("rank-deficient covariances still solve feasibly") {
    std::mt19937 rng(606);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int instance = 0; instance < 10; ++instance) {
        // rank 2 matrix of size 7: A has two rows
        CovarianceMatrix cov;
        cov.n = 7;
        cov.m.assign(49, 0.0);
        std::vector<double> a(14);
        for (auto& v : a) v = unif(rng);
        for (std::size_t i = 0; i < 7; ++i) {
            for (std::size_t j = 0; j < 7; ++j) {
                cov.at(i, j) = a[i] * a[j] + a[7 + i] * a[7 + j];
            }
        }
        const auto w = solve_gmv(cov);
        double sum = 0.0;
        for (double v : w.omega) {
            CHECK(v >= -1e-10);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-8);
        const double oracle = oracle_best_objective(cov, rng, 10, 50000);
        CHECK(w.report.objective <= oracle + 1e-8);
    }
}

TEST_CASE("jacobi minimum eigenvalue on analytic cases") {
    CHECK(std::abs(min_eigenvalue_symmetric({2.0, 1.0, 1.0, 2.0}, 2) - 1.0) <= 1e-12);
    CHECK(std::abs(min_eigenvalue_symmetric({1.0, 0.0, 0.0, 1.0}, 2) - 1.0) <= 1e-12);
    // singular: eigenvalues {0, 2}
    CHECK(std::abs(min_eigenvalue_symmetric({1.0, 1.0, 1.0, 1.0}, 2)) <= 1e-12);
}

TEST_CASE("degenerate all-zero covariance returns equal weights with a warning") {
    const auto w = solve_gmv(make_cov(3, std::vector<double>(9, 0.0)));
    for (double v : w.omega) CHECK(v == doctest::Approx(1.0 / 3.0));
    CHECK(!w.report.warning.empty());
}

TEST_CASE("solver rejects non-finite input") {
    auto cov = make_cov(2, {1.0, 0.0, 0.0, std::nan("")});
    CHECK_THROWS_AS(solve_gmv(cov), Error);
}

TEST_CASE("simplex projection basics") {
    std::mt19937 rng(55);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    for (int instance = 0; instance < 50; ++instance) {
        std::vector<double> v(7);
        for (auto& x : v) x = unif(rng);
        const auto p = project_to_simplex(v);
        double sum = 0.0;
        for (double x : p) {
            CHECK(x >= 0.0);
            sum += x;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        // projecting a simplex point is the identity
        const auto q = project_to_simplex(p);
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(std::abs(q[i] - p[i]) <= 1e-12);
        }
    }
}

TEST_CASE("log-return covariance of a constant series is (near) zero") {
    std::vector<std::vector<double>> prices = {
        {100.0, 100.0, 100.0, 100.0, 100.0},
        {50.0, 51.0, 49.5, 50.5, 50.2},
    };
    const auto cov = log_return_covariance(prices, 5, Date::from_ymd(2015, 1, 9));
    const double scale = cov.trace();
    CHECK(std::abs(cov.at(0, 1)) <= 1e-9 * scale);
    CHECK(std::abs(cov.at(0, 0)) <= 1e-9 * scale); // ridge only
}

TEST_CASE("two identical series produce a rank-1 covariance with equal entries") {
    std::vector<std::vector<double>> prices = {
        {100.0, 103.0, 99.0, 105.0, 101.0},
        {100.0, 103.0, 99.0, 105.0, 101.0},
    };
    const auto cov = log_return_covariance(prices, 5, Date::from_ymd(2015, 1, 9));
    // the ridge perturbs the diagonal by ~1e-10 relative
    CHECK(std::abs(cov.at(0, 0) - cov.at(0, 1)) <= 1e-9 * cov.at(0, 0));
    CHECK(std::abs(cov.at(0, 1) - cov.at(1, 1)) <= 1e-9 * cov.at(1, 1));
    CHECK(cov.at(0, 1) == cov.at(1, 0));
}

TEST_CASE("covariance matches an independent two-pass computation") {
    std::mt19937 rng(808);
    std::normal_distribution<double> normal(0.0, 0.01);
    std::vector<std::vector<double>> prices(3, std::vector<double>(60));
    for (auto& series : prices) {
        double level = 100.0;
        for (auto& p : series) {
            level *= std::exp(0.0002 + normal(rng));
            p = level;
        }
    }
    const auto cov = log_return_covariance(prices, 60, Date::from_ymd(2016, 6, 1));

    // independent straight-line recomputation
    const std::size_t r = 59;
    std::vector<std::vector<double>> rets(3, std::vector<double>(r));
    std::vector<double> mean(3, 0.0);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t t = 0; t < r; ++t) {
            rets[i][t] = std::log(prices[i][t + 1]) - std::log(prices[i][t]);
            mean[i] += rets[i][t];
        }
        mean[i] /= static_cast<double>(r);
    }
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (std::size_t t = 0; t < r; ++t) {
                acc += (rets[i][t] - mean[i]) * (rets[j][t] - mean[j]);
            }
            acc /= static_cast<double>(r - 1);
            CHECK(std::abs(cov.at(i, j) - acc) <= 1e-12 + 1e-9 * std::abs(acc));
        }
    }

    // PSD within tolerance after regularization
    CHECK(min_eigenvalue_symmetric(cov.m, cov.n) >= -1e-9 * cov.trace());
    CHECK(cov.lookback_days == 60);
}

TEST_CASE("covariance input validation") {
    CHECK_THROWS_AS(log_return_covariance({{100.0, 101.0}}, 2, Date::from_ymd(2015, 1, 2)),
                    Error);
    CHECK_THROWS_AS(
        log_return_covariance({{100.0, -1.0, 101.0}}, 3, Date::from_ymd(2015, 1, 3)),
        Error);
    CHECK_THROWS_AS(
        log_return_covariance({{100.0, 101.0, 102.0}, {100.0, 101.0}}, 3,
                              Date::from_ymd(2015, 1, 3)),
        Error);
}

TEST_CASE("rebalancing turnover") {
    const std::vector<double> a = {1.0, 0.0};
    const std::vector<double> b = {0.0, 1.0};
    const std::vector<double> pi = {5.0, 5.0};
    CHECK(rebalancing_turnover(a, b, pi) == doctest::Approx(10.0));
    CHECK(rebalancing_turnover(a, a, pi) == 0.0);

    std::mt19937 rng(12);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> w0(8), w1(8), px(8);
    for (std::size_t i = 0; i < 8; ++i) {
        w0[i] = unif(rng);
        w1[i] = unif(rng);
        px[i] = 10.0 + 90.0 * unif(rng);
    }
    double expected = 0.0;
    for (std::size_t i = 0; i < 8; ++i) expected += std::abs(w1[i] - w0[i]) * px[i];
    CHECK(std::abs(rebalancing_turnover(w0, w1, px) - expected) <= 1e-12);

    const std::vector<double> short_prices = {1.0};
    CHECK_THROWS_AS(rebalancing_turnover(a, b, short_prices), Error);
}

TEST_CASE("solve trace records iterations when requested") {
    std::mt19937 rng(66);
    const CovarianceMatrix cov = random_psd(rng, 4);
    std::vector<SolveTraceRow> trace;
    GmvOptions opts;
    opts.trace = &trace;
    solve_gmv(cov, opts);
    CHECK(!trace.empty());
    const std::string path = "/tmp/sectorlab_test_trace.csv";
    save_solve_trace(trace, path);
    CHECK(!csv::read_file(path).rows.empty());
}
