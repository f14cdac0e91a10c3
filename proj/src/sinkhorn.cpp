#include "pcot/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pcot/errors.hpp"

namespace pcot {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& v) {
    double hi = kNegInf;
    for (double x : v) hi = std::max(hi, x);
    if (hi == kNegInf) return kNegInf;
    double s = 0;
    for (double x : v) s += std::exp(x - hi);
    return hi + std::log(s);
}

} // namespace

SinkhornResult sinkhorn(const std::vector<double>& a, const std::vector<double>& b,
                        const std::vector<std::vector<double>>& cost, double epsilon, int max_iter,
                        double tol) {
    const size_t m = a.size(), n = b.size();
    if (m == 0 || n == 0) throw LengthMismatchError("sinkhorn needs nonempty weight vectors");
    if (cost.size() != m) throw LengthMismatchError("cost matrix has wrong row count");
    for (const auto& row : cost)
        if (row.size() != n) throw LengthMismatchError("cost matrix has wrong column count");

    double sa = 0, sb = 0;
    for (double v : a) {
        if (v < -1e-12) throw InfeasibleError("negative row weight");
        sa += v;
    }
    for (double v : b) {
        if (v < -1e-12) throw InfeasibleError("negative column weight");
        sb += v;
    }
    if (std::abs(sa - 1.0) > 1e-6 || std::abs(sb - 1.0) > 1e-6)
        throw InfeasibleError("weights must sum to one");

    if (epsilon <= 0) {
        double mean = 0;
        for (const auto& row : cost)
            for (double v : row) mean += v;
        mean /= double(m) * double(n);
        epsilon = 0.1 * mean;
        if (!(epsilon > 0)) epsilon = 1.0;  // all-zero costs: any feasible plan is optimal
    }

    std::vector<double> log_a(m), log_b(n), f(m, 0.0), g(n, 0.0), tmp(std::max(m, n));
    for (size_t i = 0; i < m; ++i) log_a[i] = a[i] > 0 ? std::log(a[i] / sa) : kNegInf;
    for (size_t j = 0; j < n; ++j) log_b[j] = b[j] > 0 ? std::log(b[j] / sb) : kNegInf;

    auto row_violation = [&](const std::vector<double>& fv, const std::vector<double>& gv) {
        double err = 0;
        for (size_t i = 0; i < m; ++i) {
            double s = 0;
            for (size_t j = 0; j < n; ++j) s += std::exp((fv[i] + gv[j] - cost[i][j]) / epsilon);
            err += std::abs(s - std::exp(log_a[i]));
        }
        return err;
    };

    SinkhornResult res;
    std::vector<double> best_f = f, best_g = g;
    double best_err = std::numeric_limits<double>::infinity();

    int it = 0;
    for (; it < max_iter; ++it) {
        for (size_t i = 0; i < m; ++i) {
            if (log_a[i] == kNegInf) {
                f[i] = kNegInf;
                continue;
            }
            tmp.resize(n);
            for (size_t j = 0; j < n; ++j) tmp[j] = (g[j] - cost[i][j]) / epsilon;
            f[i] = epsilon * (log_a[i] - log_sum_exp(tmp));
        }
        for (size_t j = 0; j < n; ++j) {
            if (log_b[j] == kNegInf) {
                g[j] = kNegInf;
                continue;
            }
            tmp.resize(m);
            for (size_t i = 0; i < m; ++i) tmp[i] = (f[i] - cost[i][j]) / epsilon;
            g[j] = epsilon * (log_b[j] - log_sum_exp(tmp));
        }
        double err = row_violation(f, g);
        if (err < best_err) {
            best_err = err;
            best_f = f;
            best_g = g;
        }
        if (err <= tol) {
            res.converged = true;
            ++it;
            break;
        }
    }

    res.iterations = it;
    res.marginal_error = best_err;
    res.plan.assign(m, std::vector<double>(n, 0.0));
    double obj = 0;
    for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < n; ++j) {
            double p = std::exp((best_f[i] + best_g[j] - cost[i][j]) / epsilon);
            res.plan[i][j] = p;
            obj += p * cost[i][j];
        }
    res.objective = obj;
    return res;
}

} // namespace pcot
