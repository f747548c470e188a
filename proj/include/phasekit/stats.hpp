#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace phasekit {

// Total variation between two grid densities on the same periodic grid:
// half the L1 distance under the quadrature measure.
inline double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q, double step) {
    if (p.size() != q.size())
        throw std::invalid_argument("total_variation: grids do not match");
    return 0.5 * step * (p - q).cwiseAbs().sum();
}

namespace detail {

// Regularized lower incomplete gamma P(a, x) by series (x < a+1) or
// continued fraction (otherwise).
inline double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Lentz continued fraction for Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    const double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

} // namespace detail

// Survival function of the chi-square distribution with k dof.
inline double chi_square_pvalue(double statistic, int dof) {
    if (dof < 1) throw std::invalid_argument("chi_square_pvalue: dof must be positive");
    if (statistic <= 0.0) return 1.0;
    return 1.0 - detail::gamma_p(0.5 * dof, 0.5 * statistic);
}

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

// Pearson chi-square of observed counts against expected counts.  Bins with
// expectation below min_expected are pooled into their left neighbor, the
// standard remedy for sparse cells.
inline ChiSquareResult chi_square_test(const std::vector<double>& observed,
                                       const std::vector<double>& expected,
                                       double min_expected = 5.0) {
    if (observed.size() != expected.size() || observed.empty())
        throw std::invalid_argument("chi_square_test: size mismatch");
    std::vector<double> obs_pooled, exp_pooled;
    double obs_acc = 0.0, exp_acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        obs_acc += observed[i];
        exp_acc += expected[i];
        if (exp_acc >= min_expected) {
            obs_pooled.push_back(obs_acc);
            exp_pooled.push_back(exp_acc);
            obs_acc = exp_acc = 0.0;
        }
    }
    if (exp_acc > 0.0) {
        if (exp_pooled.empty()) {
            obs_pooled.push_back(obs_acc);
            exp_pooled.push_back(exp_acc);
        } else {
            obs_pooled.back() += obs_acc;
            exp_pooled.back() += exp_acc;
        }
    }
    ChiSquareResult res;
    res.dof = static_cast<int>(obs_pooled.size()) - 1;
    if (res.dof < 1) {
        res.dof = 1;
        res.p_value = 1.0;
        return res;
    }
    for (std::size_t i = 0; i < obs_pooled.size(); ++i) {
        const double d = obs_pooled[i] - exp_pooled[i];
        res.statistic += d * d / exp_pooled[i];
    }
    res.p_value = chi_square_pvalue(res.statistic, res.dof);
    return res;
}

} // namespace phasekit
