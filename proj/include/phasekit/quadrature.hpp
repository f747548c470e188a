#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace phasekit {

struct QuadratureRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

namespace detail {

// Golub-Welsch: nodes are eigenvalues of the symmetric tridiagonal Jacobi
// matrix of the orthogonal-polynomial recurrence, weights come from the
// first component of the eigenvectors.
inline QuadratureRule golub_welsch(const Eigen::VectorXd& diag,
                                   const Eigen::VectorXd& offdiag,
                                   double weight_total) {
    const int n = static_cast<int>(diag.size());
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        jacobi(i, i) = diag[i];
        if (i + 1 < n) {
            jacobi(i, i + 1) = offdiag[i];
            jacobi(i + 1, i) = offdiag[i];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    QuadratureRule rule;
    rule.nodes = es.eigenvalues();
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double v0 = es.eigenvectors()(0, i);
        rule.weights[i] = weight_total * v0 * v0;
    }
    return rule;
}

} // namespace detail

// Gauss-Legendre on [a, b].
inline QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd off(n > 1 ? n - 1 : 0);
    for (int j = 1; j < n; ++j) {
        off[j - 1] = j / std::sqrt(4.0 * j * j - 1.0);
    }
    QuadratureRule rule = detail::golub_welsch(diag, off, 2.0);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

// Generalized Gauss-Laguerre: integrates f against x^alpha e^{-x} on [0, inf).
// Nodes by Newton iteration on the Laguerre recurrence; the weights come from
// the derivative at the node, which keeps the far-tail weights relatively
// accurate where an eigensolver route returns noise (their true magnitudes
// sit far below the eigenvector accuracy floor).
inline QuadratureRule gauss_laguerre(int n, double alpha = 0.0) {
    if (n < 1) throw std::invalid_argument("gauss_laguerre: need at least one node");
    if (alpha <= -1.0) throw std::invalid_argument("gauss_laguerre: alpha must exceed -1");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    double z = 0.0;
    for (int i = 0; i < n; ++i) {
        if (i == 0) {
            z = (1.0 + alpha) * (3.0 + 0.92 * alpha) / (1.0 + 2.4 * n + 1.8 * alpha);
        } else if (i == 1) {
            z += (15.0 + 6.25 * alpha) / (1.0 + 0.9 * alpha + 2.5 * n);
        } else {
            const double ai = i - 1;
            z += ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * alpha / (1.0 + 3.5 * ai)) *
                 (z - rule.nodes[i - 2]) / (1.0 + 0.3 * alpha);
        }
        double p1 = 0.0, p2 = 0.0, pp = 0.0;
        bool converged = false;
        for (int iter = 0; iter < 100; ++iter) {
            p1 = 1.0;
            p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0 + alpha - z) * p2 - (j + alpha) * p3) / (j + 1.0);
            }
            pp = (n * p1 - (n + alpha) * p2) / z;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-14 * std::max(1.0, std::abs(z))) {
                converged = true;
                break;
            }
        }
        if (!converged) throw std::runtime_error("gauss_laguerre: node iteration failed");
        rule.nodes[i] = z;
        rule.weights[i] =
            -std::exp(std::lgamma(alpha + n) - std::lgamma(static_cast<double>(n))) / (pp * n * p2);
    }
    return rule;
}

} // namespace phasekit
