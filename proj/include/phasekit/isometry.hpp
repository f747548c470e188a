#pragma once

#include "fock.hpp"
#include "phase.hpp"
#include "quadrature.hpp"
#include "radial.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace phasekit {

// The embedding of the single-mode space into two modes,
//   Vt = (1/sqrt(2pi)) integral d^2alpha f(|alpha|) |D(alpha)>><e^{i arg alpha}|.
// The angular integral collapses analytically: displacement matrix elements
// at z = t e^{i phi} factor as e^{i phi (n-m)} <n|D(t)|m>, and the phase-ket
// bra contributes e^{-i phi k}, so only rows with n - m = k survive:
//   Vt[(n,m), k] = sqrt(2pi) delta_{n-m,k} integral_0^inf t f(t) <n|D(t)|m> dt.
// Columns therefore have disjoint row support and are exactly orthogonal;
// only their norms carry truncation error.
struct IsometryMatrix {
    int k_cols = 0;        // input dimension K
    int dim_a = 0, dim_b = 0;
    Mat entries;           // (dim_a * dim_b) x K
    Eigen::VectorXd column_defects;     // 1 - |column|^2 of the stored matrix
    Eigen::VectorXd truncation_defects; // 1 - |column|^2 before renormalization
    bool renormalized = false;
    RadialProfile profile;

    // Columns whose truncation defect stays within tol.
    std::vector<int> certified_columns(double tol) const {
        std::vector<int> cols;
        for (int k = 0; k < k_cols; ++k)
            if (truncation_defects[k] <= tol) cols.push_back(k);
        return cols;
    }

    double max_offdiag_gram() const {
        Mat gram = entries.adjoint() * entries;
        gram.diagonal().setZero();
        return gram.cwiseAbs().maxCoeff();
    }

    double isometry_defect() const {
        Mat gram = entries.adjoint() * entries;
        gram.diagonal().array() -= 1.0;
        return gram.cwiseAbs().maxCoeff();
    }
};

struct IsometryOptions {
    int radial_nodes = 512;
    double t_max = 0.0; // 0 -> max(8, 3 sqrt(dim_a)), capped by the profile support
};

inline IsometryMatrix build_isometry(const RadialProfile& profile, int k_cols, int dim_a,
                                     int dim_b, bool renormalize = true,
                                     IsometryOptions opts = {}) {
    if (dim_a < 1 || dim_b < 1) throw std::invalid_argument("build_isometry: invalid dimensions");
    if (dim_a != dim_b)
        throw std::invalid_argument("build_isometry: the two output modes must match");
    if (k_cols < 1 || k_cols > dim_a)
        throw std::invalid_argument("build_isometry: need 1 <= K <= dim_a");
    if (profile.admissibility_defect > 1e-6)
        throw std::invalid_argument("build_isometry: inadmissible radial profile");

    double t_hi = opts.t_max > 0.0 ? opts.t_max
                                   : std::max(8.0, 3.0 * std::sqrt(static_cast<double>(dim_a)));
    t_hi = std::min(t_hi, profile.support_max(t_hi));
    const QuadratureRule rule = gauss_legendre(opts.radial_nodes, 0.0, t_hi);

    IsometryMatrix vt;
    vt.k_cols = k_cols;
    vt.dim_a = dim_a;
    vt.dim_b = dim_b;
    vt.profile = profile;
    vt.entries = Mat::Zero(dim_a * dim_b, k_cols);

    // One displacement matrix per radial node, shared by all columns.
    for (int q = 0; q < opts.radial_nodes; ++q) {
        const double t = rule.nodes[q];
        const double w = rule.weights[q] * t * profile(t) * std::sqrt(2.0 * pi);
        if (w == 0.0) continue;
        const Mat d = displacement(cplx(t, 0.0), dim_a);
        for (int k = 0; k < k_cols; ++k)
            for (int m = 0; m + k < dim_a; ++m)
                vt.entries(static_cast<Eigen::Index>(m + k) * dim_b + m, k) += w * d(m + k, m);
    }

    vt.truncation_defects.resize(k_cols);
    for (int k = 0; k < k_cols; ++k)
        vt.truncation_defects[k] = 1.0 - vt.entries.col(k).squaredNorm();
    if (renormalize) {
        for (int k = 0; k < k_cols; ++k) {
            const double norm = vt.entries.col(k).norm();
            if (norm <= 0.0)
                throw std::invalid_argument("build_isometry: empty column, cannot renormalize");
            vt.entries.col(k) /= norm;
        }
        vt.renormalized = true;
    }
    vt.column_defects.resize(k_cols);
    for (int k = 0; k < k_cols; ++k)
        vt.column_defects[k] = 1.0 - vt.entries.col(k).squaredNorm();
    return vt;
}

// T(rho) = Vt rho Vt^dag, a two-mode density when Vt is isometric.
inline Mat apply_T(const IsometryMatrix& vt, const Mat& rho) {
    if (rho.rows() != rho.cols() || rho.rows() != vt.k_cols)
        throw std::invalid_argument("apply_T: density dimension does not match K");
    return vt.entries * rho * vt.entries.adjoint();
}

// Covariance under phase rotation: rotating the input by e^{i theta n} must
// equal conjugating the output by e^{i theta n_a} (x) e^{-i theta n_b}.  The
// row selection rule n - m = k makes this an exact identity in truncation.
inline double covariance_check(const IsometryMatrix& vt, const Mat& rho, double theta) {
    const Mat rot_in = phase_rotation(theta, vt.k_cols);
    const Mat lhs = apply_T(vt, rot_in * rho * rot_in.adjoint());
    const Mat rot_out = kron(phase_rotation(theta, vt.dim_a), phase_rotation(-theta, vt.dim_b));
    const Mat rhs = rot_out * apply_T(vt, rho) * rot_out.adjoint();
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

struct OutcomeDensity {
    double direct = 0.0;     // (1/pi) <<D(z)| Vt rho Vt^dag |D(z)>>, truncated
    double factorized = 0.0; // (1/2) |f(|z|)|^2 <e^{i arg z}|rho|e^{i arg z}>
};

// Heterodyne outcome density at z, both as computed from the truncated
// two-mode state and as the factorized reference it converges to.
inline OutcomeDensity outcome_density(const IsometryMatrix& vt, const Mat& rho, cplx z) {
    if (rho.rows() != rho.cols() || rho.rows() != vt.k_cols)
        throw std::invalid_argument("outcome_density: density dimension does not match K");
    const Mat d = displacement(z, vt.dim_a);
    Vec dvec(vt.dim_a * vt.dim_b);
    for (int n = 0; n < vt.dim_a; ++n)
        for (int m = 0; m < vt.dim_b; ++m) dvec[static_cast<Eigen::Index>(n) * vt.dim_b + m] = d(n, m);
    const Vec u = vt.entries.adjoint() * dvec;
    OutcomeDensity out;
    out.direct = std::real(u.dot(rho * u)) / pi;
    const double f = vt.profile(std::abs(z));
    out.factorized = 0.5 * f * f * sg_expectation(rho, std::arg(z));
    return out;
}

// Radial slice of the heterodyne amplitudes: u_k(t) = column_k^dag vec(D(t)).
// At z = t e^{i phi} the full amplitude is e^{i phi k} u_k(t), which lets
// grid sweeps reuse one displacement matrix per radial node.
inline Vec heterodyne_amplitudes(const IsometryMatrix& vt, double t) {
    const Mat d = displacement(cplx(t, 0.0), vt.dim_a);
    Vec u(vt.k_cols);
    for (int k = 0; k < vt.k_cols; ++k) {
        cplx acc(0.0, 0.0);
        for (int m = 0; m + k < vt.dim_a; ++m)
            acc += std::conj(vt.entries(static_cast<Eigen::Index>(m + k) * vt.dim_b + m, k)) *
                   d(m + k, m);
        u[k] = acc;
    }
    return u;
}

} // namespace phasekit
