#pragma once

#include "dilation.hpp"
#include "fock.hpp"
#include "isometry.hpp"
#include "phase.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace phasekit {

// Polar quadrature over the complex outcome plane: Gauss-Legendre radially on
// [0, t_max], uniform angles.
struct PolarGrid {
    Eigen::VectorXd t_nodes;
    Eigen::VectorXd t_weights;
    int angular = 0;
    double t_max = 0.0;

    double angle(int j) const { return 2.0 * pi * j / angular; }
    double angle_step() const { return 2.0 * pi / angular; }
};

inline PolarGrid make_polar_grid(int radial, int angular, double t_max) {
    if (radial < 1 || angular < 1 || t_max <= 0.0)
        throw std::invalid_argument("make_polar_grid: invalid grid parameters");
    PolarGrid g;
    const QuadratureRule rule = gauss_legendre(radial, 0.0, t_max);
    g.t_nodes = rule.nodes;
    g.t_weights = rule.weights;
    g.angular = angular;
    g.t_max = t_max;
    return g;
}

// Grid sized for a working dimension: angles resolve every Fock coherence,
// radial nodes resolve the oscillation of displacement elements (frequencies
// grow like sqrt(dim) and products of two of them appear in densities).
inline PolarGrid default_polar_grid(int dim) {
    const double t_max = std::max(8.0, 3.0 * std::sqrt(static_cast<double>(dim)));
    const int radial = std::max(256, 7 * dim);
    const int angular = std::max(256, 2 * dim - 1);
    return make_polar_grid(radial, angular, t_max);
}

// Defect of the heterodyne resolution of identity
//   (1/pi) integral d^2z |D(z)>><<D(z)| = I
// under the polar quadrature, restricted to the two-mode block with total
// photon number <= dim/2.  Near the truncation edge the truncated kets cannot
// resolve the identity, so only the interior block is meaningful.
inline double completeness_defect(int dim, const PolarGrid& grid) {
    if (dim < 1) throw std::invalid_argument("completeness_defect: invalid dimension");
    std::vector<int> block;
    for (int n = 0; n < dim; ++n)
        for (int m = 0; m < dim; ++m)
            if (n + m <= dim / 2) block.push_back(n * dim + m);
    const int bs = static_cast<int>(block.size());

    Mat acc = Mat::Zero(bs, bs);
    Vec u(bs);
    for (int i = 0; i < grid.t_nodes.size(); ++i) {
        const double t = grid.t_nodes[i];
        const Mat d = displacement(cplx(t, 0.0), dim);
        const double coeff = grid.t_weights[i] * t * grid.angle_step() / pi;
        for (int j = 0; j < grid.angular; ++j) {
            const double phi = grid.angle(j);
            for (int b = 0; b < bs; ++b) {
                const int n = block[b] / dim, m = block[b] % dim;
                u[b] = std::exp(cplx(0.0, phi * (n - m))) * d(n, m);
            }
            acc.noalias() += coeff * (u * u.adjoint());
        }
    }
    acc.diagonal().array() -= 1.0;
    return acc.cwiseAbs().maxCoeff();
}

// Angular marginal of the heterodyne density computed from the truncated
// two-mode state: q(phi) = integral t p(t e^{i phi}) dt, renormalized by its
// own quadrature mass.  The raw mass is reported; it drifts below 1 exactly
// by the truncation weight the state puts on uncertified columns.
inline PhaseDistribution phase_marginal(const IsometryMatrix& vt, const Mat& rho,
                                        const PolarGrid& grid) {
    if (rho.rows() != rho.cols() || rho.rows() != vt.k_cols)
        throw std::invalid_argument("phase_marginal: density dimension does not match K");
    const int k_cols = vt.k_cols;

    // Accumulate S = integral t dt (u(t) u(t)^dag o rho^T); the angular
    // dependence of the amplitudes is a pure phase e^{i phi k}, so the whole
    // radial integral is shared by every angle.
    Mat s = Mat::Zero(k_cols, k_cols);
    for (int i = 0; i < grid.t_nodes.size(); ++i) {
        const Vec u = heterodyne_amplitudes(vt, grid.t_nodes[i]);
        const double w = grid.t_weights[i] * grid.t_nodes[i];
        for (int k = 0; k < k_cols; ++k)
            for (int kp = 0; kp < k_cols; ++kp)
                s(k, kp) += w * std::conj(u[k]) * rho(k, kp) * u[kp];
    }
    PhaseGrid pgrid(grid.angular);
    Eigen::VectorXd density(grid.angular);
    for (int j = 0; j < grid.angular; ++j) {
        const double phi = pgrid.node(j);
        cplx val(0.0, 0.0);
        for (int k = 0; k < k_cols; ++k)
            for (int kp = 0; kp < k_cols; ++kp)
                val += std::exp(cplx(0.0, phi * (kp - k))) * s(k, kp);
        density[j] = std::real(val) / pi;
    }
    const double raw_mass = pgrid.step() * density.sum();
    if (raw_mass <= 0.0) throw std::invalid_argument("phase_marginal: vanishing marginal mass");
    density /= raw_mass;
    PhaseDistribution dist = make_phase_distribution(pgrid, std::move(density));
    dist.raw_normalization = raw_mass;
    dist.coarse_grid_warning = std::abs(raw_mass - 1.0) > 1e-3;
    return dist;
}

struct HeterodyneSampleSet {
    std::uint64_t seed = 0;
    std::vector<cplx> samples;
    std::string provenance;
};

namespace detail {

// Piecewise-linear inverse CDF over tabulated nonnegative densities.
struct InverseCdf {
    std::vector<double> xs;
    std::vector<double> cdf;

    InverseCdf(const std::vector<double>& x, const std::vector<double>& pdf) : xs(x) {
        cdf.resize(xs.size(), 0.0);
        for (std::size_t i = 1; i < xs.size(); ++i)
            cdf[i] = cdf[i - 1] + 0.5 * (pdf[i] + pdf[i - 1]) * (xs[i] - xs[i - 1]);
        const double total = cdf.back();
        if (total <= 0.0) throw std::invalid_argument("InverseCdf: density has no mass");
        for (double& c : cdf) c /= total;
    }

    double operator()(double u) const {
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t hi = static_cast<std::size_t>(it - cdf.begin());
        if (hi == 0) return xs.front();
        if (hi >= cdf.size()) return xs.back();
        const double span = cdf[hi] - cdf[hi - 1];
        const double w = span > 0.0 ? (u - cdf[hi - 1]) / span : 0.0;
        return xs[hi - 1] + w * (xs[hi] - xs[hi - 1]);
    }
};

} // namespace detail

// Heterodyne outcomes z = t e^{i phi} drawn from the factorized density: the
// phase from the Born-rule phase distribution of rho and the radius,
// independently, from pi t |f(t)|^2.  Counter-based draws make the set a pure
// function of the seed, independent of generation order.
//
// The phase table is anchored at the antipode of the density's circular mean
// (falling back to 0 for phase-insensitive states).  The anchor co-rotates
// with the state, so rotating rho by e^{i theta n} shifts every drawn phase
// by exactly theta while the radial stream stays untouched.
inline HeterodyneSampleSet sample_heterodyne(const IsometryMatrix& vt, const Mat& rho,
                                             std::size_t count, std::uint64_t seed,
                                             int cdf_nodes = 4096) {
    if (rho.rows() != rho.cols() || rho.rows() != vt.k_cols)
        throw std::invalid_argument("sample_heterodyne: density dimension does not match K");
    cplx first_moment(0.0, 0.0); // integral e^{i phi} p(phi) dphi = sum_k rho_{k+1,k}
    for (int k = 0; k + 1 < vt.k_cols; ++k) first_moment += rho(k + 1, k);
    const double anchor =
        std::abs(first_moment) > 1e-12 ? std::arg(first_moment) - pi : 0.0;
    std::vector<double> phis(cdf_nodes + 1), pdf_phi(cdf_nodes + 1);
    for (int i = 0; i <= cdf_nodes; ++i) {
        phis[i] = anchor + 2.0 * pi * i / cdf_nodes;
        pdf_phi[i] = std::max(0.0, sg_expectation(rho, phis[i]) / (2.0 * pi));
    }
    const double t_hi =
        vt.profile.support_max(std::max(8.0, 3.0 * std::sqrt(static_cast<double>(vt.dim_a))));
    std::vector<double> ts(cdf_nodes + 1), pdf_t(cdf_nodes + 1);
    for (int i = 0; i <= cdf_nodes; ++i) {
        ts[i] = t_hi * i / cdf_nodes;
        const double f = vt.profile(ts[i]);
        pdf_t[i] = pi * ts[i] * f * f;
    }
    const detail::InverseCdf phase_icdf(phis, pdf_phi);
    const detail::InverseCdf radial_icdf(ts, pdf_t);

    HeterodyneSampleSet out;
    out.seed = seed;
    out.provenance = "factorized-inverse-cdf";
    out.samples.resize(count);
    const CounterRng rng{seed};
    for (std::size_t i = 0; i < count; ++i) {
        const double phi = phase_icdf(rng.uniform(2 * i));
        const double t = radial_icdf(rng.uniform(2 * i + 1));
        out.samples[i] = std::polar(t, phi);
    }
    return out;
}

struct DoubleHomodynePair {
    double heterodyne = 0.0;      // (1/pi) |<<D(x+iy)|psi>|^2
    double double_homodyne = 0.0; // |(<x| (x) <y|) R^dag |psi>|^2
};

// Outcome densities of the two equivalent measurement procedures on a
// two-mode state: projecting on the heterodyne eigenket at z = x + iy
// (density with respect to d^2z/pi) versus beam-splitting and homodyning the
// two quadratures (density with respect to dx dy).  The identity fixes the
// magnitudes only; relative phases of the eigenkets stay conventional.
inline DoubleHomodynePair double_homodyne_check(double x, double y, const FockKet& psi, int dim) {
    if (psi.layout.n_modes() != 2 || psi.layout.dims[0] != dim || psi.layout.dims[1] != dim)
        throw std::invalid_argument("double_homodyne_check: psi must live on two modes of the given dimension");
    const Mat d = displacement(cplx(x, y), dim);
    cplx het(0.0, 0.0);
    for (int n = 0; n < dim; ++n)
        for (int m = 0; m < dim; ++m)
            het += std::conj(d(n, m)) * psi.amps[static_cast<Eigen::Index>(n) * dim + m];

    const Vec rotated = apply_beam_splitter(psi.amps, dim, /*adjoint=*/true);
    const FockKet xket = quadrature_eigenket(x, Quadrature::X, dim);
    const FockKet yket = quadrature_eigenket(y, Quadrature::Y, dim);
    cplx hom(0.0, 0.0);
    for (int n = 0; n < dim; ++n) {
        if (std::abs(xket.amps[n]) == 0.0) continue;
        cplx inner(0.0, 0.0);
        for (int m = 0; m < dim; ++m)
            inner += std::conj(yket.amps[m]) * rotated[static_cast<Eigen::Index>(n) * dim + m];
        hom += std::conj(xket.amps[n]) * inner;
    }

    DoubleHomodynePair out;
    out.heterodyne = std::norm(het) / pi;
    out.double_homodyne = std::norm(hom);
    return out;
}

} // namespace phasekit
