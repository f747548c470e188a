#pragma once

#include "fock.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

namespace phasekit {

// Uniform periodic grid phi_j = 2 pi j / M on [0, 2pi).
struct PhaseGrid {
    int points = 0;

    explicit PhaseGrid(int m) : points(m) {
        if (m < 1) throw std::invalid_argument("PhaseGrid: need at least one node");
    }
    double node(int j) const { return 2.0 * pi * j / points; }
    double step() const { return 2.0 * pi / points; }
};

inline PhaseGrid default_phase_grid(int dim) { return PhaseGrid(std::max(256, 2 * dim - 1)); }

struct PhaseDistribution {
    PhaseGrid grid;
    Eigen::VectorXd density;
    double norm_defect = 0.0;      // |quadrature sum - 1| at construction
    double raw_normalization = 1.0; // pre-renormalization mass, when renormalized
    bool coarse_grid_warning = false;
    bool negativity_warning = false;
};

// Applies the distribution invariants: clips tiny negative entries (warning
// past the -1e-12 floor) and records the quadrature normalization defect.
inline PhaseDistribution make_phase_distribution(PhaseGrid grid, Eigen::VectorXd density) {
    PhaseDistribution dist{grid, std::move(density)};
    if (dist.density.size() != grid.points)
        throw std::invalid_argument("PhaseDistribution: density length does not match grid");
    for (Eigen::Index j = 0; j < dist.density.size(); ++j) {
        if (dist.density[j] < 0.0) {
            if (dist.density[j] < -1e-12) dist.negativity_warning = true;
            dist.density[j] = 0.0;
        }
    }
    dist.norm_defect = std::abs(grid.step() * dist.density.sum() - 1.0);
    return dist;
}

// Unnormalizable phase ket truncated to n terms: amplitudes e^{i phi k}.
inline FockKet sg_ket(double phi, int n) {
    if (n < 1) throw std::invalid_argument("sg_ket: invalid dimension");
    Vec amps(n);
    for (int k = 0; k < n; ++k) amps[k] = std::exp(cplx(0.0, phi * k));
    return FockKet(ModeLayout::single(n), std::move(amps), false);
}

// <e^{i phi}| rho |e^{i phi}> = sum_{nm} rho_{nm} e^{i phi (m - n)}, real and
// nonnegative for a valid density.
inline double sg_expectation(const Mat& rho, double phi) {
    const int n = static_cast<int>(rho.rows());
    Vec ket(n);
    for (int k = 0; k < n; ++k) ket[k] = std::exp(cplx(0.0, phi * k));
    return std::real(ket.dot(rho * ket));
}

// Born-rule phase density p(phi) = (1/2pi) <e^{i phi}|rho|e^{i phi}> on the
// grid.  Exact quadrature normalization needs M >= 2N-1; a coarser grid is
// allowed but flagged.
inline PhaseDistribution ideal_phase_density(const Mat& rho, PhaseGrid grid) {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("ideal_phase_density: rho not square");
    const int n = static_cast<int>(rho.rows());
    Eigen::VectorXd density(grid.points);
    for (int j = 0; j < grid.points; ++j)
        density[j] = sg_expectation(rho, grid.node(j)) / (2.0 * pi);
    PhaseDistribution dist = make_phase_distribution(grid, std::move(density));
    dist.coarse_grid_warning = grid.points < 2 * n - 1;
    return dist;
}

// Max-norm of (1/M) sum_j |e^{i phi_j}><e^{i phi_j}| - I: the uniform grid
// resolves the identity exactly once M exceeds every |n - m| in the
// truncation, by discrete-Fourier orthogonality.
inline double povm_completeness_check(int n, PhaseGrid grid) {
    if (n < 1) throw std::invalid_argument("povm_completeness_check: invalid dimension");
    Mat acc = Mat::Zero(n, n);
    for (int j = 0; j < grid.points; ++j) {
        const FockKet ket = sg_ket(grid.node(j), n);
        acc.noalias() += ket.amps * ket.amps.adjoint();
    }
    acc /= static_cast<double>(grid.points);
    acc.diagonal().array() -= 1.0;
    return acc.cwiseAbs().maxCoeff();
}

// Input-state library.
struct StateSpec {
    struct Fock {
        int n = 0;
    };
    struct Coherent {
        cplx alpha;
    };
    struct Superposition {
        std::vector<std::pair<int, cplx>> terms; // (Fock level, amplitude)
    };
    struct Thermal {
        double mean_photons = 0.0;
    };
    struct RandomDensity {
        std::uint64_t seed = 0;
        int rank = 1;
    };
    std::variant<Fock, Coherent, Superposition, Thermal, RandomDensity> value;

    static StateSpec fock(int n) { return {Fock{n}}; }
    static StateSpec coherent(cplx alpha) { return {Coherent{alpha}}; }
    static StateSpec superposition(std::vector<std::pair<int, cplx>> terms) {
        return {Superposition{std::move(terms)}};
    }
    static StateSpec thermal(double mean) { return {Thermal{mean}}; }
    static StateSpec random_density(std::uint64_t seed, int rank) {
        return {RandomDensity{seed, rank}};
    }

    // Largest Fock level carrying weight, or dim-1 when unbounded.
    int support_bound(int dim) const {
        if (const auto* f = std::get_if<Fock>(&value)) return f->n;
        if (const auto* s = std::get_if<Superposition>(&value)) {
            int hi = 0;
            for (const auto& [n, amp] : s->terms) hi = std::max(hi, n);
            return hi;
        }
        return dim - 1;
    }
};

// Normalized ket for the pure members of the library.
inline Vec make_ket(const StateSpec& spec, int dim) {
    if (dim < 1) throw std::invalid_argument("make_ket: invalid dimension");
    if (const auto* f = std::get_if<StateSpec::Fock>(&spec.value)) {
        if (f->n < 0 || f->n >= dim) throw std::invalid_argument("make_ket: Fock level out of range");
        Vec v = Vec::Zero(dim);
        v[f->n] = 1.0;
        return v;
    }
    if (const auto* c = std::get_if<StateSpec::Coherent>(&spec.value)) {
        Vec v = displacement(c->alpha, dim).col(0);
        v.normalize();
        return v;
    }
    if (const auto* s = std::get_if<StateSpec::Superposition>(&spec.value)) {
        if (s->terms.empty()) throw std::invalid_argument("make_ket: empty superposition");
        Vec v = Vec::Zero(dim);
        for (const auto& [n, amp] : s->terms) {
            if (n < 0 || n >= dim) throw std::invalid_argument("make_ket: Fock level out of range");
            v[n] += amp;
        }
        const double norm = v.norm();
        if (norm < 1e-14) throw std::invalid_argument("make_ket: superposition sums to zero");
        return v / norm;
    }
    throw std::invalid_argument("make_ket: spec is not a pure state");
}

// Density matrix for any library member.  Coherent states are built from the
// displaced vacuum and renormalized; |alpha|^2 <= dim/4 is the safe regime
// (reported by the caller, not enforced here).
inline Mat make_state(const StateSpec& spec, int dim) {
    if (dim < 1) throw std::invalid_argument("make_state: invalid dimension");
    if (const auto* t = std::get_if<StateSpec::Thermal>(&spec.value)) {
        if (t->mean_photons < 0.0)
            throw std::invalid_argument("make_state: thermal mean must be nonnegative");
        Mat rho = Mat::Zero(dim, dim);
        const double nu = t->mean_photons;
        double total = 0.0;
        for (int k = 0; k < dim; ++k) {
            const double w = (nu == 0.0) ? (k == 0 ? 1.0 : 0.0)
                                         : std::pow(nu / (1.0 + nu), k) / (1.0 + nu);
            rho(k, k) = w;
            total += w;
        }
        rho /= total;
        return rho;
    }
    if (const auto* r = std::get_if<StateSpec::RandomDensity>(&spec.value)) {
        if (r->rank < 1) throw std::invalid_argument("make_state: rank must be positive");
        CounterRng rng{r->seed};
        Mat g(dim, r->rank);
        std::uint64_t ctr = 0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < r->rank; ++j) {
                const double re = rng.normal(ctr++);
                const double im = rng.normal(ctr++);
                g(i, j) = cplx(re, im);
            }
        Mat rho = g * g.adjoint();
        rho /= rho.trace().real();
        return rho;
    }
    const Vec psi = make_ket(spec, dim);
    return psi * psi.adjoint();
}

} // namespace phasekit
