#include <phasekit/phase.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace phasekit;

TEST_CASE("phase kets") {
    const FockKet k0 = sg_ket(0.0, 3);
    for (int i = 0; i < 3; ++i) REQUIRE(k0.amps[i] == cplx(1.0, 0.0));
    REQUIRE_FALSE(k0.normalized);

    const FockKet k = sg_ket(pi / 3.0, 5);
    REQUIRE(std::abs(std::conj(k.amps[2]) - std::exp(cplx(0.0, -2.0 * pi / 3.0))) < 1e-15);
    REQUIRE(std::abs(k.amps.squaredNorm() - 5.0) < 1e-12);
}

TEST_CASE("grid completeness of the phase projectors") {
    // exact once the grid outruns every coherence |n-m|
    REQUIRE(povm_completeness_check(8, PhaseGrid(15)) < 1e-12);
    REQUIRE(povm_completeness_check(8, PhaseGrid(8)) < 1e-12);
    REQUIRE(povm_completeness_check(1, PhaseGrid(3)) < 1e-15);
    // an M-node grid aliases coherences at |n-m| = M onto the diagonal sum
    REQUIRE(std::abs(povm_completeness_check(8, PhaseGrid(7)) - 1.0) < 1e-12);
    REQUIRE(std::abs(povm_completeness_check(12, PhaseGrid(6)) - 1.0) < 1e-12);
}

TEST_CASE("ideal phase density") {
    SECTION("vacuum is uniform") {
        const Mat rho = make_state(StateSpec::fock(0), 8);
        const PhaseDistribution p = ideal_phase_density(rho, PhaseGrid(64));
        for (int j = 0; j < 64; ++j) REQUIRE(std::abs(p.density[j] - 1.0 / (2.0 * pi)) < 1e-14);
    }

    SECTION("two-level superposition has the closed form (1 + cos phi)/2pi") {
        const Mat rho =
            make_state(StateSpec::superposition({{0, cplx(1.0, 0.0)}, {1, cplx(1.0, 0.0)}}), 8);
        const PhaseGrid grid(128);
        const PhaseDistribution p = ideal_phase_density(rho, grid);
        for (int j = 0; j < grid.points; ++j)
            REQUIRE(std::abs(p.density[j] - (1.0 + std::cos(grid.node(j))) / (2.0 * pi)) < 1e-14);
        REQUIRE(p.norm_defect < 1e-12);
    }

    SECTION("coherent state peaks at the phase of its amplitude") {
        const int n = 32;
        const Mat rho = make_state(StateSpec::coherent(cplx(2.0, 0.0)), n);
        const PhaseGrid grid(256);
        const PhaseDistribution p = ideal_phase_density(rho, grid);
        int argmax = 0;
        for (int j = 1; j < grid.points; ++j)
            if (p.density[j] > p.density[argmax]) argmax = j;
        const double mode = grid.node(argmax);
        const double dist = std::min(mode, 2.0 * pi - mode);
        REQUIRE(dist <= grid.step() + 1e-12); // within one step of arg alpha = 0
        REQUIRE(p.density.minCoeff() >= 0.0);
    }

    SECTION("quadrature normalization is exact for fine grids, flagged for coarse") {
        const Mat rho = make_state(StateSpec::random_density(3, 4), 16);
        const PhaseDistribution fine = ideal_phase_density(rho, PhaseGrid(31));
        REQUIRE(fine.norm_defect < 1e-9);
        REQUIRE_FALSE(fine.coarse_grid_warning);
        const PhaseDistribution coarse = ideal_phase_density(rho, PhaseGrid(8));
        REQUIRE(coarse.coarse_grid_warning);
    }

    SECTION("covariance: rotating the state shifts the density circularly") {
        const int n = 12;
        const Mat rho = make_state(StateSpec::random_density(17, 3), n);
        const PhaseGrid grid(64);
        const int shift = 9;
        const double theta = grid.node(shift);
        const Mat rot = phase_rotation(theta, n);
        const PhaseDistribution base = ideal_phase_density(rho, grid);
        const PhaseDistribution moved = ideal_phase_density(rot * rho * rot.adjoint(), grid);
        for (int j = 0; j < grid.points; ++j) {
            const int src = ((j - shift) % grid.points + grid.points) % grid.points;
            REQUIRE(std::abs(moved.density[j] - base.density[src]) < 1e-12);
        }
    }

    SECTION("phase-insensitive states give the uniform density") {
        const Mat rho = make_state(StateSpec::thermal(0.8), 24);
        const PhaseDistribution p = ideal_phase_density(rho, PhaseGrid(64));
        for (int j = 0; j < 64; ++j) REQUIRE(std::abs(p.density[j] - 1.0 / (2.0 * pi)) < 1e-12);
    }
}

TEST_CASE("state library") {
    SECTION("fock") {
        const Mat rho = make_state(StateSpec::fock(0), 4);
        REQUIRE(std::abs(rho(0, 0) - cplx(1.0, 0.0)) < 1e-15);
        REQUIRE(std::abs(rho.trace().real() - 1.0) < 1e-15);
    }

    SECTION("coherent photon number against a larger truncation") {
        const Mat rho32 = make_state(StateSpec::coherent(cplx(1.0, 0.0)), 32);
        const Mat rho64 = make_state(StateSpec::coherent(cplx(1.0, 0.0)), 64);
        auto mean_n = [](const Mat& rho) {
            double acc = 0.0;
            for (int k = 0; k < rho.rows(); ++k) acc += k * std::real(rho(k, k));
            return acc;
        };
        REQUIRE(std::abs(mean_n(rho32) - 1.0) < 1e-8);
        REQUIRE(std::abs(mean_n(rho32) - mean_n(rho64)) < 1e-10);
    }

    SECTION("random densities are valid and reproducible") {
        const Mat rho = make_state(StateSpec::random_density(7, 3), 10);
        REQUIRE(std::abs(rho.trace().real() - 1.0) < 1e-12);
        REQUIRE((rho - rho.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
        Eigen::SelfAdjointEigenSolver<Mat> es(rho);
        REQUIRE(es.eigenvalues().minCoeff() > -1e-14);
        const Mat again = make_state(StateSpec::random_density(7, 3), 10);
        REQUIRE((rho - again).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("thermal diagonal with the requested mean") {
        const Mat rho = make_state(StateSpec::thermal(0.5), 48);
        double mean = 0.0;
        for (int k = 0; k < 48; ++k) mean += k * std::real(rho(k, k));
        REQUIRE(std::abs(mean - 0.5) < 1e-9);
        Mat off = rho;
        off.diagonal().setZero();
        REQUIRE(off.cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("invalid specs are rejected") {
        REQUIRE_THROWS_AS(make_state(StateSpec::fock(9), 4), std::invalid_argument);
        REQUIRE_THROWS_AS(make_state(StateSpec::thermal(-1.0), 4), std::invalid_argument);
        REQUIRE_THROWS_AS(make_state(StateSpec::random_density(1, 0), 4), std::invalid_argument);
        REQUIRE_THROWS_AS(make_ket(StateSpec::superposition({}), 4), std::invalid_argument);
    }
}
