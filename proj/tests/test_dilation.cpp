#include <phasekit/dilation.hpp>
#include <phasekit/phase.hpp>
#include <phasekit/rng.hpp>

#include <catch2/catch_amalgamated.hpp>

using namespace phasekit;

namespace {

Mat random_density(std::uint64_t seed, int n, int rank) {
    CounterRng rng{seed};
    Mat g(n, rank);
    std::uint64_t ctr = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < rank; ++j) g(i, j) = cplx(rng.normal(ctr++), rng.normal(ctr++));
    Mat rho = g * g.adjoint();
    rho /= rho.trace().real();
    return rho;
}

FockKet vacuum_ket(int n) {
    Vec v = Vec::Zero(n);
    v[0] = 1.0;
    return FockKet(ModeLayout::single(n), std::move(v), true);
}

struct Fixture {
    int n;
    IsometryMatrix vt;
    FockKet chi;
    FockOperator v;

    explicit Fixture(int dim, bool renormalize = true)
        : n(dim),
          vt(build_isometry(gaussian_profile(), dim, dim, dim, renormalize)),
          chi(vacuum_ket(dim)),
          v(build_V(vt, chi)) {}
};

} // namespace

TEST_CASE("ancilla flip operators") {
    SECTION("qubit") {
        const AncillaW w = build_W(AncillaW::Kind::Qubit);
        REQUIRE(w.condition_defect() == 0.0);
        REQUIRE((w.w * w.w).cwiseAbs().maxCoeff() == 0.0);
        Mat sum = w.flip_upper() + w.flip_lower();
        REQUIRE((sum - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("pseudo-spin ladder action") {
        const AncillaW w = build_W(AncillaW::Kind::PseudoSpin, 4);
        Vec e1 = Vec::Zero(4), e3 = Vec::Zero(4), e0 = Vec::Zero(4), e2 = Vec::Zero(4);
        e1[1] = e3[3] = e0[0] = e2[2] = 1.0;
        REQUIRE(((w.w * e1) - e0).cwiseAbs().maxCoeff() == 0.0);
        REQUIRE(((w.w * e3) - e2).cwiseAbs().maxCoeff() == 0.0);
        REQUIRE((w.w * e0).norm() == 0.0);
        REQUIRE((w.w * e2).norm() == 0.0);
    }

    SECTION("pseudo-spin projectors split even and odd levels") {
        const AncillaW w = build_W(AncillaW::Kind::PseudoSpin, 6);
        const Mat upper = w.flip_upper();
        for (int i = 0; i < 6; ++i)
            REQUIRE(std::abs(upper(i, i) - cplx(i % 2 == 0 ? 1.0 : 0.0, 0.0)) == 0.0);
        REQUIRE(w.condition_defect() == 0.0);
    }

    SECTION("odd dimensions are rejected") {
        REQUIRE_THROWS_AS(build_W(AncillaW::Kind::PseudoSpin, 5), std::invalid_argument);
        REQUIRE_THROWS_AS(build_W(AncillaW::Kind::PseudoSpin, 1), std::invalid_argument);
    }
}

TEST_CASE("ancilla state conditions") {
    const AncillaW w = build_W(AncillaW::Kind::Qubit);

    SECTION("ground state passes") {
        Mat mu = Mat::Zero(2, 2);
        mu(0, 0) = 1.0;
        const MuCheck mc = check_mu(mu, w);
        REQUIRE(mc.pass);
        REQUIRE(mc.upper_trace_residual == 0.0);
    }

    SECTION("excited state fails the weight condition") {
        Mat mu = Mat::Zero(2, 2);
        mu(1, 1) = 1.0;
        const MuCheck mc = check_mu(mu, w);
        REQUIRE_FALSE(mc.pass);
        REQUIRE(std::abs(mc.upper_trace_residual - 1.0) < 1e-15);
    }

    SECTION("balanced superposition fails both conditions") {
        Mat mu(2, 2);
        mu << 0.5, 0.5, 0.5, 0.5;
        const MuCheck mc = check_mu(mu, w);
        REQUIRE_FALSE(mc.pass);
        REQUIRE(std::abs(mc.upper_trace_residual - 0.5) < 1e-15);
        REQUIRE(std::abs(mc.w_trace_residual - 0.5) < 1e-15);
    }
}

TEST_CASE("square embedding operator") {
    const Fixture fx(12);

    SECTION("projector identities") {
        const Mat vv = fx.v.m * fx.v.m.adjoint();
        REQUIRE((vv * vv - vv).cwiseAbs().maxCoeff() < 1e-12);
        const Mat qq = fx.v.m.adjoint() * fx.v.m;
        const Mat expected = kron(Mat::Identity(12, 12), fx.chi.amps * fx.chi.amps.adjoint());
        REQUIRE((qq - expected).cwiseAbs().maxCoeff() < 1e-12);
    }

    SECTION("vacuum through the embedding") {
        Vec in = Vec::Zero(144);
        in[0] = 1.0; // |0>|0>
        const Vec out = fx.v.m * in;
        REQUIRE(std::abs(out[0] - cplx(1.0, 0.0)) < 1e-12);
        REQUIRE(out.tail(143).cwiseAbs().maxCoeff() < 1e-12);
    }

    SECTION("unnormalized chi is rejected") {
        Vec bad = Vec::Zero(12);
        bad[0] = 0.5;
        REQUIRE_THROWS_AS(build_V(fx.vt, FockKet(ModeLayout::single(12), bad, false)),
                          std::invalid_argument);
    }
}

TEST_CASE("dilation unitary") {
    SECTION("unitary to rounding with a renormalized embedding") {
        const Fixture fx(12);
        const AncillaW w = build_W(AncillaW::Kind::Qubit);
        const DilationUnitary u = build_U(fx.v, w);
        REQUIRE(u.unitarity_defect < 1e-10);
        REQUIRE(u.unitarity_defect == dilation_unitarity_defect(fx.v, w));
    }

    SECTION("degenerate V = 0 gives the ancilla swap, exactly unitary") {
        const AncillaW w = build_W(AncillaW::Kind::Qubit);
        const FockOperator v0 = FockOperator::square(ModeLayout::two(3, 3), Mat::Zero(9, 9));
        const DilationUnitary u = build_U(v0, w);
        const Mat expected = kron(Mat::Identity(9, 9), Mat(w.w + w.w.adjoint()));
        REQUIRE((u.u.m - expected).cwiseAbs().maxCoeff() == 0.0);
        REQUIRE(u.unitarity_defect < 1e-15);
    }

    SECTION("without renormalization the defect tracks the worst column defect") {
        const Fixture fx(32, /*renormalize=*/false);
        const AncillaW w = build_W(AncillaW::Kind::Qubit);
        const double defect = dilation_unitarity_defect(fx.v, w);
        const double max_col = fx.vt.truncation_defects.maxCoeff();
        REQUIRE(defect <= 10.0 * max_col);
        REQUIRE(defect > 1e-6); // genuinely truncation-limited, not exact
    }

    SECTION("pseudo-spin ancilla stays unitary") {
        const Fixture fx(8);
        const AncillaW w = build_W(AncillaW::Kind::PseudoSpin, 4);
        const DilationUnitary u = build_U(fx.v, w);
        REQUIRE(u.unitarity_defect < 1e-10);
    }
}

TEST_CASE("traced channel") {
    const Fixture fx(12);
    const AncillaW qubit = build_W(AncillaW::Kind::Qubit);
    Mat mu0 = Mat::Zero(2, 2);
    mu0(0, 0) = 1.0;
    const DilationConfig cfg{fx.chi, qubit, mu0};
    const DilationUnitary u = build_U(fx.v, qubit);

    SECTION("vacuum input realizes the two-mode vacuum") {
        const Mat out = evolve_and_trace(make_state(StateSpec::fock(0), 12), cfg, u);
        Mat expected = Mat::Zero(144, 144);
        expected(0, 0) = 1.0;
        REQUIRE((out - expected).cwiseAbs().maxCoeff() < 1e-9);
    }

    SECTION("channel equality with the embedding map, trace one") {
        for (int trial = 0; trial < 4; ++trial) {
            const Mat rho = random_density(trial + 40, 12, 2);
            const Mat out = evolve_and_trace(rho, cfg, u);
            REQUIRE((out - apply_T(fx.vt, rho)).cwiseAbs().maxCoeff() < 1e-9);
            REQUIRE(std::abs(out.trace().real() - 1.0) < 1e-10);
        }
    }

    SECTION("qubit and pseudo-spin ancillas give the same channel") {
        const AncillaW pspin = build_W(AncillaW::Kind::PseudoSpin, 8);
        Mat mu8 = Mat::Zero(8, 8);
        mu8(0, 0) = 1.0;
        const DilationConfig cfg8{fx.chi, pspin, mu8};
        const Mat rho = random_density(77, 12, 3);
        const Mat out2 = eight_term_channel(rho, cfg8, fx.v).state;
        const Mat out_qubit = evolve_and_trace(rho, cfg, u);
        REQUIRE((out2 - out_qubit).cwiseAbs().maxCoeff() < 1e-9);
    }

    SECTION("violating ancilla states are refused with residuals") {
        Mat muplus(2, 2);
        muplus << 0.5, 0.5, 0.5, 0.5;
        const DilationConfig bad{fx.chi, qubit, muplus};
        REQUIRE_THROWS_WITH(evolve_and_trace(make_state(StateSpec::fock(0), 12), bad, u),
                            Catch::Matchers::ContainsSubstring("residuals"));
    }
}

TEST_CASE("literal term expansion of the traced channel") {
    const Fixture fx(10);
    const AncillaW qubit = build_W(AncillaW::Kind::Qubit);
    Mat mu0 = Mat::Zero(2, 2);
    mu0(0, 0) = 1.0;
    const DilationConfig cfg{fx.chi, qubit, mu0};

    SECTION("matches direct conjugation for both ancilla kinds") {
        const DilationUnitary u = build_U(fx.v, qubit);
        for (int trial = 0; trial < 3; ++trial) {
            const Mat rho = random_density(trial + 60, 10, 3);
            const Mat direct = evolve_and_trace(rho, cfg, u);
            const Mat expansion = eight_term_channel(rho, cfg, fx.v).state;
            REQUIRE((direct - expansion).cwiseAbs().maxCoeff() < 1e-10);
        }
        const AncillaW pspin = build_W(AncillaW::Kind::PseudoSpin, 4);
        Mat mu4 = Mat::Zero(4, 4);
        mu4(0, 0) = 1.0;
        const DilationConfig cfg4{fx.chi, pspin, mu4};
        const DilationUnitary u4 = build_U(fx.v, pspin);
        const Mat rho = random_density(99, 10, 2);
        REQUIRE((evolve_and_trace(rho, cfg4, u4) - eight_term_channel(rho, cfg4, fx.v).state)
                    .cwiseAbs()
                    .maxCoeff() < 1e-10);
    }

    SECTION("with the ground ancilla only the two weight-one terms survive") {
        // Six of the eight terms carry the trace factors Tr[W mu], Tr[W^dag mu]
        // or Tr[W^dag W mu], all exactly zero here; of the two survivors the
        // second is annihilated by sigma = |chi><chi|.
        const Mat& w = qubit.w;
        REQUIRE(std::abs((w * mu0).trace()) == 0.0);
        REQUIRE(std::abs((w.adjoint() * mu0).trace()) == 0.0);
        REQUIRE(std::abs((w.adjoint() * w * mu0).trace()) == 0.0);
        REQUIRE(std::abs((w * w.adjoint() * mu0).trace() - cplx(1.0, 0.0)) == 0.0);

        const Mat rho = random_density(5, 10, 2);
        const Mat x = kron(rho, cfg.sigma());
        const Eigen::Index n = fx.v.m.rows();
        const Mat q = fx.v.m.adjoint() * fx.v.m;
        const Mat second = (Mat::Identity(n, n) - q) * x * (Mat::Identity(n, n) - q);
        REQUIRE(second.cwiseAbs().maxCoeff() < 1e-12);
        const Mat total = eight_term_channel(rho, cfg, fx.v).state;
        REQUIRE((total - fx.v.m * x * fx.v.m.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
    }

    SECTION("violating mu produces a visibly different channel on a phase-sensitive state") {
        Mat muplus(2, 2);
        muplus << 0.5, 0.5, 0.5, 0.5;
        const DilationConfig bad{fx.chi, qubit, muplus};
        const Mat rho =
            make_state(StateSpec::superposition({{0, cplx(1.0, 0.0)}, {1, cplx(1.0, 0.0)}}), 10);
        const Mat out = eight_term_channel(rho, bad, fx.v).state;
        REQUIRE((out - apply_T(fx.vt, rho)).cwiseAbs().maxCoeff() > 0.01);
    }

    SECTION("mixed sigma is accepted but flagged") {
        const Mat rho = random_density(1, 10, 1);
        Mat sigma = Mat::Zero(10, 10);
        sigma(0, 0) = 0.5;
        sigma(1, 1) = 0.5;
        const TracedChannelResult res = eight_term_channel(rho, cfg, fx.v, &sigma);
        REQUIRE(res.sigma_was_mixed);
        const TracedChannelResult pure = eight_term_channel(rho, cfg, fx.v);
        REQUIRE_FALSE(pure.sigma_was_mixed);
    }
}
