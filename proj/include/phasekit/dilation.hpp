#pragma once

#include "fock.hpp"
#include "isometry.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace phasekit {

// Ancilla flip operator W with W^2 = 0 and W W^dag + W^dag W = I, so that
// W W^dag and W^dag W are orthogonal projectors splitting the ancilla space.
struct AncillaW {
    enum class Kind { Qubit, PseudoSpin };
    Kind kind = Kind::Qubit;
    Mat w;

    int dim() const { return static_cast<int>(w.rows()); }
    Mat flip_upper() const { return w * w.adjoint(); }   // W W^dag
    Mat flip_lower() const { return w.adjoint() * w; }   // W^dag W

    double condition_defect() const {
        const double sq = (w * w).cwiseAbs().maxCoeff();
        Mat sum = flip_upper() + flip_lower();
        sum.diagonal().array() -= 1.0;
        return std::max(sq, sum.cwiseAbs().maxCoeff());
    }

    std::string kind_name() const { return kind == Kind::Qubit ? "qubit" : "pseudospin"; }
};

// Qubit: W = |0><1|.  Pseudo-spin: W = sum_n |2n><2n+1|, which needs an even
// truncation so the two projectors still cover the whole space; odd
// dimensions are rejected rather than patched.
inline AncillaW build_W(AncillaW::Kind kind, int dim_c = 2) {
    AncillaW out;
    out.kind = kind;
    if (kind == AncillaW::Kind::Qubit) {
        out.w = Mat::Zero(2, 2);
        out.w(0, 1) = 1.0;
        return out;
    }
    if (dim_c < 2 || dim_c % 2 != 0)
        throw std::invalid_argument("build_W: pseudo-spin dimension must be even and >= 2");
    out.w = Mat::Zero(dim_c, dim_c);
    for (int n = 0; 2 * n + 1 < dim_c; ++n) out.w(2 * n, 2 * n + 1) = 1.0;
    return out;
}

struct MuCheck {
    double upper_trace_residual = 0.0; // |Tr[W W^dag mu] - 1|
    double w_trace_residual = 0.0;     // |Tr[W mu]|
    double wdag_trace_residual = 0.0;  // |Tr[W^dag mu]|
    bool pass = false;
};

inline MuCheck check_mu(const Mat& mu, const AncillaW& w) {
    if (mu.rows() != mu.cols() || mu.rows() != w.dim())
        throw std::invalid_argument("check_mu: mu dimension does not match W");
    MuCheck out;
    out.upper_trace_residual = std::abs((w.flip_upper() * mu).trace() - cplx(1.0, 0.0));
    out.w_trace_residual = std::abs((w.w * mu).trace());
    out.wdag_trace_residual = std::abs((w.w.adjoint() * mu).trace());
    out.pass = out.upper_trace_residual <= 1e-12 && out.w_trace_residual <= 1e-12 &&
               out.wdag_trace_residual <= 1e-12;
    return out;
}

struct DilationConfig {
    FockKet chi;  // normalized ket on mode b
    AncillaW w;
    Mat mu;       // ancilla density

    Mat sigma() const { return chi.amps * chi.amps.adjoint(); }
};

// V = Vt (I_a (x) <chi|), a square operator on the two-mode space.  With an
// isometric Vt both V V^dag and V^dag V are projectors; in particular
// V^dag V = I_a (x) |chi><chi|.
inline FockOperator build_V(const IsometryMatrix& vt, const FockKet& chi) {
    if (vt.k_cols != vt.dim_a)
        throw std::invalid_argument("build_V: needs K = dim_a so that V is square");
    if (chi.amps.size() != vt.dim_b) throw std::invalid_argument("build_V: chi dimension mismatch");
    if (std::abs(chi.amps.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("build_V: chi must be normalized");
    const int na = vt.dim_a, nb = vt.dim_b;
    // (I_a (x) <chi|): maps |k>|m> -> conj(chi_m) |k>.
    Mat contract = Mat::Zero(na, na * nb);
    for (int k = 0; k < na; ++k)
        for (int m = 0; m < nb; ++m)
            contract(k, static_cast<Eigen::Index>(k) * nb + m) = std::conj(chi.amps[m]);
    Mat v = vt.entries * contract;
    return FockOperator::square(ModeLayout::two(na, nb), std::move(v));
}

struct DilationUnitary {
    FockOperator u;        // on modes a (x) b (x) c
    double unitarity_defect = 0.0;
    int dim_ab = 0;
    int dim_c = 0;
};

// Unitarity defect of
//   U = V (x) WW^dag - V^dag (x) W^dagW + (I - V^dagV) (x) W^dag + (I - VV^dag) (x) W
// without materializing U.  The flip algebra reduces U^dag U to
//   S (x) WW^dag + S' (x) W^dagW   with   S = V^dagV + (I - V^dagV)^2,
// S' the same in VV^dag, and the cross blocks vanish identically; since the
// ancilla factors occupy disjoint entries, the max-norm splits exactly.
inline double dilation_unitarity_defect(const FockOperator& v, const AncillaW& /*w*/) {
    const Mat q = v.m.adjoint() * v.m;
    const Mat p = v.m * v.m.adjoint();
    const Eigen::Index n = v.m.rows();
    Mat block_upper = q + (Mat::Identity(n, n) - q) * (Mat::Identity(n, n) - q);
    Mat block_lower = p + (Mat::Identity(n, n) - p) * (Mat::Identity(n, n) - p);
    block_upper.diagonal().array() -= 1.0;
    block_lower.diagonal().array() -= 1.0;
    return std::max(block_upper.cwiseAbs().maxCoeff(), block_lower.cwiseAbs().maxCoeff());
}

inline DilationUnitary build_U(const FockOperator& v, const AncillaW& w) {
    if (!v.is_square()) throw std::invalid_argument("build_U: V must be square");
    const Eigen::Index n = v.m.rows();
    const Mat eye = Mat::Identity(n, n);
    const Mat q = v.m.adjoint() * v.m; // V^dag V
    const Mat p = v.m * v.m.adjoint(); // V V^dag
    Mat u = kron(v.m, w.flip_upper());
    u.noalias() -= kron(v.m.adjoint(), w.flip_lower());
    u.noalias() += kron(eye - q, w.w.adjoint());
    u.noalias() += kron(eye - p, w.w);

    DilationUnitary out;
    std::vector<int> dims = v.layout_out.dims;
    dims.push_back(w.dim());
    out.u = FockOperator::square(ModeLayout(dims), std::move(u));
    out.dim_ab = static_cast<int>(n);
    out.dim_c = w.dim();
    Mat gram = out.u.m.adjoint() * out.u.m;
    gram.diagonal().array() -= 1.0;
    out.unitarity_defect = gram.cwiseAbs().maxCoeff();
    return out;
}

// Tr_c[ U (rho (x) sigma (x) mu) U^dag ] by direct conjugation with the
// materialized U.  Refuses ancilla states that break the trace conditions;
// the literal expansion below accepts them for experimentation.
inline Mat evolve_and_trace(const Mat& rho_a, const DilationConfig& cfg,
                            const DilationUnitary& u) {
    const int na = u.u.layout_in.dims[0];
    const int nb = u.u.layout_in.dims[1];
    if (rho_a.rows() != rho_a.cols() || rho_a.rows() != na)
        throw std::invalid_argument("evolve_and_trace: rho dimension mismatch");
    const MuCheck mc = check_mu(cfg.mu, cfg.w);
    if (!mc.pass)
        throw std::invalid_argument(
            "evolve_and_trace: mu violates the trace conditions (residuals " +
            std::to_string(mc.upper_trace_residual) + ", " + std::to_string(mc.w_trace_residual) +
            ", " + std::to_string(mc.wdag_trace_residual) + ")");
    const Mat joint = kron(kron(rho_a, cfg.sigma()), cfg.mu);
    const Mat evolved = u.u.m * joint * u.u.m.adjoint();
    FockOperator state(u.u.layout_out, u.u.layout_in, evolved);
    return partial_trace(state, {0, 1}).m;
}

struct TracedChannelResult {
    Mat state;                    // two-mode output
    bool sigma_was_mixed = false; // flagged: the realization requires pure sigma
};

// The traced channel written out literally, term by term:
//   + V  X V^dag        Tr[W W^dag mu]     + V  X (I-VV^dag)   Tr[W^dag mu]
//   + V^dag X V         Tr[W^dag W mu]     - V^dag X (I-V^dagV) Tr[W mu]
//   - (I-V^dagV) X V    Tr[W^dag mu]       + (I-V^dagV) X (I-V^dagV) Tr[W W^dag mu]
//   + (I-VV^dag) X V^dag Tr[W mu]          + (I-VV^dag) X (I-VV^dag) Tr[W^dag W mu]
// with X = rho (x) sigma.  Any mu is accepted; a mixed sigma is accepted too
// but flagged, since the intended realization uses sigma = |chi><chi|.
inline TracedChannelResult eight_term_channel(const Mat& rho_a, const DilationConfig& cfg,
                                              const FockOperator& v, const Mat* sigma_override = nullptr) {
    if (!v.is_square()) throw std::invalid_argument("eight_term_channel: V must be square");
    const int na = v.layout_in.dims[0];
    const int nb = v.layout_in.dims[1];
    if (rho_a.rows() != rho_a.cols() || rho_a.rows() != na)
        throw std::invalid_argument("eight_term_channel: rho dimension mismatch");
    Mat sigma = sigma_override ? *sigma_override : cfg.sigma();
    if (sigma.rows() != nb || sigma.cols() != nb)
        throw std::invalid_argument("eight_term_channel: sigma dimension mismatch");

    TracedChannelResult out;
    const double purity = std::real((sigma * sigma).trace());
    out.sigma_was_mixed = purity < 1.0 - 1e-12;

    const Mat& w = cfg.w.w;
    const Mat& mu = cfg.mu;
    const cplx tr_upper = (w * w.adjoint() * mu).trace();   // Tr[W W^dag mu]
    const cplx tr_lower = (w.adjoint() * w * mu).trace();   // Tr[W^dag W mu]
    const cplx tr_w = (w * mu).trace();                     // Tr[W mu]
    const cplx tr_wdag = (w.adjoint() * mu).trace();        // Tr[W^dag mu]

    const Eigen::Index n = v.m.rows();
    const Mat eye = Mat::Identity(n, n);
    const Mat q = v.m.adjoint() * v.m;
    const Mat p = v.m * v.m.adjoint();
    const Mat x = kron(rho_a, sigma);

    Mat acc = Mat::Zero(n, n);
    acc.noalias() += tr_upper * (v.m * x * v.m.adjoint());
    acc.noalias() += tr_wdag * (v.m * x * (eye - p));
    acc.noalias() += tr_lower * (v.m.adjoint() * x * v.m);
    acc.noalias() -= tr_w * (v.m.adjoint() * x * (eye - q));
    acc.noalias() -= tr_wdag * ((eye - q) * x * v.m);
    acc.noalias() += tr_upper * ((eye - q) * x * (eye - q));
    acc.noalias() += tr_w * ((eye - p) * x * v.m.adjoint());
    acc.noalias() += tr_lower * ((eye - p) * x * (eye - p));
    out.state = std::move(acc);
    return out;
}

} // namespace phasekit
