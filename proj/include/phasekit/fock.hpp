#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace phasekit {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

constexpr double pi = 3.14159265358979323846;

// Ordered truncation dimensions of the tensor factors.  The leftmost
// subsystem is the slowest-varying index; every module shares this layout.
struct ModeLayout {
    std::vector<int> dims;

    ModeLayout() = default;
    explicit ModeLayout(std::vector<int> d) : dims(std::move(d)) {
        for (int n : dims) {
            if (n < 1) throw std::invalid_argument("ModeLayout: dimensions must be positive");
        }
    }
    static ModeLayout single(int n) { return ModeLayout({n}); }
    static ModeLayout two(int na, int nb) { return ModeLayout({na, nb}); }

    int total() const {
        int t = 1;
        for (int n : dims) t *= n;
        return t;
    }
    int n_modes() const { return static_cast<int>(dims.size()); }

    bool operator==(const ModeLayout& o) const { return dims == o.dims; }
};

struct FockKet {
    ModeLayout layout;
    Vec amps;
    bool normalized = false;

    FockKet() = default;
    FockKet(ModeLayout lay, Vec a, bool norm = false)
        : layout(std::move(lay)), amps(std::move(a)), normalized(norm) {
        if (amps.size() != layout.total())
            throw std::invalid_argument("FockKet: amplitude length does not match layout");
        if (normalized && std::abs(amps.norm() - 1.0) > 1e-12)
            throw std::invalid_argument("FockKet: flagged normalized but norm deviates from 1");
    }
};

struct FockOperator {
    ModeLayout layout_out;
    ModeLayout layout_in;
    Mat m;

    FockOperator() = default;
    FockOperator(ModeLayout out, ModeLayout in, Mat mat)
        : layout_out(std::move(out)), layout_in(std::move(in)), m(std::move(mat)) {
        if (m.rows() != layout_out.total() || m.cols() != layout_in.total())
            throw std::invalid_argument("FockOperator: matrix shape does not match layouts");
    }
    static FockOperator square(ModeLayout lay, Mat mat) {
        ModeLayout copy = lay;
        return FockOperator(std::move(lay), std::move(copy), std::move(mat));
    }

    bool is_square() const { return layout_out == layout_in; }

    // Measured defects; claims about structure are checked, never assumed.
    double hermiticity_defect() const { return (m - m.adjoint()).cwiseAbs().maxCoeff(); }
    double unitarity_defect() const {
        Mat g = m.adjoint() * m;
        g.diagonal().array() -= 1.0;
        return g.cwiseAbs().maxCoeff();
    }
    double projector_defect() const { return (m * m - m).cwiseAbs().maxCoeff(); }
};

inline Mat identity(int n) { return Mat::Identity(n, n); }

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Vec kron_vec(const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a[i] * b;
    return out;
}

// Ladder operator: <n-1|a|n> = sqrt(n).
inline Mat annihilation(int n) {
    if (n < 1) throw std::invalid_argument("annihilation: invalid dimension");
    Mat a = Mat::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

inline Mat creation(int n) { return annihilation(n).adjoint(); }

inline Mat number_op(int n) {
    if (n < 1) throw std::invalid_argument("number_op: invalid dimension");
    Mat m = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k) m(k, k) = static_cast<double>(k);
    return m;
}

// diag(e^{i theta n}), the free phase rotation.
inline Mat phase_rotation(double theta, int n) {
    Mat m = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k) m(k, k) = std::exp(cplx(0.0, theta * k));
    return m;
}

// exp(G) for anti-Hermitian G, via the eigendecomposition of -iG.  Exactly
// unitary up to the eigensolver's accuracy; used for generator exponentials
// and as an independent route against closed-form matrix elements.
inline Mat expm_antihermitian(const Mat& g) {
    if (g.rows() != g.cols()) throw std::invalid_argument("expm_antihermitian: matrix not square");
    const Mat h = cplx(0.0, -1.0) * g;
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    const Eigen::VectorXd lam = es.eigenvalues();
    Vec phases(lam.size());
    for (Eigen::Index k = 0; k < lam.size(); ++k) phases[k] = std::exp(cplx(0.0, lam[k]));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// Displacement operator D(z) = exp(z a^dag - z* a) in an n-dimensional
// truncation, from the closed-form Fock matrix elements
//   <m+k|D(z)|m> = sqrt(m!/(m+k)!) z^k e^{-|z|^2/2} L_m^{(k)}(|z|^2),
// with the lower triangle fixed by D(z)^dag = D(-z).  Laguerre values run
// upward in the degree; prefactors are accumulated multiplicatively so no
// factorial is ever formed.
inline Mat displacement(cplx z, int n) {
    if (n < 1) throw std::invalid_argument("displacement: invalid dimension");
    Mat d(n, n);
    const double x = std::norm(z);
    const double gauss = std::exp(-0.5 * x);
    cplx zk_over_sqrt_kfact(1.0, 0.0); // z^k / sqrt(k!)
    for (int k = 0; k < n; ++k) {
        if (k > 0) zk_over_sqrt_kfact *= z / std::sqrt(static_cast<double>(k));
        double ratio = 1.0; // sqrt(k! m! / (m+k)!)
        double lag_prev = 0.0;
        double lag = 1.0; // L_0^{(k)}
        for (int m = 0; m + k < n; ++m) {
            if (m > 0) {
                ratio *= std::sqrt(static_cast<double>(m) / (m + k));
                const double next =
                    ((2.0 * (m - 1.0) + k + 1.0 - x) * lag - (m - 1.0 + k) * lag_prev) / m;
                lag_prev = lag;
                lag = next;
            }
            const cplx upper = zk_over_sqrt_kfact * ratio * gauss * lag;
            d(m + k, m) = upper;
            if (k > 0) {
                // <m|D(z)|m+k> = conj(<m+k|D(-z)|m>)
                const double sign = (k % 2 == 0) ? 1.0 : -1.0;
                d(m, m + k) = sign * std::conj(upper);
            }
        }
    }
    return d;
}

// |A>> = sum_{nm} A_{nm} |n>|m>: the two-mode vector whose amplitudes are
// the entries of A (row index on the first mode).
inline FockKet doubled_ket(const Mat& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("doubled_ket: operator not square");
    const int n = static_cast<int>(a.rows());
    Vec v(n * n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) v[r * n + c] = a(r, c);
    return FockKet(ModeLayout::two(n, n), std::move(v), false);
}

namespace detail {

// The 50/50 beam splitter generator (pi/4)(a^dag b - a b^dag) conserves total
// photon number, so R splits into blocks over the shells n + m = s.  States
// in shell s are |n, s-n> with max(0, s-n_max) <= n <= min(s, n_max).
struct BeamSplitterShell {
    int s = 0;
    int n_lo = 0;
    std::vector<int> flat; // flat two-mode indices of the shell states
    Mat block;             // exp(sign * G) restricted to the shell
};

inline std::vector<BeamSplitterShell> beam_splitter_shells(int n, double sign) {
    std::vector<BeamSplitterShell> shells;
    shells.reserve(2 * n - 1);
    for (int s = 0; s <= 2 * (n - 1); ++s) {
        BeamSplitterShell shell;
        shell.s = s;
        shell.n_lo = std::max(0, s - (n - 1));
        const int n_hi = std::min(s, n - 1);
        const int len = n_hi - shell.n_lo + 1;
        shell.flat.resize(len);
        for (int i = 0; i < len; ++i) {
            const int row_n = shell.n_lo + i;
            shell.flat[i] = row_n * n + (s - row_n);
        }
        Mat g = Mat::Zero(len, len);
        for (int i = 0; i + 1 < len; ++i) {
            // a^dag b |n, m> = sqrt((n+1) m) |n+1, m-1>
            const int row_n = shell.n_lo + i;
            const int m = s - row_n;
            const double c = (pi / 4.0) * std::sqrt(static_cast<double>(row_n + 1) * m);
            g(i + 1, i) = sign * c;
            g(i, i + 1) = -sign * c;
        }
        shell.block = expm_antihermitian(g);
        shells.push_back(std::move(shell));
    }
    return shells;
}

} // namespace detail

// Dense matrix of R = exp[(pi/4)(a^dag b - a b^dag)] on two modes of
// dimension n each.  Exactly unitary in truncation (anti-Hermitian,
// number-conserving generator).
inline FockOperator beam_splitter(int n) {
    if (n < 1) throw std::invalid_argument("beam_splitter: invalid dimension");
    Mat r = Mat::Zero(n * n, n * n);
    for (const auto& shell : detail::beam_splitter_shells(n, 1.0)) {
        const int len = static_cast<int>(shell.flat.size());
        for (int i = 0; i < len; ++i)
            for (int j = 0; j < len; ++j) r(shell.flat[i], shell.flat[j]) = shell.block(i, j);
    }
    return FockOperator::square(ModeLayout::two(n, n), std::move(r));
}

// Applies R (adjoint=false) or R^dag to a two-mode ket without materializing
// the full matrix; needed once per-mode dimensions grow past ~32.
inline Vec apply_beam_splitter(const Vec& psi, int n, bool adjoint) {
    if (psi.size() != static_cast<Eigen::Index>(n) * n)
        throw std::invalid_argument("apply_beam_splitter: ket length mismatch");
    Vec out = Vec::Zero(psi.size());
    for (const auto& shell : detail::beam_splitter_shells(n, adjoint ? -1.0 : 1.0)) {
        const int len = static_cast<int>(shell.flat.size());
        Vec seg(len);
        for (int i = 0; i < len; ++i) seg[i] = psi[shell.flat[i]];
        Vec res = shell.block * seg;
        for (int i = 0; i < len; ++i) out[shell.flat[i]] = res[i];
    }
    return out;
}

enum class Quadrature { X, Y };

// Delta-normalized quadrature eigenket.  For X = (a + a^dag)/sqrt(2) the
// amplitudes are the Hermite functions
//   <n|x> = H_n(x) e^{-x^2/2} / (pi^{1/4} sqrt(2^n n!)),
// by the stable forward recurrence.  The Y-mode ket applies the Fock-space
// phase map amplitudes_n -> i^n amplitudes_n, the rotation that carries X
// eigenkets onto Y eigenkets; the sign of the phase is pinned by the
// double-homodyne consistency check in the measurement module.
inline FockKet quadrature_eigenket(double value, Quadrature which, int n) {
    if (n < 1) throw std::invalid_argument("quadrature_eigenket: invalid dimension");
    Eigen::VectorXd h(n);
    h[0] = std::pow(pi, -0.25) * std::exp(-0.5 * value * value);
    if (n > 1) h[1] = std::sqrt(2.0) * value * h[0];
    for (int k = 2; k < n; ++k)
        h[k] = std::sqrt(2.0 / k) * value * h[k - 1] - std::sqrt((k - 1.0) / k) * h[k - 2];
    Vec amps(n);
    if (which == Quadrature::X) {
        for (int k = 0; k < n; ++k) amps[k] = h[k];
    } else {
        cplx phase(1.0, 0.0);
        for (int k = 0; k < n; ++k) {
            amps[k] = phase * h[k];
            phase *= cplx(0.0, 1.0);
        }
    }
    return FockKet(ModeLayout::single(n), std::move(amps), false);
}

// Partial trace of a density over the subsystems not listed in `keep`.
// Kept subsystems stay in their original order.
inline FockOperator partial_trace(const FockOperator& state, const std::vector<int>& keep) {
    if (!state.is_square()) throw std::invalid_argument("partial_trace: state not square");
    const auto& dims = state.layout_in.dims;
    const int n_modes = static_cast<int>(dims.size());
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
    std::vector<bool> kept(n_modes, false);
    for (int idx : keep) {
        if (idx < 0 || idx >= n_modes) throw std::invalid_argument("partial_trace: index out of range");
        if (kept[idx]) throw std::invalid_argument("partial_trace: duplicate subsystem index");
        kept[idx] = true;
    }

    std::vector<int> keep_dims, trace_dims;
    std::vector<int> keep_idx, trace_idx;
    for (int i = 0; i < n_modes; ++i) {
        if (kept[i]) {
            keep_dims.push_back(dims[i]);
            keep_idx.push_back(i);
        } else {
            trace_dims.push_back(dims[i]);
            trace_idx.push_back(i);
        }
    }
    int d_keep = 1, d_tr = 1;
    for (int d : keep_dims) d_keep *= d;
    for (int d : trace_dims) d_tr *= d;

    // Strides of each subsystem in the flat index (leftmost slowest).
    std::vector<int> stride(n_modes, 1);
    for (int i = n_modes - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

    auto flat_of = [&](const std::vector<int>& which, const std::vector<int>& sub_dims, int code,
                       int base) {
        int idx = base;
        for (int i = static_cast<int>(which.size()) - 1; i >= 0; --i) {
            idx += (code % sub_dims[i]) * stride[which[i]];
            code /= sub_dims[i];
        }
        return idx;
    };

    Mat out = Mat::Zero(d_keep, d_keep);
    for (int t = 0; t < d_tr; ++t) {
        const int toff = flat_of(trace_idx, trace_dims, t, 0);
        for (int r = 0; r < d_keep; ++r) {
            const int row = flat_of(keep_idx, keep_dims, r, toff);
            for (int c = 0; c < d_keep; ++c) {
                const int col = flat_of(keep_idx, keep_dims, c, toff);
                out(r, c) += state.m(row, col);
            }
        }
    }
    return FockOperator::square(ModeLayout(keep_dims), std::move(out));
}

} // namespace phasekit
