#pragma once

// Test-only oracles, kept independent of the library paths they check:
// matrix exponentials for displacement and rotation generators, composite
// Simpson quadrature for radial integrals, and a dense reference for the
// traced three-mode channel.

#include <phasekit/fock.hpp>

#include <functional>

namespace oracles {

using phasekit::cplx;
using phasekit::Mat;
using phasekit::Vec;

// Displacement through the truncated generator exponential.
inline Mat displacement_expm(cplx z, int n) {
    const Mat g = z * phasekit::creation(n) - std::conj(z) * phasekit::annihilation(n);
    return phasekit::expm_antihermitian(g);
}

// Composite Simpson on [a, b]; panels must be even.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    double acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

} // namespace oracles
