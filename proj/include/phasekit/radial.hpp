#pragma once

#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace phasekit {

// Radial weight f(t) of the two-mode embedding.  Admissible profiles satisfy
//   integral_0^inf t |f(t)|^2 dt = 1/pi,
// which is what makes the embedding norm-preserving and the angular marginal
// an honest probability density.
struct RadialProfile {
    enum class Kind { Gaussian, Uniform, Custom };

    Kind kind = Kind::Gaussian;
    double cutoff = 0.0;            // uniform support [0, cutoff]
    std::vector<double> ts, fs;     // custom: tabulated nodes and values
    double admissibility_defect = 0.0;

    double operator()(double t) const {
        switch (kind) {
            case Kind::Gaussian:
                return std::sqrt(2.0 / 3.14159265358979323846) * std::exp(-0.5 * t * t);
            case Kind::Uniform:
                return (t >= 0.0 && t <= cutoff)
                           ? std::sqrt(2.0 / (3.14159265358979323846 * cutoff * cutoff))
                           : 0.0;
            case Kind::Custom: {
                if (t <= ts.front() || ts.size() < 2) return t <= ts.front() ? fs.front() : 0.0;
                if (t >= ts.back()) return 0.0;
                auto it = std::upper_bound(ts.begin(), ts.end(), t);
                const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
                const double w = (t - ts[hi - 1]) / (ts[hi] - ts[hi - 1]);
                return (1.0 - w) * fs[hi - 1] + w * fs[hi];
            }
        }
        return 0.0;
    }

    // Upper end of the numerically relevant support.
    double support_max(double open_ended_fallback) const {
        switch (kind) {
            case Kind::Gaussian: return open_ended_fallback;
            case Kind::Uniform: return cutoff;
            case Kind::Custom: return ts.back();
        }
        return open_ended_fallback;
    }

    std::string kind_name() const {
        switch (kind) {
            case Kind::Gaussian: return "gaussian";
            case Kind::Uniform: return "uniform";
            case Kind::Custom: return "custom";
        }
        return "?";
    }
};

namespace detail {

inline double admissibility_defect(const RadialProfile& p, int nodes = 512) {
    const double t_hi = p.support_max(12.0);
    const QuadratureRule rule = gauss_legendre(nodes, 0.0, t_hi);
    double integral = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double f = p(rule.nodes[i]);
        integral += rule.weights[i] * rule.nodes[i] * f * f;
    }
    return std::abs(integral - 1.0 / 3.14159265358979323846);
}

} // namespace detail

inline RadialProfile gaussian_profile() {
    RadialProfile p;
    p.kind = RadialProfile::Kind::Gaussian;
    p.admissibility_defect = detail::admissibility_defect(p);
    return p;
}

inline RadialProfile uniform_profile(double cutoff) {
    if (cutoff <= 0.0) throw std::invalid_argument("uniform_profile: cutoff must be positive");
    RadialProfile p;
    p.kind = RadialProfile::Kind::Uniform;
    p.cutoff = cutoff;
    p.admissibility_defect = detail::admissibility_defect(p);
    return p;
}

// Tabulated profile, linearly interpolated and integrated with the same
// quadrature as the built-ins.  Rejected when the admissibility integral is
// off by more than 1e-6.
inline RadialProfile custom_profile(std::vector<double> ts, std::vector<double> fs) {
    if (ts.size() != fs.size() || ts.size() < 2)
        throw std::invalid_argument("custom_profile: need matching tables with at least two nodes");
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (ts[i] <= ts[i - 1])
            throw std::invalid_argument("custom_profile: nodes must be strictly increasing");
    if (ts.front() < 0.0) throw std::invalid_argument("custom_profile: nodes must be nonnegative");
    RadialProfile p;
    p.kind = RadialProfile::Kind::Custom;
    p.ts = std::move(ts);
    p.fs = std::move(fs);
    p.admissibility_defect = detail::admissibility_defect(p);
    if (p.admissibility_defect > 1e-6)
        throw std::invalid_argument("custom_profile: radial admissibility violated, defect " +
                                    std::to_string(p.admissibility_defect));
    return p;
}

} // namespace phasekit
