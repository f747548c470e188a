#pragma once

#include "dilation.hpp"
#include "phase.hpp"
#include "radial.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace phasekit {

// Everything a command needs, parseable from a JSON file with flag
// overrides.  All referenced pieces validate against their module
// constraints in validate() before any computation starts.
struct RunConfig {
    int dim_a = 24;
    int dim_b = 24;
    int dim_c = 2;
    int k_columns = 0; // 0 -> dim_a

    std::string profile_kind = "gaussian";
    double profile_cutoff = 2.0;                  // uniform
    std::vector<double> profile_ts, profile_fs;   // custom

    StateSpec chi = StateSpec::fock(0);
    std::string w_kind = "qubit";
    int w_dim = 2;
    StateSpec mu = StateSpec::fock(0);
    StateSpec state = StateSpec::superposition({{0, cplx(1.0, 0.0)}, {1, cplx(1.0, 0.0)}});

    int phase_points = 0;  // 0 -> max(256, 2 dim_a - 1)
    int polar_radial = 0;  // 0 -> max(256, 7 dim_a)
    int polar_angular = 0; // 0 -> phase grid size
    double polar_t_max = 0.0;
    int radial_nodes = 512;

    bool renormalize = true;
    std::uint64_t seed = 1;
    std::uint64_t samples = 100000;
    std::vector<int> sweep_dims = {16, 24, 32};

    RadialProfile build_profile() const {
        if (profile_kind == "gaussian") return gaussian_profile();
        if (profile_kind == "uniform") return uniform_profile(profile_cutoff);
        if (profile_kind == "custom") return custom_profile(profile_ts, profile_fs);
        throw std::invalid_argument("config: unknown profile kind '" + profile_kind + "'");
    }

    AncillaW build_w() const {
        if (w_kind == "qubit") return build_W(AncillaW::Kind::Qubit);
        if (w_kind == "pseudospin") return build_W(AncillaW::Kind::PseudoSpin, w_dim);
        throw std::invalid_argument("config: unknown W kind '" + w_kind + "'");
    }

    int effective_k() const { return k_columns > 0 ? k_columns : dim_a; }
    int effective_phase_points() const {
        return phase_points > 0 ? phase_points : std::max(256, 2 * dim_a - 1);
    }

    // Builds every referenced object once; throws on the first violation.
    void validate() const {
        if (dim_a < 1 || dim_b < 1 || dim_c < 1)
            throw std::invalid_argument("config: dimensions must be positive");
        if (dim_a != dim_b) throw std::invalid_argument("config: modes a and b must match");
        if (k_columns < 0 || k_columns > dim_a)
            throw std::invalid_argument("config: k_columns out of range");
        (void)build_profile();
        const AncillaW w = build_w();
        const Vec chi_ket = make_ket(chi, dim_b);
        if (std::abs(chi_ket.norm() - 1.0) > 1e-12)
            throw std::invalid_argument("config: chi must be normalized");
        const Mat mu_rho = make_state(mu, dim_c);
        if (mu_rho.rows() != w.dim())
            throw std::invalid_argument("config: mu dimension does not match W");
        (void)make_state(state, dim_a);
        if (radial_nodes < 8) throw std::invalid_argument("config: radial_nodes too small");
        if (sweep_dims.empty()) throw std::invalid_argument("config: sweep_dims is empty");
        for (int n : sweep_dims)
            if (n < 2) throw std::invalid_argument("config: sweep dimension too small");
    }
};

namespace detail {

inline StateSpec parse_state_spec(const nlohmann::json& j, const char* what) {
    if (!j.is_object() || !j.contains("kind"))
        throw std::invalid_argument(std::string("config: ") + what + " needs a kind");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "fock") return StateSpec::fock(j.at("n").get<int>());
    if (kind == "coherent") {
        const auto& a = j.at("alpha");
        if (a.is_array()) return StateSpec::coherent(cplx(a.at(0).get<double>(), a.at(1).get<double>()));
        return StateSpec::coherent(cplx(a.get<double>(), 0.0));
    }
    if (kind == "superposition") {
        std::vector<std::pair<int, cplx>> terms;
        for (const auto& t : j.at("terms")) {
            const double im = t.size() > 2 ? t.at(2).get<double>() : 0.0;
            terms.emplace_back(t.at(0).get<int>(), cplx(t.at(1).get<double>(), im));
        }
        return StateSpec::superposition(std::move(terms));
    }
    if (kind == "thermal") return StateSpec::thermal(j.at("mean").get<double>());
    if (kind == "random")
        return StateSpec::random_density(j.at("seed").get<std::uint64_t>(), j.at("rank").get<int>());
    throw std::invalid_argument(std::string("config: unknown ") + what + " kind '" + kind + "'");
}

inline std::string state_spec_to_json(const StateSpec& spec) {
    std::ostringstream os;
    os.precision(17);
    if (const auto* f = std::get_if<StateSpec::Fock>(&spec.value)) {
        os << "{\"kind\":\"fock\",\"n\":" << f->n << "}";
    } else if (const auto* c = std::get_if<StateSpec::Coherent>(&spec.value)) {
        os << "{\"kind\":\"coherent\",\"alpha\":[" << c->alpha.real() << "," << c->alpha.imag()
           << "]}";
    } else if (const auto* s = std::get_if<StateSpec::Superposition>(&spec.value)) {
        os << "{\"kind\":\"superposition\",\"terms\":[";
        for (std::size_t i = 0; i < s->terms.size(); ++i) {
            if (i) os << ",";
            os << "[" << s->terms[i].first << "," << s->terms[i].second.real() << ","
               << s->terms[i].second.imag() << "]";
        }
        os << "]}";
    } else if (const auto* t = std::get_if<StateSpec::Thermal>(&spec.value)) {
        os << "{\"kind\":\"thermal\",\"mean\":" << t->mean_photons << "}";
    } else if (const auto* r = std::get_if<StateSpec::RandomDensity>(&spec.value)) {
        os << "{\"kind\":\"random\",\"seed\":" << r->seed << ",\"rank\":" << r->rank << "}";
    }
    return os.str();
}

} // namespace detail

inline RunConfig parse_config_json(const nlohmann::json& j) {
    RunConfig cfg;
    if (j.contains("dims")) {
        const auto& d = j.at("dims");
        if (d.is_array()) {
            if (d.size() == 1) {
                cfg.dim_a = cfg.dim_b = d.at(0).get<int>();
            } else if (d.size() == 3) {
                cfg.dim_a = d.at(0).get<int>();
                cfg.dim_b = d.at(1).get<int>();
                cfg.dim_c = d.at(2).get<int>();
            } else {
                throw std::invalid_argument("config: dims must have one or three entries");
            }
        } else {
            cfg.dim_a = d.at("a").get<int>();
            cfg.dim_b = d.at("b").get<int>();
            cfg.dim_c = d.at("c").get<int>();
        }
    }
    if (j.contains("k_columns")) cfg.k_columns = j.at("k_columns").get<int>();
    if (j.contains("profile")) {
        const auto& p = j.at("profile");
        cfg.profile_kind = p.at("kind").get<std::string>();
        if (p.contains("cutoff")) cfg.profile_cutoff = p.at("cutoff").get<double>();
        if (p.contains("t")) cfg.profile_ts = p.at("t").get<std::vector<double>>();
        if (p.contains("f")) cfg.profile_fs = p.at("f").get<std::vector<double>>();
    }
    if (j.contains("chi")) cfg.chi = detail::parse_state_spec(j.at("chi"), "chi");
    if (j.contains("w")) {
        cfg.w_kind = j.at("w").at("kind").get<std::string>();
        if (j.at("w").contains("dim")) cfg.w_dim = j.at("w").at("dim").get<int>();
    }
    if (j.contains("mu")) cfg.mu = detail::parse_state_spec(j.at("mu"), "mu");
    if (j.contains("state")) cfg.state = detail::parse_state_spec(j.at("state"), "state");
    if (j.contains("phase_points")) cfg.phase_points = j.at("phase_points").get<int>();
    if (j.contains("polar")) {
        const auto& p = j.at("polar");
        if (p.contains("radial")) cfg.polar_radial = p.at("radial").get<int>();
        if (p.contains("angular")) cfg.polar_angular = p.at("angular").get<int>();
        if (p.contains("t_max")) cfg.polar_t_max = p.at("t_max").get<double>();
    }
    if (j.contains("radial_nodes")) cfg.radial_nodes = j.at("radial_nodes").get<int>();
    if (j.contains("renormalize")) cfg.renormalize = j.at("renormalize").get<bool>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("samples")) cfg.samples = j.at("samples").get<std::uint64_t>();
    if (j.contains("sweep_dims")) cfg.sweep_dims = j.at("sweep_dims").get<std::vector<int>>();
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config: parse error in '" + path + "': " + e.what());
    }
    try {
        return parse_config_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config: schema error in '" + path + "': " + e.what());
    }
}

// Canonical single-line echo with fixed key order, for report headers.
inline std::string config_echo(const RunConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"dims\":[" << cfg.dim_a << "," << cfg.dim_b << "," << cfg.dim_c << "]"
       << ",\"k_columns\":" << cfg.effective_k() << ",\"profile\":{\"kind\":\"" << cfg.profile_kind
       << "\"";
    if (cfg.profile_kind == "uniform") os << ",\"cutoff\":" << cfg.profile_cutoff;
    os << "},\"chi\":" << detail::state_spec_to_json(cfg.chi) << ",\"w\":{\"kind\":\""
       << cfg.w_kind << "\",\"dim\":" << (cfg.w_kind == "qubit" ? 2 : cfg.w_dim) << "}"
       << ",\"mu\":" << detail::state_spec_to_json(cfg.mu)
       << ",\"state\":" << detail::state_spec_to_json(cfg.state)
       << ",\"phase_points\":" << cfg.effective_phase_points()
       << ",\"radial_nodes\":" << cfg.radial_nodes
       << ",\"renormalize\":" << (cfg.renormalize ? "true" : "false") << ",\"seed\":" << cfg.seed
       << ",\"samples\":" << cfg.samples << ",\"sweep_dims\":[";
    for (std::size_t i = 0; i < cfg.sweep_dims.size(); ++i) {
        if (i) os << ",";
        os << cfg.sweep_dims[i];
    }
    os << "]}";
    return os.str();
}

} // namespace phasekit
