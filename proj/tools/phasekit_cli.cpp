// Command-line front end: verification reports, phase distributions,
// heterodyne sampling and truncation sweeps, as CSV or JSON.
//
// Exit codes: 0 success / all checks pass, 1 checks failed, 2 invalid input.

#include <phasekit/phasekit.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace phasekit;

struct CliOptions {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::vector<int> dims;
    std::optional<bool> renormalize;
};

RunConfig resolve_config(const CliOptions& opts) {
    RunConfig cfg;
    if (!opts.config_path.empty()) cfg = load_config(opts.config_path);
    if (opts.seed) cfg.seed = *opts.seed;
    if (!opts.dims.empty()) {
        if (opts.dims.size() == 1) {
            cfg.dim_a = cfg.dim_b = opts.dims[0];
        } else if (opts.dims.size() == 3) {
            cfg.dim_a = opts.dims[0];
            cfg.dim_b = opts.dims[1];
            cfg.dim_c = opts.dims[2];
        } else {
            throw std::invalid_argument("--dims takes one value or three");
        }
    }
    if (opts.renormalize) cfg.renormalize = *opts.renormalize;
    cfg.validate();
    return cfg;
}

void emit(const Report& report, const CliOptions& opts) {
    const std::string text = render_report(report, opts.format);
    if (opts.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(opts.out_path, std::ios::binary);
        if (!out) throw std::invalid_argument("cannot open output file '" + opts.out_path + "'");
        out << text;
    }
}

int cmd_verify(const CliOptions& opts) {
    const RunConfig cfg = resolve_config(opts);
    const VerifyReport vr = run_verification(cfg);
    Report report;
    report.command = "verify";
    report.config_echo = config_echo(cfg);
    report.columns = {"check", "measured", "tolerance", "bound", "status"};
    for (const VerifyCheck& c : vr.checks)
        report.add_row({c.name, fmt17(c.measured), fmt17(c.tolerance),
                        c.lower_bound ? "lower" : "upper", c.pass ? "pass" : "fail"});
    report.footer.emplace_back("overall", vr.all_pass ? "pass" : "fail");
    emit(report, opts);
    return vr.all_pass ? 0 : 1;
}

int cmd_phase(const CliOptions& opts) {
    const RunConfig cfg = resolve_config(opts);
    const RadialProfile profile = cfg.build_profile();
    IsometryOptions iopts;
    iopts.radial_nodes = cfg.radial_nodes;
    const int k = cfg.effective_k();
    const IsometryMatrix vt = build_isometry(profile, k, cfg.dim_a, cfg.dim_b, cfg.renormalize, iopts);
    const Mat rho = make_state(cfg.state, k);

    const int angular = cfg.polar_angular > 0 ? cfg.polar_angular : cfg.effective_phase_points();
    const PolarGrid grid = make_polar_grid(
        cfg.polar_radial > 0 ? cfg.polar_radial : std::max(256, 7 * cfg.dim_a), angular,
        cfg.polar_t_max > 0.0 ? cfg.polar_t_max
                              : std::max(8.0, 3.0 * std::sqrt(static_cast<double>(cfg.dim_a))));
    const PhaseDistribution marginal = phase_marginal(vt, rho, grid);
    const PhaseDistribution ideal = ideal_phase_density(rho, marginal.grid);

    Report report;
    report.command = "phase";
    report.config_echo = config_echo(cfg);
    if (marginal.coarse_grid_warning)
        report.warnings.push_back("marginal raw normalization off by " +
                                  fmt17(std::abs(marginal.raw_normalization - 1.0)) +
                                  "; truncation suspected");
    if (ideal.coarse_grid_warning)
        report.warnings.push_back("phase grid coarser than twice the Fock cutoff");
    report.columns = {"phi", "p_ideal", "p_marginal", "abs_delta"};
    double max_delta = 0.0;
    for (int j = 0; j < marginal.grid.points; ++j) {
        const double delta = std::abs(ideal.density[j] - marginal.density[j]);
        max_delta = std::max(max_delta, delta);
        report.add_row({fmt17(marginal.grid.node(j)), fmt17(ideal.density[j]),
                        fmt17(marginal.density[j]), fmt17(delta)});
    }
    report.footer.emplace_back("max_abs_delta", fmt17(max_delta));
    report.footer.emplace_back("marginal_raw_normalization", fmt17(marginal.raw_normalization));
    emit(report, opts);
    return 0;
}

int cmd_sample(const CliOptions& opts) {
    const RunConfig cfg = resolve_config(opts);
    const RadialProfile profile = cfg.build_profile();
    IsometryOptions iopts;
    iopts.radial_nodes = cfg.radial_nodes;
    const int k = cfg.effective_k();
    const IsometryMatrix vt = build_isometry(profile, k, cfg.dim_a, cfg.dim_b, cfg.renormalize, iopts);
    const Mat rho = make_state(cfg.state, k);
    const HeterodyneSampleSet set =
        sample_heterodyne(vt, rho, static_cast<std::size_t>(cfg.samples), cfg.seed);

    Report report;
    report.command = "sample";
    report.config_echo = config_echo(cfg);
    report.columns = {"re_z", "im_z"};
    for (const cplx& z : set.samples) report.add_row({fmt17(z.real()), fmt17(z.imag())});
    report.footer.emplace_back("provenance", set.provenance);
    emit(report, opts);
    return 0;
}

int cmd_converge(const CliOptions& opts) {
    const RunConfig cfg = resolve_config(opts);
    const RadialProfile profile = cfg.build_profile();
    const AncillaW w = cfg.build_w();

    Report report;
    report.command = "converge";
    report.config_echo = config_echo(cfg);
    report.columns = {"dim", "max_col_defect", "max_truncation_defect", "u_defect", "marginal_tv"};

    std::vector<std::array<double, 4>> table;
    for (int n : cfg.sweep_dims) {
        IsometryOptions iopts;
        iopts.radial_nodes = cfg.radial_nodes;
        const IsometryMatrix vt = build_isometry(profile, n, n, n, cfg.renormalize, iopts);
        const int k_report = std::min(8, n);
        double col_defect = 0.0, trunc_defect = 0.0;
        for (int k = 0; k < k_report; ++k) {
            col_defect = std::max(col_defect, std::abs(vt.column_defects[k]));
            trunc_defect = std::max(trunc_defect, std::abs(vt.truncation_defects[k]));
        }
        const FockKet chi(ModeLayout::single(n), make_ket(cfg.chi, n), true);
        const double u_defect = dilation_unitarity_defect(build_V(vt, chi), w);

        const Mat rho = make_state(cfg.state, n);
        const PolarGrid grid =
            make_polar_grid(std::max(256, 7 * n), std::max(256, 2 * n - 1),
                            std::max(8.0, 3.0 * std::sqrt(static_cast<double>(n))));
        const PhaseDistribution marginal = phase_marginal(vt, rho, grid);
        const PhaseDistribution ideal = ideal_phase_density(rho, marginal.grid);
        const double tv = total_variation(marginal.density, ideal.density, marginal.grid.step());

        table.push_back({col_defect, trunc_defect, u_defect, tv});
        report.add_row({std::to_string(n), fmt17(col_defect), fmt17(trunc_defect), fmt17(u_defect),
                        fmt17(tv)});
    }

    // Non-increasing columns, with an absolute slack floor so columns that sit
    // at rounding level do not flap.
    bool monotone = true;
    for (std::size_t i = 1; i < table.size(); ++i)
        for (std::size_t c = 0; c < 4; ++c)
            if (table[i][c] > table[i - 1][c] + std::max(1e-12, 1e-9 * table[i - 1][c]))
                monotone = false;
    report.footer.emplace_back("monotone", monotone ? "true" : "false");
    emit(report, opts);
    return monotone ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"phasekit: truncated Fock-space phase measurement toolkit"};
    app.require_subcommand(1);

    CliOptions opts;
    auto add_common = [&opts](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "JSON configuration file");
        sub->add_option("--out", opts.out_path, "output file (default stdout)");
        sub->add_option("--format", opts.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", [&opts](const CLI::results_t& r) {
            opts.seed = std::stoull(r[0]);
            return true;
        }, "override the configured seed");
        sub->add_option("--dims", opts.dims, "dimensions: N or Na,Nb,Nc")->delimiter(',');
        sub->add_option("--renormalize", [&opts](const CLI::results_t& r) {
            opts.renormalize = (r[0] == "true" || r[0] == "1");
            return true;
        }, "renormalize the embedding columns (true|false)");
    };

    CLI::App* verify = app.add_subcommand("verify", "run the invariant checks, exit 0 iff all pass");
    CLI::App* phase = app.add_subcommand("phase", "ideal and marginal phase distributions");
    CLI::App* sample = app.add_subcommand("sample", "draw heterodyne outcomes");
    CLI::App* converge = app.add_subcommand("converge", "truncation sweep over sweep_dims");
    for (CLI::App* sub : {verify, phase, sample, converge}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(verify)) return cmd_verify(opts);
        if (app.got_subcommand(phase)) return cmd_phase(opts);
        if (app.got_subcommand(sample)) return cmd_sample(opts);
        if (app.got_subcommand(converge)) return cmd_converge(opts);
    } catch (const std::exception& e) {
        std::cerr << "phasekit: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
