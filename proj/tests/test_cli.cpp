#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

#ifndef PHASEKIT_CLI_PATH
#error "PHASEKIT_CLI_PATH must point at the built binary"
#endif

std::string temp_dir() {
    static const std::string dir = [] {
        std::string d = "phasekit_cli_test_XXXXXX";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "/tmp/%s", d.c_str());
        REQUIRE(mkdtemp(buf) != nullptr);
        return std::string(buf);
    }();
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(PHASEKIT_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

// Small dimensions keep each invocation around a second.
const char* kFastConfig = R"({
    "dims": {"a": 12, "b": 12, "c": 2},
    "samples": 10,
    "seed": 1,
    "sweep_dims": [8, 10, 12]
})";

} // namespace

TEST_CASE("cli verify") {
    const std::string dir = temp_dir();
    const std::string cfg = dir + "/fast.json";
    write_file(cfg, kFastConfig);

    SECTION("default configuration passes every check") {
        const std::string out = dir + "/verify.csv";
        REQUIRE(run_cli("verify --config " + cfg + " --out " + out) == 0);
        const std::string text = slurp(out);
        REQUIRE(text.find("# overall = pass") != std::string::npos);
        REQUIRE(text.find("fail") == std::string::npos);
        REQUIRE(text.find("phase_povm_completeness") != std::string::npos);
        REQUIRE(text.find("dilation_unitarity") != std::string::npos);
        REQUIRE(text.find("sampler_determinism") != std::string::npos);
    }

    SECTION("a forbidden ancilla state fails its check and exits 1") {
        const std::string bad = dir + "/bad_mu.json";
        write_file(bad, R"({"dims": {"a": 12, "b": 12, "c": 2}, "samples": 10,
                           "mu": {"kind": "fock", "n": 1}, "sweep_dims": [8]})");
        const std::string out = dir + "/verify_bad.csv";
        REQUIRE(run_cli("verify --config " + bad + " --out " + out) == 1);
        const std::string text = slurp(out);
        REQUIRE(text.find("mu_trace_conditions") != std::string::npos);
        REQUIRE(text.find("# overall = fail") != std::string::npos);
    }

    SECTION("an odd pseudo-spin dimension is a configuration error, exit 2") {
        const std::string bad = dir + "/bad_w.json";
        write_file(bad, R"({"dims": {"a": 12, "b": 12, "c": 5},
                           "w": {"kind": "pseudospin", "dim": 5}, "sweep_dims": [8]})");
        REQUIRE(run_cli("verify --config " + bad) == 2);
    }

    SECTION("unknown flags and missing subcommands exit 2") {
        REQUIRE(run_cli("verify --nonsense 3") == 2);
    }
}

TEST_CASE("cli phase") {
    const std::string dir = temp_dir();
    const std::string cfg = dir + "/vac.json";
    write_file(cfg, R"({"dims": {"a": 12, "b": 12, "c": 2},
                       "state": {"kind": "fock", "n": 0}})");

    SECTION("vacuum columns are flat at 1/2pi") {
        const std::string out = dir + "/phase.csv";
        REQUIRE(run_cli("phase --config " + cfg + " --out " + out) == 0);
        const std::string text = slurp(out);
        REQUIRE(text.find("phi,p_ideal,p_marginal,abs_delta") != std::string::npos);
        REQUIRE(text.find("0.15915494309189") != std::string::npos);
        REQUIRE(text.find("# max_abs_delta = ") != std::string::npos);
    }

    SECTION("two runs are byte-identical") {
        const std::string out1 = dir + "/phase1.csv", out2 = dir + "/phase2.csv";
        REQUIRE(run_cli("phase --config " + cfg + " --out " + out1) == 0);
        REQUIRE(run_cli("phase --config " + cfg + " --out " + out2) == 0);
        REQUIRE(slurp(out1) == slurp(out2));
    }

    SECTION("json format mirrors the csv content") {
        const std::string out = dir + "/phase.json";
        REQUIRE(run_cli("phase --config " + cfg + " --format json --out " + out) == 0);
        const std::string text = slurp(out);
        REQUIRE(text.find("\"command\": \"phase\"") != std::string::npos);
        REQUIRE(text.find("\"max_abs_delta\"") != std::string::npos);
    }
}

TEST_CASE("cli sample") {
    const std::string dir = temp_dir();
    const std::string cfg = dir + "/sample.json";
    write_file(cfg, R"({"dims": {"a": 12, "b": 12, "c": 2}, "samples": 10, "seed": 1})");

    SECTION("deterministic output for a fixed seed") {
        const std::string out1 = dir + "/s1.csv", out2 = dir + "/s2.csv";
        REQUIRE(run_cli("sample --config " + cfg + " --out " + out1) == 0);
        REQUIRE(run_cli("sample --config " + cfg + " --out " + out2) == 0);
        const std::string a = slurp(out1);
        REQUIRE(a == slurp(out2));
        REQUIRE(a.find("re_z,im_z") != std::string::npos);
        int rows = 0;
        for (char c : a)
            if (c == '\n') ++rows;
        REQUIRE(rows == 2 + 1 + 10 + 1); // comments, header, samples, footer
    }

    SECTION("seed override changes the stream") {
        const std::string out1 = dir + "/s3.csv", out2 = dir + "/s4.csv";
        REQUIRE(run_cli("sample --config " + cfg + " --out " + out1) == 0);
        REQUIRE(run_cli("sample --config " + cfg + " --seed 2 --out " + out2) == 0);
        REQUIRE(slurp(out1) != slurp(out2));
    }

    SECTION("zero samples yields a header-only table") {
        const std::string cfg0 = dir + "/zero.json";
        write_file(cfg0, R"({"dims": {"a": 12, "b": 12, "c": 2}, "samples": 0})");
        const std::string out = dir + "/s0.csv";
        REQUIRE(run_cli("sample --config " + cfg0 + " --out " + out) == 0);
        const std::string text = slurp(out);
        REQUIRE(text.find("re_z,im_z\n") != std::string::npos);
        REQUIRE(text.find("re_z,im_z\n# provenance") != std::string::npos); // no data rows
    }
}

TEST_CASE("cli converge") {
    const std::string dir = temp_dir();
    const std::string cfg = dir + "/conv.json";
    write_file(cfg, kFastConfig);

    SECTION("sweep emits one row per dimension with non-increasing columns") {
        const std::string out = dir + "/conv.csv";
        REQUIRE(run_cli("converge --config " + cfg + " --out " + out) == 0);
        const std::string text = slurp(out);
        REQUIRE(text.find("dim,max_col_defect,max_truncation_defect,u_defect,marginal_tv") !=
                std::string::npos);
        REQUIRE(text.find("# monotone = true") != std::string::npos);
        int data_rows = 0;
        std::istringstream is(text);
        std::string line;
        while (std::getline(is, line))
            if (!line.empty() && line[0] != '#' && line[0] != 'd') ++data_rows;
        REQUIRE(data_rows == 3);
    }

    SECTION("single dimension sweep") {
        const std::string cfg1 = dir + "/conv1.json";
        write_file(cfg1, R"({"dims": {"a": 12, "b": 12, "c": 2}, "sweep_dims": [10]})");
        REQUIRE(run_cli("converge --config " + cfg1 + " --out " + dir + "/conv1.csv") == 0);
    }

    SECTION("renormalized sweeps keep stored column defects at rounding level") {
        const std::string out = dir + "/conv.csv";
        REQUIRE(run_cli("converge --config " + cfg + " --out " + out) == 0);
        std::istringstream is(slurp(out));
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty() || line[0] == '#' || line[0] == 'd') continue;
            std::istringstream cells(line);
            std::string dim, col_defect;
            std::getline(cells, dim, ',');
            std::getline(cells, col_defect, ',');
            REQUIRE(std::abs(std::stod(col_defect)) <= 1e-12);
        }
    }
}
