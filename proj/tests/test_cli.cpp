#include <fcntl.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "kamtriv/cli.hpp"
#include "kamtriv/config.hpp"
#include "kamtriv/io.hpp"

using namespace kamtriv;
namespace fs = std::filesystem;

namespace {

// the driver narrates to stdout/stderr; keep the test log readable
struct Quiet {
    int out, err, devnull;
    Quiet() {
        std::fflush(stdout);
        std::fflush(stderr);
        out = dup(1);
        err = dup(2);
        devnull = open("/dev/null", O_WRONLY);
        dup2(devnull, 1);
        dup2(devnull, 2);
    }
    ~Quiet() {
        std::fflush(stdout);
        std::fflush(stderr);
        dup2(out, 1);
        dup2(err, 2);
        close(out);
        close(err);
        close(devnull);
    }
};

int run_quiet(const std::vector<std::string>& args) {
    Quiet q;
    return cli::run(args);
}

std::string fresh_dir(const std::string& leaf) {
    const fs::path dir = fs::temp_directory_path() / "kamtriv-cli-test" / leaf;
    fs::remove_all(dir);
    return dir.string();
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("usage errors exit 1") {
    CHECK(run_quiet({}) == 1);
    CHECK(run_quiet({"no-such-command"}) == 1);
    CHECK(run_quiet({"scan", "--preset", "golden"}) == 1);  // --out missing
    CHECK(run_quiet({"scan", "--out", fresh_dir("u1")}) == 1);  // no config source
    CHECK(run_quiet({"scan", "--preset", "golden", "--config", "x.cfg",
                     "--out", fresh_dir("u2")}) == 1);  // both sources
    CHECK(run_quiet({"scan", "--preset", "nonesuch", "--out", fresh_dir("u3")}) == 1);
    CHECK(run_quiet({"trivialize", "--preset", "golden", "--in", "/no/such/file.series",
                     "--out", fresh_dir("u4")}) == 1);
}

TEST_CASE("presets lists the shipped configurations") {
    CHECK(run_quiet({"presets"}) == 0);
}

TEST_CASE("scan writes the report artifact set") {
    const std::string out = fresh_dir("scan-golden");
    CHECK(run_quiet({"scan", "--preset", "golden", "--out", out, "--bound", "12"}) == 0);
    for (const char* f : {"report.json", "modes.csv", "provenance.json", "config.resolved",
                          "manifest.json"})
        CHECK(fs::exists(fs::path(out) / f));
    const std::string report = read_file(out + "/report.json");
    CHECK(contains(report, "\"verdict\":\"diophantine\""));
    CHECK(contains(report, "\"bound\":12"));
    // modes.csv has a header and one line per scanned mode
    const std::string modes = read_file(out + "/modes.csv");
    CHECK(modes.rfind("s,p,q,target,divisor", 0) == 0);
}

TEST_CASE("scan on a resonant preset exits 2 with a machine-readable error") {
    const std::string out = fresh_dir("scan-third");
    CHECK(run_quiet({"scan", "--preset", "third-root", "--out", out, "--bound", "10"}) == 2);
    const std::string err = read_file(out + "/error.json");
    CHECK(contains(err, "\"kind\":\"resonance\""));
    CHECK(fs::exists(fs::path(out) / "report.json"));  // the report is still written
}

TEST_CASE("synth honors the seed and records it in the manifest") {
    const std::string a = fresh_dir("synth-a");
    const std::string b = fresh_dir("synth-b");
    CHECK(run_quiet({"synth", "--preset", "sqrt2", "--out", a}) == 0);
    CHECK(run_quiet({"synth", "--preset", "sqrt2", "--out", b, "--seed", "7"}) == 0);
    CHECK(fs::exists(fs::path(a) / "cocycle.series"));
    CHECK(contains(read_file(a + "/manifest.json"), "\"seeds\":[42]"));
    CHECK(contains(read_file(b + "/manifest.json"), "\"seeds\":[7]"));
    CHECK(read_file(a + "/cocycle.series") != read_file(b + "/cocycle.series"));
}

TEST_CASE("solve produces the linearized solution artifacts") {
    const std::string out = fresh_dir("solve-golden");
    CHECK(run_quiet({"solve", "--preset", "golden", "--out", out}) == 0);
    CHECK(fs::exists(fs::path(out) / "solution.series"));
    const std::string sol = read_file(out + "/solution.json");
    CHECK(contains(sol, "\"min_divisor\":"));
    CHECK(contains(sol, "\"equation_residuals\":"));
}

TEST_CASE("trivialize converges, check verifies, tampering is caught") {
    const std::string out = fresh_dir("triv-golden");
    CHECK(run_quiet({"trivialize", "--preset", "golden", "--out", out}) == 0);
    for (const char* f : {"phi_inf.series", "report.csv", "summary.json", "cocycle.series"})
        CHECK(fs::exists(fs::path(out) / f));
    CHECK(contains(read_file(out + "/summary.json"), "\"verdict\":\"converged\""));
    CHECK(read_file(out + "/report.csv").rfind("k,m,delta_k", 0) == 0);

    CHECK(run_quiet({"check", "--in", out}) == 0);

    write_file(out + "/report.csv", read_file(out + "/report.csv") + " ");
    CHECK(run_quiet({"check", "--in", out}) == 2);
}

TEST_CASE("trivialize accepts a synthesized cocycle file when shapes agree") {
    const std::string src = fresh_dir("triv-in-src");
    REQUIRE(run_quiet({"synth", "--preset", "golden", "--out", src}) == 0);
    const std::string out = fresh_dir("triv-in-run");
    CHECK(run_quiet({"trivialize", "--preset", "golden", "--in", src + "/cocycle.series",
                     "--out", out}) == 0);
    CHECK(contains(read_file(out + "/summary.json"), "\"verdict\":\"converged\""));

    // a d = 2 cocycle cannot be run under a d = 1 preset
    const std::string src2 = fresh_dir("triv-in-src2");
    REQUIRE(run_quiet({"synth", "--preset", "elliptic-tau-i", "--out", src2}) == 0);
    CHECK(run_quiet({"trivialize", "--preset", "golden", "--in", src2 + "/cocycle.series",
                     "--out", fresh_dir("triv-in-bad")}) == 1);
}

TEST_CASE("a diverging run exits 2 and leaves a diagnostic") {
    // craft a cocycle with order-one mass at negative Fourier modes, far
    // outside the newton smallness regime for the preset domain
    ExperimentConfig cfg = preset_config("golden");
    MatrixSeries f(cfg.truncation, 1);
    f.at(0, 0).set(Mode{{-1}, {1}}, {2.0, 0.0});
    f.at(0, 0).set(Mode{{-2}, {1}}, {0.0, 2.0});
    f.at(0, 0).set(Mode{{0}, {1}}, {0.5, 0.0});
    const fs::path dir = fs::temp_directory_path() / "kamtriv-cli-test";
    fs::create_directories(dir);
    const std::string in_path = (dir / "big.series").string();
    write_file(in_path, to_text(std::vector<MatrixSeries>{f}));

    const std::string out = fresh_dir("diverge");
    CHECK(run_quiet({"trivialize", "--preset", "golden", "--in", in_path, "--out", out}) == 2);
    CHECK(contains(read_file(out + "/error.json"), "\"kind\":\"diverged\""));
}
