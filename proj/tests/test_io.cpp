#include <complex>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

#include "doctest.h"
#include "kamtriv/cocycle_lab.hpp"
#include "kamtriv/errors.hpp"
#include "kamtriv/io.hpp"
#include "kamtriv/series.hpp"

using namespace kamtriv;
using cplx = std::complex<double>;

namespace {
const TruncationSpec kSpec{1, 1, 4, 6};

FourierTaylorSeries sample_series(std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    FourierTaylorSeries f(kSpec);
    for (int p = -2; p <= 2; ++p)
        for (int q = 0; q <= 3; ++q) f.set(Mode{{p}, {q}}, disc_sample(gen, 0.7));
    return f;
}
}  // namespace

TEST_CASE("format_double is 17-significant-digit shortest-exact") {
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(format_double(-2.5e-300) == "-2.5e-300");  // %g strips trailing zeros
    // round trip through text preserves the bits
    for (double x : {2.8293670881495356, 1e-17, -0.0018674427317079888}) {
        CHECK(std::stod(format_double(x)) == x);
    }
}

TEST_CASE("series text round-trips byte for byte") {
    FourierTaylorSeries f = sample_series(5);
    const std::string text = to_text(f);
    CHECK(text.rfind("series 1 1 4 6", 0) == 0);
    FourierTaylorSeries g = series_from_text(text);
    CHECK(to_text(g) == text);
    CHECK(g.size() == f.size());
    for (const auto& [mode, c] : f.coeffs()) CHECK(g.at(mode) == c);
}

TEST_CASE("matrix text round-trips with entry grouping") {
    MatrixSeries m(kSpec, 2);
    m.at(0, 1) = sample_series(6);
    m.at(1, 0) = sample_series(7);
    const std::string text = to_text(m);
    CHECK(text.rfind("matrix-series 1 1 4 6 2", 0) == 0);
    CHECK(text.find("entry 1 2") != std::string::npos);
    MatrixSeries back = matrix_from_text(text);
    CHECK(to_text(back) == text);
}

TEST_CASE("cocycle text stores one matrix per generator") {
    std::vector<MatrixSeries> devs(2, MatrixSeries(kSpec, 1));
    devs[0].at(0, 0) = sample_series(8);
    devs[1].at(0, 0) = sample_series(9);
    const std::string text = to_text(devs);
    CHECK(text.rfind("cocycle 1 1 4 6 1 2", 0) == 0);
    CHECK(text.find("generator 2") != std::string::npos);
    std::vector<MatrixSeries> back = cocycle_from_text(text);
    REQUIRE(back.size() == 2);
    CHECK(to_text(back) == text);
}

TEST_CASE("comments and blank lines are ignored when parsing") {
    FourierTaylorSeries f = sample_series(10);
    std::string text = to_text(f);
    text.insert(text.find('\n') + 1, "\n# a comment line\n\n");
    CHECK(to_text(series_from_text(text)) == to_text(f));
}

TEST_CASE("malformed series text is rejected") {
    CHECK_THROWS_AS(series_from_text(""), ConfigError);
    CHECK_THROWS_AS(series_from_text("bogus 1 1 4 6\n"), ConfigError);
    CHECK_THROWS_AS(series_from_text("series 1 1 4 6\n1 | 2 3 | 0.5 0.5\n"), ConfigError);
    CHECK_THROWS_AS(series_from_text("series 1 1 4 6\n1 | 2 | nope 0.5\n"), ConfigError);
    CHECK_THROWS_AS(matrix_from_text("series 1 1 4 6\n"), ConfigError);
}

TEST_CASE("fnv1a64 matches the reference vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("hello") == 0xa430d84680aabd0bULL);
    CHECK(fnv1a64_hex("series 1 1 4 6") == "ca75288c82e6d8ae");
    CHECK(fnv1a64_hex("").size() == 16);
}

TEST_CASE("json writer emits insertion-ordered, stable text") {
    JsonWriter w;
    w.begin_object();
    w.key("b").value(1);
    w.key("a").value(1.5);
    w.key("list").begin_array().value("x").value(true).value_null().end_array();
    w.key("nested").begin_object().key("k").value(std::uint64_t{42}).end_object();
    w.end_object();
    CHECK(w.str() == "{\"b\":1,\"a\":1.5,\"list\":[\"x\",true,null],\"nested\":{\"k\":42}}");
}

TEST_CASE("file io round-trips and reports missing files") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "kamtriv-io-test";
    fs::create_directories(dir);
    const std::string path = (dir / "blob.txt").string();
    const std::string payload = "line one\nline two\n";
    write_file(path, payload);
    CHECK(read_file(path) == payload);
    CHECK_THROWS_AS(read_file((dir / "missing.txt").string()), ConfigError);
    fs::remove_all(dir);
}
