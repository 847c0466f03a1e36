#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "kamtriv/cocycle_lab.hpp"
#include "kamtriv/errors.hpp"
#include "kamtriv/io.hpp"
#include "kamtriv/series.hpp"

using namespace kamtriv;
using cplx = std::complex<double>;

namespace {
const TruncationSpec kSpec{1, 1, 4, 6};

DeckMaps golden_deck() {
    return DeckMaps(TorusLattice::elliptic({0.0, 1.0}),
                    FlatBundleData::make(1, 1, {{(std::sqrt(5.0) - 1.0) / 2.0}}));
}

FourierTaylorSeries random_series(std::uint64_t seed, int nmodes = 12) {
    std::mt19937_64 gen(seed);
    FourierTaylorSeries f(kSpec);
    std::uniform_int_distribution<int> pd(-2, 2), qd(0, 3);
    for (int i = 0; i < nmodes; ++i)
        f.set(Mode{{pd(gen)}, {qd(gen)}}, disc_sample(gen, 0.5));
    return f;
}
}  // namespace

TEST_CASE("mode ordering and degrees") {
    Mode a{{0}, {1}}, b{{1}, {1}}, c{{0}, {2}};
    CHECK(a.v_degree() == 1);
    CHECK(b.order() == 2);
    CHECK(c.v_degree() == 2);
    CHECK(a < b);   // lexicographic on (p, q)
    CHECK(a < c);
    std::map<Mode, int> m;
    m[b] = 1;
    m[a] = 2;
    CHECK(m.begin()->first == a);
}

TEST_CASE("truncation spec validation") {
    CHECK_THROWS_AS(TruncationSpec({0, 1, 4, 4}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(TruncationSpec({1, 0, 4, 4}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(TruncationSpec({1, 1, -1, 4}).validate(), std::invalid_argument);
    CHECK_NOTHROW(TruncationSpec({2, 3, 8, 16}).validate());
}

TEST_CASE("set rejects out-of-range modes, accumulate records them") {
    FourierTaylorSeries f(kSpec);
    CHECK_THROWS_AS(f.set(Mode{{5}, {0}}, cplx{1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(f.set(Mode{{0}, {7}}, cplx{1, 0}), std::invalid_argument);
    CHECK_THROWS_AS(f.set(Mode{{0, 0}, {1}}, cplx{1, 0}), std::invalid_argument);

    MajorantWeight w(TorusLattice::elliptic({0.0, 1.0}), 0.1, 0.5);
    LossTracker loss(w);
    const Mode over{{5}, {0}};
    f.accumulate(over, cplx{0.25, 0.0}, &loss);
    CHECK(f.empty());
    CHECK(loss.total() == doctest::Approx(0.25 * w(over)).epsilon(1e-14));
}

TEST_CASE("exact zeros are pruned on write") {
    FourierTaylorSeries f(kSpec);
    f.set(Mode{{1}, {1}}, cplx{0.5, 0});
    f.set(Mode{{1}, {1}}, cplx{0, 0});
    CHECK(f.empty());
    f.set(Mode{{1}, {1}}, cplx{0.5, 0});
    f.accumulate(Mode{{1}, {1}}, cplx{-0.5, 0});
    CHECK(f.empty());
}

TEST_CASE("add and sub act per coefficient") {
    FourierTaylorSeries a = random_series(7), b = random_series(8);
    FourierTaylorSeries s = add(a, b);
    for (const auto& [mode, c] : s.coeffs())
        CHECK(std::abs(c - (a.at(mode) + b.at(mode))) <= 1e-15);
    FourierTaylorSeries z = sub(s, b);
    for (const auto& [mode, c] : a.coeffs()) CHECK(std::abs(z.at(mode) - c) <= 1e-15);
}

TEST_CASE("product of monomials adds exponents and multiplies coefficients") {
    FourierTaylorSeries a = FourierTaylorSeries::monomial(kSpec, Mode{{1}, {1}}, {0.0, 2.0});
    FourierTaylorSeries b = FourierTaylorSeries::monomial(kSpec, Mode{{-2}, {3}}, {0.5, 0.0});
    FourierTaylorSeries p = mul(a, b);
    REQUIRE(p.size() == 1);
    CHECK(p.at(Mode{{-1}, {4}}) == cplx{0.0, 1.0});
}

TEST_CASE("(1 + x)(1 - x) telescopes") {
    const Mode m{{1}, {1}};
    FourierTaylorSeries one = FourierTaylorSeries::constant(kSpec, 1.0);
    FourierTaylorSeries x = FourierTaylorSeries::monomial(kSpec, m, {0.25, 0.0});
    FourierTaylorSeries p = mul(add(one, x), sub(one, x));
    REQUIRE(p.size() == 2);
    CHECK(p.at(Mode{{0}, {0}}) == cplx{1.0, 0.0});
    CHECK(std::abs(p.at(Mode{{2}, {2}}) + 0.0625) <= 1e-17);
}

TEST_CASE("multiplication is associative within roundoff") {
    FourierTaylorSeries a = random_series(1), b = random_series(2), c = random_series(3);
    FourierTaylorSeries diff = sub(mul(mul(a, b), c), mul(a, mul(b, c)));
    double worst = 0;
    for (const auto& [mode, x] : diff.coeffs()) worst = std::max(worst, std::abs(x));
    CHECK(worst <= 1e-13);
}

TEST_CASE("out-of-window product mass lands in the loss tracker") {
    MajorantWeight w(TorusLattice::elliptic({0.0, 1.0}), 0.1, 0.5);
    LossTracker loss(w);
    FourierTaylorSeries a = FourierTaylorSeries::monomial(kSpec, Mode{{3}, {4}}, {1.0, 0.0});
    FourierTaylorSeries p = mul(a, a, &loss);  // (6, 8) exceeds both windows
    CHECK(p.empty());
    CHECK(loss.total() == doctest::Approx(w(Mode{{6}, {8}})).epsilon(1e-14));
}

TEST_CASE("deck composition multiplies coefficients by the deck multiplier") {
    DeckMaps deck = golden_deck();
    FourierTaylorSeries f = random_series(11);
    FourierTaylorSeries g = compose_deck(f, 0, deck);
    for (const auto& [mode, c] : f.coeffs()) {
        const cplx expect = c * deck.multiplier(0, mode.p, mode.q);
        CHECK(std::abs(g.at(mode) - expect) <= 1e-15 * std::abs(expect) + 1e-18);
    }
}

TEST_CASE("deck composition agrees with evaluation at shifted arguments") {
    // evaluate() takes torus coordinates: h^P contributes exp(2 pi i P.z), so
    // the deck map is z -> z + e_2 on the base and v -> mu v on the fiber
    DeckMaps deck = golden_deck();
    FourierTaylorSeries f = random_series(13);
    const std::vector<cplx> z{{0.3, 0.1}}, v{{0.2, -0.1}};
    const std::vector<cplx> shifted{z[0] + deck.lattice().rows[0][0]};
    const std::vector<cplx> mv{deck.mu(0, 0) * v[0]};
    const cplx lhs = evaluate(compose_deck(f, 0, deck), z, v);
    const cplx rhs = evaluate(f, shifted, mv);
    CHECK(std::abs(lhs - rhs) <= 1e-11 * (1.0 + std::abs(lhs) + std::abs(rhs)));
}

TEST_CASE("jet truncate and jet tail partition the series exactly") {
    FourierTaylorSeries f = random_series(17, 20);
    FourierTaylorSeries head = jet_truncate(f, 2), tail = jet_tail(f, 2);
    for (const auto& [mode, c] : head.coeffs()) CHECK(mode.v_degree() <= 2);
    for (const auto& [mode, c] : tail.coeffs()) CHECK(mode.v_degree() > 2);
    CHECK(to_text(add(head, tail)) == to_text(f));
}

TEST_CASE("min v-degree and v-constant detection") {
    FourierTaylorSeries f(kSpec);
    CHECK(!f.min_v_degree().has_value());
    f.set(Mode{{2}, {3}}, cplx{1, 0});
    f.set(Mode{{0}, {5}}, cplx{1, 0});
    CHECK(f.min_v_degree() == 3);
    CHECK(!f.has_v_constant_term());
    f.set(Mode{{1}, {0}}, cplx{1, 0});
    CHECK(f.min_v_degree() == 0);
    CHECK(f.has_v_constant_term());
}

TEST_CASE("prune drops coefficients at or below the threshold") {
    FourierTaylorSeries f(kSpec);
    f.set(Mode{{0}, {1}}, cplx{1e-13, 0});
    f.set(Mode{{0}, {2}}, cplx{0.5, 0});
    f.prune(1e-12);
    CHECK(f.size() == 1);
    CHECK(f.at(Mode{{0}, {2}}) == cplx{0.5, 0.0});
}

// weight checks against directly computed values; torus tau = i so s = p
TEST_CASE("majorant weight matches the closed-form exponentials") {
    MajorantWeight w(TorusLattice::elliptic({0.0, 1.0}), 0.1, 0.5);
    CHECK(w(Mode{{1}, {0}}) == doctest::Approx(1.8744560875853382).epsilon(1e-14));   // e^{0.2 pi}
    CHECK(w(Mode{{-1}, {0}}) == doctest::Approx(1003.7555935495469).epsilon(1e-13));  // e^{2.2 pi}
    CHECK(w(Mode{{0}, {2}}) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(w(Mode{{0}, {0}}) == 1.0);
}

TEST_CASE("majorant weight is submultiplicative, multiplicative per orthant") {
    MajorantWeight w(TorusLattice::elliptic({0.0, 1.0}), 0.2, 0.7);
    // same sign orthant: the maximizing corner is shared, so weights multiply
    const Mode a1{{2}, {1}}, a2{{1}, {3}}, apos{{3}, {4}};
    CHECK(w(apos) == doctest::Approx(w(a1) * w(a2)).epsilon(1e-12));
    const Mode b1{{-2}, {1}}, b2{{-1}, {0}}, bneg{{-3}, {1}};
    CHECK(w(bneg) == doctest::Approx(w(b1) * w(b2)).epsilon(1e-12));
    // mixed signs: strictly submultiplicative
    const Mode m1{{2}, {1}}, m2{{-1}, {3}}, sum{{1}, {4}};
    CHECK(w(sum) < w(m1) * w(m2));
}

TEST_CASE("majorant norm is the weighted coefficient sum") {
    MajorantWeight w(TorusLattice::elliptic({0.0, 1.0}), 0.1, 0.5);
    FourierTaylorSeries f(kSpec);
    f.set(Mode{{1}, {2}}, cplx{0.0, -0.4});
    CHECK(majorant_norm(f, w) == doctest::Approx(0.4 * w(Mode{{1}, {2}})).epsilon(1e-14));
    f.set(Mode{{0}, {1}}, cplx{0.3, 0.0});
    CHECK(majorant_norm(f, w) ==
          doctest::Approx(0.4 * w(Mode{{1}, {2}}) + 0.3 * w(Mode{{0}, {1}})).epsilon(1e-14));
}

TEST_CASE("matrix identity, plus and minus identity") {
    MatrixSeries i = MatrixSeries::identity(kSpec, 2);
    CHECK(i.at(0, 0).at(Mode{{0}, {0}}) == cplx{1.0, 0.0});
    CHECK(i.at(0, 1).empty());
    MatrixSeries m(kSpec, 2);
    m.at(0, 1).set(Mode{{1}, {1}}, cplx{0.5, 0});
    CHECK(to_text(minus_identity(plus_identity(m))) == to_text(m));
}

TEST_CASE("matrix product is the ring product") {
    MatrixSeries a(kSpec, 2), b(kSpec, 2);
    a.at(0, 0).set(Mode{{0}, {1}}, cplx{1, 0});
    a.at(0, 1).set(Mode{{1}, {0}}, cplx{2, 0});
    b.at(0, 0).set(Mode{{0}, {1}}, cplx{3, 0});
    b.at(1, 0).set(Mode{{0}, {2}}, cplx{1, 0});
    MatrixSeries p = mul(a, b);
    CHECK(std::abs(p.at(0, 0).at(Mode{{0}, {2}}) - cplx{3, 0}) <= 1e-15);  // a00*b00 + a01*b10
    CHECK(std::abs(p.at(0, 0).at(Mode{{1}, {2}}) - cplx{2, 0}) <= 1e-15);
    CHECK(p.at(1, 1).empty());
}

TEST_CASE("neumann inverse of I + phi terminates and inverts") {
    std::mt19937_64 gen(99);
    MatrixSeries phi(kSpec, 2);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            for (int q = 1; q <= 3; ++q)
                phi.at(r, c).set(Mode{{(q % 3) - 1}, {q}}, disc_sample(gen, 0.3));
    MatrixSeries inv = neumann_inverse(plus_identity(phi));
    MatrixSeries prod = mul(plus_identity(phi), inv);
    MajorantWeight w(TorusLattice::elliptic({0.0, 1.0}), 0.0, 1.0);
    // the weight blows up roundoff at negative p by e^{2 pi |p|}; 1e-10 is
    // still ten orders below the smallest genuine coefficient here
    CHECK(majorant_norm(sub(prod, MatrixSeries::identity(kSpec, 2)), w) <= 1e-10);
}

TEST_CASE("neumann inverse requires a vanishing v-constant part") {
    MatrixSeries bad(kSpec, 1);
    bad.at(0, 0).set(Mode{{0}, {0}}, cplx{1.0, 0.0});   // the identity itself
    bad.at(0, 0).set(Mode{{1}, {0}}, cplx{0.1, 0.0});   // v-constant deviation
    CHECK_THROWS_AS(neumann_inverse(bad), BadJetError);
}

TEST_CASE("matrix evaluate multiplies out to plain matrices") {
    MatrixSeries m(kSpec, 2);
    m.at(0, 1).set(Mode{{1}, {1}}, cplx{1.0, 0.0});
    // h^1 v^1 at torus coordinate 1/2 and fiber value 1/4: e^{pi i} / 4
    auto vals = evaluate(m, {{0.5, 0.0}}, {{0.25, 0.0}});
    CHECK(std::abs(vals[0][1] - cplx{-0.25, 0.0}) <= 1e-15);
    CHECK(std::abs(vals[0][0]) == 0.0);
}
