#include "kamtriv/cohomology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "kamtriv/errors.hpp"

namespace kamtriv {

FourierTaylorSeries apply_L(const FourierTaylorSeries& g, int gen, const DeckMaps& deck) {
    if (deck.n() != g.spec().n || deck.d() != g.spec().d)
        throw std::invalid_argument("apply_L: deck dimensions do not match the series");
    FourierTaylorSeries out(g.spec());
    for (const auto& [mode, c] : g.coeffs()) {
        const std::complex<double> factor = deck.multiplier(gen, mode.p, mode.q) - 1.0;
        out.set(mode, c * factor);  // set() prunes the exact zeros of kernel modes
    }
    return out;
}

MatrixSeries apply_L(const MatrixSeries& g, int gen, const DeckMaps& deck) {
    MatrixSeries out(g.spec(), g.size());
    for (int r = 0; r < g.size(); ++r)
        for (int c = 0; c < g.size(); ++c) out.at(r, c) = apply_L(g.at(r, c), gen, deck);
    return out;
}

double check_compatibility(const std::vector<MatrixSeries>& rhs, const DeckMaps& deck,
                           const MajorantWeight& w) {
    const int n = deck.n();
    if (static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("check_compatibility: expected one series per generator");
    double worst = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const MatrixSeries lhs = sub(apply_L(rhs[j], i, deck), apply_L(rhs[i], j, deck));
            worst = std::max(worst, majorant_norm(lhs, w));
        }
    return worst;
}

namespace {
std::string mode_string(const Mode& mode) {
    std::ostringstream os;
    os << "(P = ";
    for (std::size_t k = 0; k < mode.p.size(); ++k) os << (k ? "," : "") << mode.p[k];
    os << "; Q = ";
    for (std::size_t l = 0; l < mode.q.size(); ++l) os << (l ? "," : "") << mode.q[l];
    os << ")";
    return os.str();
}
}  // namespace

CohomologySolution solve_cohomology(const std::vector<MatrixSeries>& rhs, const DeckMaps& deck,
                                    const MajorantWeight& w, const SolveOptions& opts) {
    const int n = deck.n();
    if (n < 1 || static_cast<int>(rhs.size()) != n)
        throw std::invalid_argument("solve_cohomology: expected one right-hand side per generator");
    const TruncationSpec spec = rhs.front().spec();
    const int size = rhs.front().size();
    for (const auto& f : rhs)
        if (!(f.spec() == spec) || f.size() != size)
            throw std::invalid_argument("solve_cohomology: mismatched right-hand sides");
    for (const auto& f : rhs)
        if (f.has_v_constant_term())
            throw BadJetError("solve_cohomology: right-hand side has a v-constant term");

    CohomologySolution sol;
    sol.g = MatrixSeries(spec, size);
    if (n > 1) {
        sol.compat_residual = check_compatibility(rhs, deck, w);
        if (sol.compat_residual > opts.compat_tolerance)
            throw IncompatibleError(sol.compat_residual, opts.compat_tolerance);
    }

    // union of supports: the divisor choice is per mode, shared across entries
    std::set<Mode> support;
    for (const auto& f : rhs)
        for (int r = 0; r < size; ++r)
            for (int c = 0; c < size; ++c)
                for (const auto& [mode, coeff] : f.at(r, c).coeffs()) support.insert(mode);

    sol.min_divisor = std::numeric_limits<double>::infinity();
    for (const Mode& mode : support) {
        int best = 0;
        double best_div = -1;
        std::complex<double> best_factor;
        for (int i = 0; i < n; ++i) {
            const std::complex<double> factor = deck.multiplier(i, mode.p, mode.q) - 1.0;
            const double div = std::abs(factor);
            if (div > best_div) {
                best = i;
                best_div = div;
                best_factor = factor;
            }
        }
        if (best_div < opts.resonance_threshold) {
            double coeff_mag = 0;
            for (const auto& f : rhs)
                for (int r = 0; r < size; ++r)
                    for (int c = 0; c < size; ++c)
                        coeff_mag = std::max(coeff_mag, std::abs(f.at(r, c).at(mode)));
            if (coeff_mag > opts.drop_tolerance)
                throw ResonantModeError(mode.p, mode.q, best_div, coeff_mag,
                                        "solve_cohomology: resonant mode " + mode_string(mode) +
                                            " carries coefficient of magnitude " +
                                            std::to_string(coeff_mag));
            sol.resonant_skipped.push_back(mode);
            continue;
        }
        sol.chosen_generator[mode] = best;
        sol.min_divisor = std::min(sol.min_divisor, best_div);
        for (int r = 0; r < size; ++r)
            for (int c = 0; c < size; ++c) {
                const std::complex<double> coeff = rhs[best].at(r, c).at(mode);
                if (coeff != std::complex<double>{0.0, 0.0})
                    sol.g.at(r, c).set(mode, coeff / best_factor);
            }
    }
    if (!std::isfinite(sol.min_divisor)) sol.min_divisor = 0;

    sol.equation_residuals.reserve(n);
    for (int i = 0; i < n; ++i)
        sol.equation_residuals.push_back(majorant_norm(sub(apply_L(sol.g, i, deck), rhs[i]), w));
    sol.norm_g = majorant_norm(sol.g, w);
    for (const auto& f : rhs) sol.max_norm_rhs = std::max(sol.max_norm_rhs, majorant_norm(f, w));
    return sol;
}

}  // namespace kamtriv
