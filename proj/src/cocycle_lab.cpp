#include "kamtriv/cocycle_lab.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace kamtriv {

void SynthesisSpec::validate(const TruncationSpec& spec) const {
    if (!(amplitude >= 0)) throw std::invalid_argument("synthesis: amplitude must be >= 0");
    if (min_degree < 1) throw std::invalid_argument("synthesis: min_degree must be >= 1");
    if (max_degree < min_degree)
        throw std::invalid_argument("synthesis: max_degree must be >= min_degree");
    if (max_degree > spec.taylor_degree)
        throw std::invalid_argument("synthesis: max_degree exceeds the truncation degree");
    if (fourier_bound < 0) throw std::invalid_argument("synthesis: fourier_bound must be >= 0");
    if (fourier_bound > spec.fourier_cutoff)
        throw std::invalid_argument("synthesis: fourier_bound exceeds the Fourier cutoff");
    if (matrix_size < 1) throw std::invalid_argument("synthesis: matrix_size must be >= 1");
}

double unit_double(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::complex<double> disc_sample(std::mt19937_64& gen, double radius) {
    const double u = unit_double(gen);
    const double v = unit_double(gen);
    return std::polar(radius * std::sqrt(u), 2.0 * std::numbers::pi * v);
}

namespace {
void enumerate_box(int len, int lo, int hi, std::vector<int>& idx,
                   const std::function<void()>& visit, int pos = 0) {
    if (pos == len) {
        visit();
        return;
    }
    for (int v = lo; v <= hi; ++v) {
        idx[pos] = v;
        enumerate_box(len, lo, hi, idx, visit, pos + 1);
    }
}
}  // namespace

MatrixSeries random_near_identity(const SynthesisSpec& synth, const TruncationSpec& spec) {
    spec.validate();
    synth.validate(spec);
    std::mt19937_64 gen(synth.seed);
    MatrixSeries psi(spec, synth.matrix_size);
    // row-major entries, lexicographic (P,Q) modes: the draw order is part of
    // the documented output mapping
    std::vector<int> p(spec.n), q(spec.d);
    for (int r = 0; r < synth.matrix_size; ++r)
        for (int c = 0; c < synth.matrix_size; ++c) {
            FourierTaylorSeries& entry = psi.at(r, c);
            enumerate_box(spec.n, 0, synth.fourier_bound, p, [&] {
                enumerate_box(spec.d, 0, synth.max_degree, q, [&] {
                    int deg = 0;
                    for (int x : q) deg += x;
                    if (deg < synth.min_degree || deg > synth.max_degree) return;
                    const std::complex<double> coeff = disc_sample(gen, synth.amplitude);
                    if (coeff != std::complex<double>{0.0, 0.0}) entry.set(Mode{p, q}, coeff);
                });
            });
        }
    return plus_identity(std::move(psi));
}

Cocycle synthesize_cocycle(const MatrixSeries& psi_frame, const DeckMaps& deck,
                           LossTracker* loss) {
    const MatrixSeries psi = minus_identity(psi_frame);
    if (psi.has_v_constant_term())
        throw std::invalid_argument("synthesize_cocycle: frame must be I + O(v)");
    std::vector<MatrixSeries> f;
    f.reserve(deck.n());
    for (int i = 0; i < deck.n(); ++i) {
        // F_i = (Psi o deck_i)^{-1} Psi, stored as the deviation F_i - I
        const MatrixSeries shifted = compose_deck(psi_frame, i, deck);
        const MatrixSeries inv = neumann_inverse(shifted, loss);
        f.push_back(minus_identity(mul(inv, psi_frame, loss)));
    }
    return Cocycle(deck, std::move(f));
}

void inject_resonance(Cocycle& c, const Mode& mode, std::complex<double> eta,
                      double resonance_threshold) {
    if (mode.v_degree() < 1)
        throw std::invalid_argument("inject_resonance: mode must have v-degree >= 1");
    for (int i = 0; i < c.deck.n(); ++i) {
        const double div = c.deck.unit_divisor(i, mode.p, mode.q);
        if (div >= resonance_threshold) {
            std::ostringstream os;
            os << "inject_resonance: generator " << (i + 1) << " has unit divisor " << div
               << " at the requested mode; not resonant";
            throw std::invalid_argument(os.str());
        }
    }
    c.f.front().at(0, 0).accumulate(mode, eta);
}

}  // namespace kamtriv
