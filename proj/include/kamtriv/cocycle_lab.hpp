// Test-data factory: reproducible random near-identity frames, the cocycles
// they generate, and controlled resonance injection.
//
// Randomness: std::mt19937_64 seeded directly; each coefficient consumes two
// raw draws mapped to [0,1) by (x >> 11) * 2^-53 (u, then v), giving the
// complex number amplitude * sqrt(u) * exp(2 pi i v), uniform on the disc of
// radius `amplitude`.  Draw order: matrix entries row-major, modes in
// lexicographic (P,Q) order.  This fixes the byte stream for any conforming
// mt19937_64, independent of platform distributions.
#pragma once

#include <cstdint>
#include <random>

#include "kamtriv/newton.hpp"
#include "kamtriv/series.hpp"

namespace kamtriv {

struct SynthesisSpec {
    std::uint64_t seed = 1;
    double amplitude = 1e-2;
    int min_degree = 1;      // lowest |Q| of the drawn frame deviation
    int max_degree = 2;      // highest |Q|
    // draw modes with 0 <= P_k <= fourier_bound: on the standard lattices this
    // is the sector whose domain weights stay moderate, so uniform-amplitude
    // draws actually satisfy the Newton scheme's smallness hypothesis
    int fourier_bound = 2;
    int matrix_size = 1;     // ell

    void validate(const TruncationSpec& spec) const;  // throws std::invalid_argument
};

double unit_double(std::mt19937_64& gen);  // (x >> 11) * 2^-53
std::complex<double> disc_sample(std::mt19937_64& gen, double radius);

// Psi = I + psi with psi drawn on the spec'd support; amplitude 0 gives I
MatrixSeries random_near_identity(const SynthesisSpec& synth, const TruncationSpec& spec);

// F_i = (Psi o deck_i)^{-1} Psi for every generator: a cocycle trivialized by
// Psi, satisfying automorphy up to truncation; returns the deviations f_i
Cocycle synthesize_cocycle(const MatrixSeries& psi_frame, const DeckMaps& deck,
                           LossTracker* loss = nullptr);

// Adds eta at `mode` of f_1's (0,0) entry.  Requires every generator's unit
// divisor at the mode to sit below the resonance threshold; otherwise throws
// std::invalid_argument quoting the blocking divisor.
void inject_resonance(Cocycle& c, const Mode& mode, std::complex<double> eta,
                      double resonance_threshold = 1e-14);

}  // namespace kamtriv
