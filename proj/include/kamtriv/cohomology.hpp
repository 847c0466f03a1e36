// The vertical cohomological equation: for each generator i the twisted
// difference operator L_i(G) = G(deck_i) - G acts diagonally on modes,
// multiplying coefficient (P,Q) by (lambda_i^P mu_i^Q - 1).  Solving
// L_i(G) = F_i for all i simultaneously divides each mode of the right-hand
// side by the best-conditioned generator's divisor.
#pragma once

#include <map>
#include <vector>

#include "kamtriv/series.hpp"

namespace kamtriv {

// L_i applied coefficientwise; support never grows
FourierTaylorSeries apply_L(const FourierTaylorSeries& g, int gen, const DeckMaps& deck);
MatrixSeries apply_L(const MatrixSeries& g, int gen, const DeckMaps& deck);

// max over generator pairs (i,j) of || L_i(F_j) - L_j(F_i) ||_w
double check_compatibility(const std::vector<MatrixSeries>& rhs, const DeckMaps& deck,
                           const MajorantWeight& w);

struct SolveOptions {
    double resonance_threshold = 1e-14;  // divisor below this counts as resonant
    double drop_tolerance = 1e-12;       // resonant modes with all |coeffs| <= this are skipped
    double compat_tolerance = 1e-10;     // gate on the compatibility residual (n >= 2)
};

struct CohomologySolution {
    MatrixSeries g;
    std::map<Mode, int> chosen_generator;   // argmax-divisor generator per solved mode
    std::vector<double> equation_residuals; // || L_i(G) - F_i ||_w per generator
    double compat_residual = 0;             // 0 when n = 1
    double min_divisor = 0;                 // min divisor actually divided by
    std::vector<Mode> resonant_skipped;     // resonant modes with negligible coefficients
    double norm_g = 0;                      // || G ||_w
    double max_norm_rhs = 0;                // max_i || F_i ||_w
};

// Solves L_i(G) = F_i.  Preconditions: every F_i = O(v) (no v-constant
// terms, throws BadJetError), all specs match, rhs.size() == deck.n().
// Throws IncompatibleError / ResonantModeError per the options.  The weight
// is used for the compatibility gate and the reported norms.
CohomologySolution solve_cohomology(const std::vector<MatrixSeries>& rhs, const DeckMaps& deck,
                                    const MajorantWeight& w, const SolveOptions& opts = {});

}  // namespace kamtriv
