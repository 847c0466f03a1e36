// Brute-force reference for the golden-angle divisor scan: recomputes
// min over modes of |lambda^p mu^q - mu| * (|p| + q) with plain complex
// arithmetic and no shared code with the library.  Its output is frozen in
// tests/data/golden_scan_b200.txt and the acceptance suite compares the
// library's scan against that file.
//
// Model: elliptic curve tau = i (lambda = e^{-2pi}), d = 1,
// theta = (sqrt(5)-1)/2, divisor variant with q >= 2, bound s <= 200.
// Modes with |p| > 30 are certified away: |lambda^p mu^q| is then farther
// than 1/2 from the unit circle, so divisor * s >= s/2 >= 15.
#include <cmath>
#include <complex>
#include <cstdio>

int main() {
    const double theta = (std::sqrt(5.0) - 1.0) / 2.0;
    const double log_lambda = -2.0 * std::acos(-1.0);
    const int bound = 200;
    const int p_window = 30;

    double best = 1e300;
    int best_p = 0, best_q = 0;
    for (int q = 2; q <= bound; ++q) {
        for (int p = -p_window; p <= p_window; ++p) {
            const int s = std::abs(p) + q;
            if (s > bound) continue;
            const std::complex<double> z =
                std::exp(std::complex<double>(p * log_lambda, 2.0 * std::acos(-1.0) * q * theta));
            const std::complex<double> mu =
                std::exp(std::complex<double>(0.0, 2.0 * std::acos(-1.0) * theta));
            const double divisor = std::abs(z - mu);
            if (divisor * s < best) {
                best = divisor * s;
                best_p = p;
                best_q = q;
            }
        }
    }
    std::printf("# min over modes (|p|+q <= 200, q >= 2) of |lambda^p mu^q - mu| * (|p|+q)\n");
    std::printf("# attained at p = %d, q = %d\n", best_p, best_q);
    std::printf("%.17g\n", best);
    return 0;
}
