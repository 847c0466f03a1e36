// Complex torus lattices, unitary flat-bundle data, deck-map multipliers and
// small-divisor scans.
//
// The torus is C^n / Lambda with Lambda spanned by the standard basis
// e_1..e_n together with n further vectors e_{n+1}..e_{2n} whose imaginary
// parts form an invertible n x n matrix.  The flat bundle is given by one
// commuting diagonal unitary per generator: mu_{j,l} = exp(2 pi i theta_{j,l}).
// Deck map j acts on a monomial h^P v^Q by the scalar lambda_j^P mu_j^Q where
// lambda_{j,k} = exp(2 pi i e_{n+j,k}).
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace kamtriv {

struct TorusLattice {
    int n = 0;
    // rows e_{n+1}..e_{2n}; row j holds the n complex coordinates of e_{n+j}
    std::vector<std::vector<std::complex<double>>> rows;

    // throws std::invalid_argument when the Im matrix is singular
    static TorusLattice make(int n, std::vector<std::vector<std::complex<double>>> rows);
    static TorusLattice elliptic(std::complex<double> tau);  // n = 1, e_2 = tau

    // infinity norm of (Im rows)^{-1}; used for Fourier windows in scans
    double im_inverse_inf_norm() const;
};

struct FlatBundleData {
    int d = 0;
    // theta[j][l] = angle (in turns) of mu_{j+1, l+1}; one row per generator
    std::vector<std::vector<double>> theta;

    static FlatBundleData make(int n, int d, std::vector<std::vector<double>> theta);
};

// Multipliers are kept in log-polar form: unit angles in turns plus real log
// moduli, re-exponentiated on demand so powers never drift.
class DeckMaps {
public:
    DeckMaps(TorusLattice lattice, FlatBundleData bundle);

    int n() const { return lattice_.n; }
    int d() const { return bundle_.d; }
    const TorusLattice& lattice() const { return lattice_; }
    const FlatBundleData& bundle() const { return bundle_; }

    std::complex<double> lambda(int j, int k) const;  // 0-based generator j, coordinate k
    std::complex<double> mu(int j, int l) const;      // 0-based generator j, fiber index l
    std::complex<double> scalar_lambda() const;       // n = 1 convenience

    // lambda_j^P mu_j^Q for generator j (0-based)
    std::complex<double> multiplier(int j, const std::vector<int>& P,
                                    const std::vector<int>& Q) const;
    // |lambda_j^P mu_j^Q - 1|
    double unit_divisor(int j, const std::vector<int>& P, const std::vector<int>& Q) const;
    // per-generator values |lambda_j^P mu_j^Q - mu_{j,target}| for j = 0..n-1
    std::vector<double> small_divisor(const std::vector<int>& P, const std::vector<int>& Q,
                                      int target) const;

    // log |lambda_j^P| (exact linear form in P)
    double log_modulus(int j, const std::vector<int>& P) const;

private:
    TorusLattice lattice_;
    FlatBundleData bundle_;
    std::vector<std::vector<double>> re_e_;      // angle rows (turns)
    std::vector<std::vector<double>> im_e_;      // Im e rows
    std::vector<std::vector<double>> theta_;     // normalized into [0,1)
};

enum class DioVariant { vd, svd, hd, dv };

DioVariant dio_variant_from_string(const std::string& s);
std::string to_string(DioVariant v);

struct ScannedMode {
    std::vector<int> p, q;
    int target = 0;      // fiber index for vd/svd/dv (0-based); unused for hd
    double divisor = 0;  // aggregated over generators per the variant
    int s = 0;           // |p|_1 + |q|_1
};

struct DiophantineReport {
    DioVariant variant = DioVariant::dv;
    int bound = 0;
    int p_window = 0;                   // scanned |p|_inf <= p_window
    double excluded_divisor_bound = 0;  // certified lower bound outside the window (0 = none)
    long long modes_scanned = 0;
    double fitted_d = 0;                // envelope fit divisor >= D / s^tau
    double fitted_tau = 0;
    double fitted_tau_half = 0;         // same fit restricted to s <= bound/2
    // min over non-resonant modes of divisor * s: the empirical exponent-1 constant
    double min_divisor_times_s = 0;
    // per-order champions (min divisor at each s), ascending by divisor * s^fitted_tau
    std::vector<ScannedMode> worst;
    std::vector<ScannedMode> resonances;  // divisor below resonance threshold (capped)
    long long resonance_count = 0;
    std::vector<std::pair<int, double>> envelope;  // non-resonant running minima (s, divisor)
    std::string verdict;                // "diophantine" | "liouville_suspect" | "resonant"
};

struct ScanOptions {
    int bound = 200;
    DioVariant variant = DioVariant::dv;
    double resonance_threshold = 1e-14;
    int worst_count = 16;
    // invoked for every scanned mode in deterministic enumeration order
    std::function<void(const ScannedMode&)> mode_sink;
};

DiophantineReport diophantine_scan(const DeckMaps& deck, const ScanOptions& opts);

// min over scanned (non-resonant) modes of divisor * s^tau: the best constant D
// making the lower bound D / s^tau hold at exponent tau over the scan range
double fitted_d_for_tau(const DiophantineReport& report, double tau);

}  // namespace kamtriv
