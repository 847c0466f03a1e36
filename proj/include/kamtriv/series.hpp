// Truncated Fourier-Taylor series: finitely supported coefficient maps
// c_{P,Q} h^P v^Q with P in Z^n (|P_k| <= fourier_cutoff) and Q in N^d
// (|Q|_1 <= taylor_degree), plus the matrix version and the weighted l1
// (majorant) norm used for all analytic estimates.
#pragma once

#include <complex>
#include <map>
#include <optional>
#include <vector>

#include "kamtriv/lattice.hpp"

namespace kamtriv {

struct TruncationSpec {
    int n = 1;               // torus dimension (length of P)
    int d = 1;               // fiber dimension (length of Q)
    int fourier_cutoff = 0;  // keep |P_k| <= fourier_cutoff for every k
    int taylor_degree = 0;   // keep |Q|_1 <= taylor_degree

    bool operator==(const TruncationSpec&) const = default;
    void validate() const;  // throws std::invalid_argument
};

struct Mode {
    std::vector<int> p, q;

    int v_degree() const;  // |Q|_1
    int order() const;     // |P|_1 + |Q|_1
    auto operator<=>(const Mode&) const = default;
};

// Accumulates the weighted mass of coefficients dropped by truncation.  The
// weight fixes the domain on which the dropped mass is a genuine error bound.
class MajorantWeight;
class LossTracker {
public:
    explicit LossTracker(const MajorantWeight& weight) : weight_(&weight) {}
    const MajorantWeight& weight() const { return *weight_; }
    void note(const Mode& mode, double coeff_mag);
    double total() const { return total_; }

private:
    const MajorantWeight* weight_;
    double total_ = 0;
};

class FourierTaylorSeries {
public:
    FourierTaylorSeries() = default;
    explicit FourierTaylorSeries(TruncationSpec spec);
    static FourierTaylorSeries constant(TruncationSpec spec, std::complex<double> c);
    static FourierTaylorSeries monomial(TruncationSpec spec, Mode mode, std::complex<double> c);

    const TruncationSpec& spec() const { return spec_; }
    const std::map<Mode, std::complex<double>>& coeffs() const { return coeffs_; }
    std::complex<double> at(const Mode& mode) const;

    bool in_bounds(const Mode& mode) const;
    // exact-zero coefficients are erased; out-of-range modes throw
    void set(const Mode& mode, std::complex<double> c);
    // as set() but drops (optionally recording) instead of throwing when out of range
    void accumulate(const Mode& mode, std::complex<double> c, LossTracker* loss = nullptr);

    bool empty() const { return coeffs_.empty(); }
    std::size_t size() const { return coeffs_.size(); }
    std::optional<int> min_v_degree() const;
    bool has_v_constant_term() const;  // any mode with |Q| = 0
    void prune(double threshold);      // drop |c| <= threshold

private:
    TruncationSpec spec_;
    std::map<Mode, std::complex<double>> coeffs_;
};

// Weight of mode (P,Q): W(P, epsilon) * r^{|Q|}, where W is the max of
// |exp(2 pi i P.z)| over the closed domain with torus coordinates extended by
// epsilon beyond one period in the e_{n+1}..e_{2n} directions.  Monotone in
// epsilon and r; submultiplicative over mode sums, with equality when the
// summands lie in a common sign orthant of P . Im(e rows).
class MajorantWeight {
public:
    MajorantWeight(TorusLattice lattice, double epsilon, double r);
    double epsilon() const { return epsilon_; }
    double r() const { return r_; }
    const TorusLattice& lattice() const { return lattice_; }
    double operator()(const Mode& mode) const;

private:
    TorusLattice lattice_;
    std::vector<std::vector<double>> im_rows_;
    double epsilon_ = 0, r_ = 0;
};

FourierTaylorSeries add(const FourierTaylorSeries& a, const FourierTaylorSeries& b);
FourierTaylorSeries sub(const FourierTaylorSeries& a, const FourierTaylorSeries& b);
FourierTaylorSeries neg(FourierTaylorSeries a);
FourierTaylorSeries scale(FourierTaylorSeries a, std::complex<double> c);
// truncated Cauchy product; out-of-range modes are dropped into `loss`
FourierTaylorSeries mul(const FourierTaylorSeries& a, const FourierTaylorSeries& b,
                        LossTracker* loss = nullptr);
// f composed with deck map of generator `gen` (0-based): coefficientwise
// multiplication by lambda_gen^P mu_gen^Q
FourierTaylorSeries compose_deck(const FourierTaylorSeries& f, int gen, const DeckMaps& deck);
FourierTaylorSeries jet_truncate(const FourierTaylorSeries& f, int degree);  // keep |Q| <= degree
FourierTaylorSeries jet_tail(const FourierTaylorSeries& f, int degree);      // keep |Q| > degree
double majorant_norm(const FourierTaylorSeries& f, const MajorantWeight& w);
std::complex<double> evaluate(const FourierTaylorSeries& f,
                              const std::vector<std::complex<double>>& z,
                              const std::vector<std::complex<double>>& v);

// Square matrices of series over a common truncation spec, row-major.
class MatrixSeries {
public:
    MatrixSeries() = default;
    MatrixSeries(TruncationSpec spec, int size);
    static MatrixSeries identity(TruncationSpec spec, int size);

    int size() const { return size_; }
    const TruncationSpec& spec() const { return spec_; }
    FourierTaylorSeries& at(int row, int col);
    const FourierTaylorSeries& at(int row, int col) const;

    bool empty() const;
    std::optional<int> min_v_degree() const;
    bool has_v_constant_term() const;
    void prune(double threshold);

private:
    TruncationSpec spec_;
    int size_ = 0;
    std::vector<FourierTaylorSeries> entries_;
};

MatrixSeries add(const MatrixSeries& a, const MatrixSeries& b);
MatrixSeries sub(const MatrixSeries& a, const MatrixSeries& b);
MatrixSeries neg(MatrixSeries a);
MatrixSeries scale(MatrixSeries a, std::complex<double> c);
MatrixSeries mul(const MatrixSeries& a, const MatrixSeries& b, LossTracker* loss = nullptr);
MatrixSeries compose_deck(const MatrixSeries& m, int gen, const DeckMaps& deck);
MatrixSeries jet_truncate(const MatrixSeries& m, int degree);
MatrixSeries jet_tail(const MatrixSeries& m, int degree);
double majorant_norm(const MatrixSeries& m, const MajorantWeight& w);  // max over entries
MatrixSeries plus_identity(MatrixSeries m);   // m + I
MatrixSeries minus_identity(MatrixSeries m);  // m - I
// inverse of I + phi with phi = O(v), via the terminating Neumann sum
// sum_k (-phi)^k; throws BadJetError when phi has a v-constant term
MatrixSeries neumann_inverse(const MatrixSeries& one_plus_phi, LossTracker* loss = nullptr);
std::vector<std::vector<std::complex<double>>> evaluate(
    const MatrixSeries& m, const std::vector<std::complex<double>>& z,
    const std::vector<std::complex<double>>& v);

}  // namespace kamtriv
