#include "kamtriv/series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kamtriv/errors.hpp"

namespace kamtriv {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_same_spec(const TruncationSpec& a, const TruncationSpec& b, const char* op) {
    if (!(a == b))
        throw std::invalid_argument(std::string(op) + ": truncation specs differ");
}
}  // namespace

void TruncationSpec::validate() const {
    if (n < 1) throw std::invalid_argument("truncation: n must be >= 1");
    if (d < 1) throw std::invalid_argument("truncation: d must be >= 1");
    if (fourier_cutoff < 0) throw std::invalid_argument("truncation: fourier_cutoff must be >= 0");
    if (taylor_degree < 0) throw std::invalid_argument("truncation: taylor_degree must be >= 0");
}

int Mode::v_degree() const {
    int s = 0;
    for (int x : q) s += x;
    return s;
}

int Mode::order() const {
    int s = v_degree();
    for (int x : p) s += std::abs(x);
    return s;
}

void LossTracker::note(const Mode& mode, double coeff_mag) {
    total_ += coeff_mag * (*weight_)(mode);
}

FourierTaylorSeries::FourierTaylorSeries(TruncationSpec spec) : spec_(spec) {
    spec_.validate();
}

FourierTaylorSeries FourierTaylorSeries::constant(TruncationSpec spec, std::complex<double> c) {
    FourierTaylorSeries f(spec);
    f.set(Mode{std::vector<int>(spec.n, 0), std::vector<int>(spec.d, 0)}, c);
    return f;
}

FourierTaylorSeries FourierTaylorSeries::monomial(TruncationSpec spec, Mode mode,
                                                  std::complex<double> c) {
    FourierTaylorSeries f(spec);
    f.set(mode, c);
    return f;
}

std::complex<double> FourierTaylorSeries::at(const Mode& mode) const {
    auto it = coeffs_.find(mode);
    return it == coeffs_.end() ? std::complex<double>{0.0, 0.0} : it->second;
}

bool FourierTaylorSeries::in_bounds(const Mode& mode) const {
    if (static_cast<int>(mode.p.size()) != spec_.n || static_cast<int>(mode.q.size()) != spec_.d)
        return false;
    for (int x : mode.p)
        if (std::abs(x) > spec_.fourier_cutoff) return false;
    int deg = 0;
    for (int x : mode.q) {
        if (x < 0) return false;
        deg += x;
    }
    return deg <= spec_.taylor_degree;
}

void FourierTaylorSeries::set(const Mode& mode, std::complex<double> c) {
    if (!in_bounds(mode)) throw std::invalid_argument("series: mode outside truncation bounds");
    if (c == std::complex<double>{0.0, 0.0})
        coeffs_.erase(mode);
    else
        coeffs_[mode] = c;
}

void FourierTaylorSeries::accumulate(const Mode& mode, std::complex<double> c,
                                     LossTracker* loss) {
    if (!in_bounds(mode)) {
        if (loss) loss->note(mode, std::abs(c));
        return;
    }
    auto [it, inserted] = coeffs_.try_emplace(mode, c);
    if (!inserted) {
        it->second += c;
        if (it->second == std::complex<double>{0.0, 0.0}) coeffs_.erase(it);
    } else if (c == std::complex<double>{0.0, 0.0}) {
        coeffs_.erase(it);
    }
}

std::optional<int> FourierTaylorSeries::min_v_degree() const {
    std::optional<int> best;
    for (const auto& [mode, c] : coeffs_) {
        const int deg = mode.v_degree();
        if (!best || deg < *best) best = deg;
    }
    return best;
}

bool FourierTaylorSeries::has_v_constant_term() const {
    auto deg = min_v_degree();
    return deg && *deg == 0;
}

void FourierTaylorSeries::prune(double threshold) {
    for (auto it = coeffs_.begin(); it != coeffs_.end();)
        it = std::abs(it->second) <= threshold ? coeffs_.erase(it) : std::next(it);
}

MajorantWeight::MajorantWeight(TorusLattice lattice, double epsilon, double r)
    : lattice_(std::move(lattice)), epsilon_(epsilon), r_(r) {
    if (!(epsilon >= 0) || !(r >= 0))
        throw std::invalid_argument("majorant weight: epsilon and r must be >= 0");
    im_rows_.assign(lattice_.n, std::vector<double>(lattice_.n));
    for (int j = 0; j < lattice_.n; ++j)
        for (int k = 0; k < lattice_.n; ++k) im_rows_[j][k] = lattice_.rows[j][k].imag();
}

double MajorantWeight::operator()(const Mode& mode) const {
    // sup of |h^P| over the epsilon-extended fundamental box: for each lattice
    // direction the linear form t_j (P . Im e_{n+j}) is minimized at a vertex
    // t_j in {-eps, 1+eps}
    double exponent = 0;
    for (int j = 0; j < lattice_.n; ++j) {
        double s = 0;
        for (int k = 0; k < lattice_.n; ++k) s += mode.p[k] * im_rows_[j][k];
        exponent += std::max(epsilon_ * s, -(1.0 + epsilon_) * s);
    }
    return std::exp(kTwoPi * exponent) * std::pow(r_, mode.v_degree());
}

FourierTaylorSeries add(const FourierTaylorSeries& a, const FourierTaylorSeries& b) {
    require_same_spec(a.spec(), b.spec(), "add");
    FourierTaylorSeries out = a;
    for (const auto& [mode, c] : b.coeffs()) out.accumulate(mode, c);
    return out;
}

FourierTaylorSeries sub(const FourierTaylorSeries& a, const FourierTaylorSeries& b) {
    require_same_spec(a.spec(), b.spec(), "sub");
    FourierTaylorSeries out = a;
    for (const auto& [mode, c] : b.coeffs()) out.accumulate(mode, -c);
    return out;
}

FourierTaylorSeries neg(FourierTaylorSeries a) { return scale(std::move(a), {-1.0, 0.0}); }

FourierTaylorSeries scale(FourierTaylorSeries a, std::complex<double> c) {
    FourierTaylorSeries out(a.spec());
    if (c == std::complex<double>{0.0, 0.0}) return out;
    for (const auto& [mode, x] : a.coeffs()) out.set(mode, x * c);
    return out;
}

FourierTaylorSeries mul(const FourierTaylorSeries& a, const FourierTaylorSeries& b,
                        LossTracker* loss) {
    require_same_spec(a.spec(), b.spec(), "mul");
    FourierTaylorSeries out(a.spec());
    const int n = a.spec().n, d = a.spec().d;
    Mode sum{std::vector<int>(n), std::vector<int>(d)};
    for (const auto& [ma, ca] : a.coeffs()) {
        for (const auto& [mb, cb] : b.coeffs()) {
            for (int k = 0; k < n; ++k) sum.p[k] = ma.p[k] + mb.p[k];
            for (int l = 0; l < d; ++l) sum.q[l] = ma.q[l] + mb.q[l];
            out.accumulate(sum, ca * cb, loss);
        }
    }
    return out;
}

FourierTaylorSeries compose_deck(const FourierTaylorSeries& f, int gen, const DeckMaps& deck) {
    if (deck.n() != f.spec().n || deck.d() != f.spec().d)
        throw std::invalid_argument("compose_deck: deck dimensions do not match the series");
    FourierTaylorSeries out(f.spec());
    for (const auto& [mode, c] : f.coeffs())
        out.set(mode, c * deck.multiplier(gen, mode.p, mode.q));
    return out;
}

FourierTaylorSeries jet_truncate(const FourierTaylorSeries& f, int degree) {
    FourierTaylorSeries out(f.spec());
    for (const auto& [mode, c] : f.coeffs())
        if (mode.v_degree() <= degree) out.set(mode, c);
    return out;
}

FourierTaylorSeries jet_tail(const FourierTaylorSeries& f, int degree) {
    FourierTaylorSeries out(f.spec());
    for (const auto& [mode, c] : f.coeffs())
        if (mode.v_degree() > degree) out.set(mode, c);
    return out;
}

double majorant_norm(const FourierTaylorSeries& f, const MajorantWeight& w) {
    if (w.lattice().n != f.spec().n)
        throw std::invalid_argument("majorant_norm: weight lattice dimension mismatch");
    double total = 0;
    for (const auto& [mode, c] : f.coeffs()) total += std::abs(c) * w(mode);
    return total;
}

std::complex<double> evaluate(const FourierTaylorSeries& f,
                              const std::vector<std::complex<double>>& z,
                              const std::vector<std::complex<double>>& v) {
    if (static_cast<int>(z.size()) != f.spec().n || static_cast<int>(v.size()) != f.spec().d)
        throw std::invalid_argument("evaluate: point dimension mismatch");
    std::complex<double> total = 0;
    const std::complex<double> two_pi_i{0.0, kTwoPi};
    for (const auto& [mode, c] : f.coeffs()) {
        std::complex<double> dot = 0;
        for (int k = 0; k < f.spec().n; ++k) dot += static_cast<double>(mode.p[k]) * z[k];
        std::complex<double> term = c * std::exp(two_pi_i * dot);
        for (int l = 0; l < f.spec().d; ++l)
            for (int rep = 0; rep < mode.q[l]; ++rep) term *= v[l];
        total += term;
    }
    return total;
}

MatrixSeries::MatrixSeries(TruncationSpec spec, int size) : spec_(spec), size_(size) {
    spec_.validate();
    if (size < 1) throw std::invalid_argument("matrix series: size must be >= 1");
    entries_.assign(static_cast<std::size_t>(size) * size, FourierTaylorSeries(spec));
}

MatrixSeries MatrixSeries::identity(TruncationSpec spec, int size) {
    MatrixSeries m(spec, size);
    for (int i = 0; i < size; ++i)
        m.at(i, i) = FourierTaylorSeries::constant(spec, {1.0, 0.0});
    return m;
}

FourierTaylorSeries& MatrixSeries::at(int row, int col) {
    if (row < 0 || row >= size_ || col < 0 || col >= size_)
        throw std::out_of_range("matrix series: entry out of range");
    return entries_[static_cast<std::size_t>(row) * size_ + col];
}

const FourierTaylorSeries& MatrixSeries::at(int row, int col) const {
    if (row < 0 || row >= size_ || col < 0 || col >= size_)
        throw std::out_of_range("matrix series: entry out of range");
    return entries_[static_cast<std::size_t>(row) * size_ + col];
}

bool MatrixSeries::empty() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const FourierTaylorSeries& f) { return f.empty(); });
}

std::optional<int> MatrixSeries::min_v_degree() const {
    std::optional<int> best;
    for (const auto& e : entries_) {
        auto deg = e.min_v_degree();
        if (deg && (!best || *deg < *best)) best = deg;
    }
    return best;
}

bool MatrixSeries::has_v_constant_term() const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [](const FourierTaylorSeries& f) { return f.has_v_constant_term(); });
}

void MatrixSeries::prune(double threshold) {
    for (auto& e : entries_) e.prune(threshold);
}

namespace {
MatrixSeries zip(const MatrixSeries& a, const MatrixSeries& b,
                 FourierTaylorSeries (*op)(const FourierTaylorSeries&,
                                           const FourierTaylorSeries&),
                 const char* name) {
    require_same_spec(a.spec(), b.spec(), name);
    if (a.size() != b.size()) throw std::invalid_argument(std::string(name) + ": size mismatch");
    MatrixSeries out(a.spec(), a.size());
    for (int r = 0; r < a.size(); ++r)
        for (int c = 0; c < a.size(); ++c) out.at(r, c) = op(a.at(r, c), b.at(r, c));
    return out;
}
}  // namespace

MatrixSeries add(const MatrixSeries& a, const MatrixSeries& b) { return zip(a, b, add, "add"); }
MatrixSeries sub(const MatrixSeries& a, const MatrixSeries& b) { return zip(a, b, sub, "sub"); }

MatrixSeries neg(MatrixSeries a) { return scale(std::move(a), {-1.0, 0.0}); }

MatrixSeries scale(MatrixSeries a, std::complex<double> c) {
    MatrixSeries out(a.spec(), a.size());
    for (int r = 0; r < a.size(); ++r)
        for (int col = 0; col < a.size(); ++col) out.at(r, col) = scale(a.at(r, col), c);
    return out;
}

MatrixSeries mul(const MatrixSeries& a, const MatrixSeries& b, LossTracker* loss) {
    require_same_spec(a.spec(), b.spec(), "mul");
    if (a.size() != b.size()) throw std::invalid_argument("mul: matrix size mismatch");
    MatrixSeries out(a.spec(), a.size());
    for (int r = 0; r < a.size(); ++r)
        for (int c = 0; c < a.size(); ++c) {
            FourierTaylorSeries acc(a.spec());
            for (int k = 0; k < a.size(); ++k)
                acc = add(acc, mul(a.at(r, k), b.at(k, c), loss));
            out.at(r, c) = std::move(acc);
        }
    return out;
}

MatrixSeries compose_deck(const MatrixSeries& m, int gen, const DeckMaps& deck) {
    MatrixSeries out(m.spec(), m.size());
    for (int r = 0; r < m.size(); ++r)
        for (int c = 0; c < m.size(); ++c) out.at(r, c) = compose_deck(m.at(r, c), gen, deck);
    return out;
}

MatrixSeries jet_truncate(const MatrixSeries& m, int degree) {
    MatrixSeries out(m.spec(), m.size());
    for (int r = 0; r < m.size(); ++r)
        for (int c = 0; c < m.size(); ++c) out.at(r, c) = jet_truncate(m.at(r, c), degree);
    return out;
}

MatrixSeries jet_tail(const MatrixSeries& m, int degree) {
    MatrixSeries out(m.spec(), m.size());
    for (int r = 0; r < m.size(); ++r)
        for (int c = 0; c < m.size(); ++c) out.at(r, c) = jet_tail(m.at(r, c), degree);
    return out;
}

double majorant_norm(const MatrixSeries& m, const MajorantWeight& w) {
    double worst = 0;
    for (int r = 0; r < m.size(); ++r)
        for (int c = 0; c < m.size(); ++c)
            worst = std::max(worst, majorant_norm(m.at(r, c), w));
    return worst;
}

MatrixSeries plus_identity(MatrixSeries m) {
    const Mode zero{std::vector<int>(m.spec().n, 0), std::vector<int>(m.spec().d, 0)};
    for (int i = 0; i < m.size(); ++i) m.at(i, i).accumulate(zero, {1.0, 0.0});
    return m;
}

MatrixSeries minus_identity(MatrixSeries m) {
    const Mode zero{std::vector<int>(m.spec().n, 0), std::vector<int>(m.spec().d, 0)};
    for (int i = 0; i < m.size(); ++i) m.at(i, i).accumulate(zero, {-1.0, 0.0});
    return m;
}

MatrixSeries neumann_inverse(const MatrixSeries& one_plus_phi, LossTracker* loss) {
    const MatrixSeries phi = minus_identity(one_plus_phi);
    if (phi.has_v_constant_term())
        throw BadJetError("neumann_inverse: deviation from identity has a v-constant term");
    MatrixSeries result = MatrixSeries::identity(phi.spec(), phi.size());
    MatrixSeries term = MatrixSeries::identity(phi.spec(), phi.size());
    // sum of (-phi)^k; each factor raises the v-degree, so the loop ends
    // after at most taylor_degree + 1 terms
    for (int it = 0; it < phi.spec().taylor_degree + 1; ++it) {
        term = neg(mul(term, phi, loss));
        if (term.empty()) break;
        result = add(result, term);
    }
    return result;
}

std::vector<std::vector<std::complex<double>>> evaluate(
    const MatrixSeries& m, const std::vector<std::complex<double>>& z,
    const std::vector<std::complex<double>>& v) {
    std::vector<std::vector<std::complex<double>>> out(
        m.size(), std::vector<std::complex<double>>(m.size()));
    for (int r = 0; r < m.size(); ++r)
        for (int c = 0; c < m.size(); ++c) out[r][c] = evaluate(m.at(r, c), z, v);
    return out;
}

}  // namespace kamtriv
