#include "kamtriv/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace kamtriv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// LU with partial pivoting; returns the inverse's infinity norm, or nullopt
// when a pivot collapses relative to the matrix scale.
std::optional<double> inverse_inf_norm(std::vector<std::vector<double>> a) {
    const int n = static_cast<int>(a.size());
    double scale = 0;
    for (const auto& row : a)
        for (double x : row) scale = std::max(scale, std::abs(x));
    if (scale == 0) return std::nullopt;

    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-12 * scale) return std::nullopt;
        std::swap(a[col], a[piv]);
        std::swap(perm[col], perm[piv]);
        for (int r = col + 1; r < n; ++r) {
            a[r][col] /= a[col][col];
            for (int c = col + 1; c < n; ++c) a[r][c] -= a[r][col] * a[col][c];
        }
    }
    // solve for each unit vector to assemble the inverse row sums
    double norm = 0;
    std::vector<double> x(n), col_abs_sum(n, 0.0);
    for (int e = 0; e < n; ++e) {
        for (int i = 0; i < n; ++i) x[i] = perm[i] == e ? 1.0 : 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j) x[i] -= a[i][j] * x[j];
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j) x[i] -= a[i][j] * x[j];
            x[i] /= a[i][i];
        }
        for (int i = 0; i < n; ++i) col_abs_sum[i] += std::abs(x[i]);
    }
    for (int i = 0; i < n; ++i) norm = std::max(norm, col_abs_sum[i]);
    return norm;
}

double frac_centered(double x) { return x - std::round(x); }

}  // namespace

TorusLattice TorusLattice::make(int n, std::vector<std::vector<std::complex<double>>> rows) {
    if (n < 1) throw std::invalid_argument("lattice: n must be >= 1");
    if (static_cast<int>(rows.size()) != n)
        throw std::invalid_argument("lattice: expected " + std::to_string(n) + " rows");
    for (const auto& row : rows)
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("lattice: each row needs " + std::to_string(n) +
                                        " entries");
    TorusLattice lat{n, std::move(rows)};
    std::vector<std::vector<double>> im(n, std::vector<double>(n));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) im[j][k] = lat.rows[j][k].imag();
    if (!inverse_inf_norm(im))
        throw std::invalid_argument("lattice: Im matrix is singular; not a torus basis");
    return lat;
}

TorusLattice TorusLattice::elliptic(std::complex<double> tau) {
    return make(1, {{tau}});
}

double TorusLattice::im_inverse_inf_norm() const {
    std::vector<std::vector<double>> im(n, std::vector<double>(n));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) im[j][k] = rows[j][k].imag();
    auto norm = inverse_inf_norm(std::move(im));
    if (!norm) throw std::invalid_argument("lattice: Im matrix is singular");
    return *norm;
}

FlatBundleData FlatBundleData::make(int n, int d, std::vector<std::vector<double>> theta) {
    if (d < 1) throw std::invalid_argument("bundle: d must be >= 1");
    if (static_cast<int>(theta.size()) != n)
        throw std::invalid_argument("bundle: expected one theta row per generator (" +
                                    std::to_string(n) + ")");
    for (auto& row : theta) {
        if (static_cast<int>(row.size()) != d)
            throw std::invalid_argument("bundle: each theta row needs " + std::to_string(d) +
                                        " entries");
        for (double& t : row) {
            if (!std::isfinite(t)) throw std::invalid_argument("bundle: theta must be finite");
            t -= std::floor(t);  // normalize into [0,1)
        }
    }
    return FlatBundleData{d, std::move(theta)};
}

DeckMaps::DeckMaps(TorusLattice lattice, FlatBundleData bundle)
    : lattice_(std::move(lattice)), bundle_(std::move(bundle)) {
    // re-validate: callers may aggregate-initialize the inputs
    lattice_ = TorusLattice::make(lattice_.n, lattice_.rows);
    bundle_ = FlatBundleData::make(lattice_.n, bundle_.d, bundle_.theta);
    const int n = lattice_.n;
    re_e_.assign(n, std::vector<double>(n));
    im_e_.assign(n, std::vector<double>(n));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            re_e_[j][k] = lattice_.rows[j][k].real();
            im_e_[j][k] = lattice_.rows[j][k].imag();
        }
    theta_ = bundle_.theta;
}

std::complex<double> DeckMaps::lambda(int j, int k) const {
    return std::exp(-kTwoPi * im_e_[j][k]) *
           std::polar(1.0, kTwoPi * frac_centered(re_e_[j][k]));
}

std::complex<double> DeckMaps::mu(int j, int l) const {
    return std::polar(1.0, kTwoPi * frac_centered(theta_[j][l]));
}

std::complex<double> DeckMaps::scalar_lambda() const {
    if (lattice_.n != 1) throw std::invalid_argument("scalar_lambda: lattice dimension is not 1");
    return lambda(0, 0);
}

double DeckMaps::log_modulus(int j, const std::vector<int>& P) const {
    double s = 0;
    for (int k = 0; k < lattice_.n; ++k) s += P[k] * im_e_[j][k];
    return -kTwoPi * s;
}

namespace {
// |e^L e^{2 pi i a} - c| for unit c = e^{2 pi i b}; accurate near zero
double divisor_against(double log_mod, double angle_turns, double target_turns) {
    const double a = frac_centered(angle_turns - target_turns);
    if (log_mod == 0.0) return 2.0 * std::abs(std::sin(std::numbers::pi * a));
    return std::abs(std::exp(log_mod) * std::polar(1.0, kTwoPi * a) - 1.0);
}
}  // namespace

std::complex<double> DeckMaps::multiplier(int j, const std::vector<int>& P,
                                          const std::vector<int>& Q) const {
    if (j < 0 || j >= lattice_.n) throw std::invalid_argument("multiplier: generator out of range");
    if (static_cast<int>(P.size()) != lattice_.n || static_cast<int>(Q.size()) != bundle_.d)
        throw std::invalid_argument("multiplier: index length mismatch");
    double angle = 0;
    for (int k = 0; k < lattice_.n; ++k) angle += P[k] * re_e_[j][k];
    for (int l = 0; l < bundle_.d; ++l) angle += Q[l] * theta_[j][l];
    return std::exp(log_modulus(j, P)) * std::polar(1.0, kTwoPi * frac_centered(angle));
}

double DeckMaps::unit_divisor(int j, const std::vector<int>& P,
                              const std::vector<int>& Q) const {
    if (j < 0 || j >= lattice_.n) throw std::invalid_argument("unit_divisor: generator out of range");
    if (static_cast<int>(P.size()) != lattice_.n || static_cast<int>(Q.size()) != bundle_.d)
        throw std::invalid_argument("unit_divisor: index length mismatch");
    double angle = 0;
    for (int k = 0; k < lattice_.n; ++k) angle += P[k] * re_e_[j][k];
    for (int l = 0; l < bundle_.d; ++l) angle += Q[l] * theta_[j][l];
    return divisor_against(log_modulus(j, P), angle, 0.0);
}

std::vector<double> DeckMaps::small_divisor(const std::vector<int>& P, const std::vector<int>& Q,
                                            int target) const {
    if (target < 0 || target >= bundle_.d)
        throw std::invalid_argument("small_divisor: target out of range");
    if (static_cast<int>(P.size()) != lattice_.n || static_cast<int>(Q.size()) != bundle_.d)
        throw std::invalid_argument("small_divisor: index length mismatch");
    std::vector<double> out(lattice_.n);
    for (int j = 0; j < lattice_.n; ++j) {
        double angle = 0;
        for (int k = 0; k < lattice_.n; ++k) angle += P[k] * re_e_[j][k];
        for (int l = 0; l < bundle_.d; ++l) angle += Q[l] * theta_[j][l];
        out[j] = divisor_against(log_modulus(j, P), angle, theta_[j][target]);
    }
    return out;
}

DioVariant dio_variant_from_string(const std::string& s) {
    if (s == "vd") return DioVariant::vd;
    if (s == "svd") return DioVariant::svd;
    if (s == "hd") return DioVariant::hd;
    if (s == "dv") return DioVariant::dv;
    throw std::invalid_argument("unknown diophantine variant: " + s);
}

std::string to_string(DioVariant v) {
    switch (v) {
        case DioVariant::vd: return "vd";
        case DioVariant::svd: return "svd";
        case DioVariant::hd: return "hd";
        case DioVariant::dv: return "dv";
    }
    return "?";
}

namespace {

struct Fit {
    double d = 0, tau = 0;
};

// least squares on (log s, log divisor); the envelope is strictly decreasing
// so the slope is negative and tau = -slope > 0
Fit fit_envelope(const std::vector<std::pair<int, double>>& env) {
    if (env.empty()) return {0.0, 0.0};
    if (env.size() == 1) return {env.front().second, 0.0};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(env.size());
    for (const auto& [s, dv] : env) {
        const double x = std::log(static_cast<double>(s));
        const double y = std::log(dv);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double var = sxx - sx * sx / m;
    if (var <= 0) return {env.back().second, 0.0};
    const double slope = (sxy - sx * sy / m) / var;
    const double intercept = (sy - slope * sx) / m;
    return {std::exp(intercept), -slope};
}

void enumerate_q(int d, int remaining, std::vector<int>& q, const std::function<void()>& visit,
                 int pos = 0) {
    if (pos == d - 1) {
        for (int last = 0; last <= remaining; ++last) {
            q[pos] = last;
            visit();
        }
        q[pos] = 0;
        return;
    }
    for (int v = 0; v <= remaining; ++v) {
        q[pos] = v;
        enumerate_q(d, remaining - v, q, visit, pos + 1);
    }
    q[pos] = 0;
}

}  // namespace

DiophantineReport diophantine_scan(const DeckMaps& deck, const ScanOptions& opts) {
    if (opts.bound < 1) throw std::invalid_argument("scan: bound must be >= 1");
    const int n = deck.n();
    const int d = deck.d();
    if (opts.variant == DioVariant::hd && n != 1)
        throw std::invalid_argument(
            "scan: variant hd compares against the scalar lambda and needs lattice dimension 1");

    DiophantineReport rep;
    rep.variant = opts.variant;
    rep.bound = opts.bound;

    // Fourier window: outside |P|_inf <= window some generator's lambda_j^P
    // modulus is at least 2 or at most 1/2, so divisors stay above the
    // certified bound and those modes cannot matter.
    const double inv_norm = deck.lattice().im_inverse_inf_norm();
    const double c0 = 1.0 / inv_norm;  // max_j |P . Im e_{n+j}| >= c0 |P|_inf
    int window = static_cast<int>(std::ceil(opts.bound * std::numbers::ln2 / (kTwoPi * c0)));
    window = std::max(window, 1);
    rep.p_window = window;
    switch (opts.variant) {
        case DioVariant::vd:
        case DioVariant::dv:
            rep.excluded_divisor_bound = 0.5;
            break;
        case DioVariant::svd:
            rep.excluded_divisor_bound = n == 1 ? 0.5 : 0.0;  // no certificate for n >= 2
            break;
        case DioVariant::hd:
            rep.excluded_divisor_bound = 0.5 * std::abs(deck.scalar_lambda());
            break;
    }

    const int min_vdeg = opts.variant == DioVariant::dv ? 2 : 0;
    std::map<int, ScannedMode> champion;  // min divisor per order s (non-resonant)
    std::vector<int> P(n, -window), Q(d, 0);

    auto visit_mode = [&](int target) {
        int abs_p = 0;
        for (int pk : P) abs_p += std::abs(pk);
        int abs_q = 0;
        for (int ql : Q) abs_q += ql;
        const int s = abs_p + abs_q;
        if (s == 0 || s > opts.bound || abs_q < min_vdeg) return;

        double divisor = 0;
        switch (opts.variant) {
            case DioVariant::vd:
            case DioVariant::dv: {
                // tautological zero: P = 0 and Q = e_target
                if (opts.variant == DioVariant::vd && abs_p == 0 && abs_q == 1 &&
                    Q[target] == 1)
                    return;
                auto per = deck.small_divisor(P, Q, target);
                divisor = *std::max_element(per.begin(), per.end());
                break;
            }
            case DioVariant::svd: {
                if (abs_p == 0 && abs_q == 1 && Q[target] == 1) return;
                auto per = deck.small_divisor(P, Q, target);
                divisor = *std::min_element(per.begin(), per.end());
                break;
            }
            case DioVariant::hd: {
                if (abs_q == 0 && P[0] == 1) return;  // lambda - lambda
                const std::complex<double> m = deck.multiplier(0, P, Q);
                divisor = std::abs(m - deck.scalar_lambda());
                break;
            }
        }

        ++rep.modes_scanned;
        ScannedMode mode{P, Q, opts.variant == DioVariant::hd ? -1 : target, divisor, s};
        if (opts.mode_sink) opts.mode_sink(mode);
        if (divisor < opts.resonance_threshold) {
            ++rep.resonance_count;
            if (rep.resonances.size() < 128) rep.resonances.push_back(mode);
            return;
        }
        auto it = champion.find(s);
        if (it == champion.end())
            champion.emplace(s, std::move(mode));
        else if (divisor < it->second.divisor)
            it->second = std::move(mode);
    };

    // P ranges over the full window box, Q over |Q|_1 <= bound, targets over
    // the fiber (except hd): deterministic lexicographic order throughout
    const int targets = opts.variant == DioVariant::hd ? 1 : d;
    while (true) {
        enumerate_q(d, opts.bound, Q, [&] {
            for (int t = 0; t < targets; ++t) visit_mode(t);
        });
        int k = n - 1;
        while (k >= 0 && P[k] == window) P[k--] = -window;
        if (k < 0) break;
        ++P[k];
    }

    // effective lower envelope: running minima over increasing order
    double running = std::numeric_limits<double>::infinity();
    double min_ds = std::numeric_limits<double>::infinity();
    for (const auto& [s, mode] : champion) {
        min_ds = std::min(min_ds, mode.divisor * s);
        if (mode.divisor < running) {
            running = mode.divisor;
            rep.envelope.emplace_back(s, mode.divisor);
        }
    }
    rep.min_divisor_times_s = champion.empty() ? 0.0 : min_ds;

    const Fit full = fit_envelope(rep.envelope);
    rep.fitted_d = full.d;
    rep.fitted_tau = full.tau;
    std::vector<std::pair<int, double>> half;
    for (const auto& e : rep.envelope)
        if (e.first <= opts.bound / 2) half.push_back(e);
    rep.fitted_tau_half = fit_envelope(half).tau;

    std::vector<ScannedMode> worst;
    worst.reserve(champion.size());
    for (const auto& [s, mode] : champion) worst.push_back(mode);
    std::stable_sort(worst.begin(), worst.end(), [&](const ScannedMode& a, const ScannedMode& b) {
        return a.divisor * std::pow(a.s, rep.fitted_tau) <
               b.divisor * std::pow(b.s, rep.fitted_tau);
    });
    if (static_cast<int>(worst.size()) > opts.worst_count) worst.resize(opts.worst_count);
    rep.worst = std::move(worst);

    if (rep.resonance_count > 0)
        rep.verdict = "resonant";
    else if (rep.envelope.size() >= 2 && rep.fitted_tau > rep.fitted_tau_half + 0.25)
        rep.verdict = "liouville_suspect";
    else
        rep.verdict = "diophantine";
    return rep;
}

double fitted_d_for_tau(const DiophantineReport& report, double tau) {
    if (tau < 0) throw std::invalid_argument("fitted_d_for_tau: tau must be >= 0");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [s, dv] : report.envelope)
        best = std::min(best, dv * std::pow(static_cast<double>(s), tau));
    return std::isfinite(best) ? best : 0.0;
}

}  // namespace kamtriv
