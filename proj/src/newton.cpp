#include "kamtriv/newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "kamtriv/errors.hpp"

namespace kamtriv {

namespace {
// sum_{k>=0} delta0/(k+1)^2 = delta0 pi^2/6
double schedule_tail(double delta0) { return delta0 * std::numbers::pi * std::numbers::pi / 6.0; }
}  // namespace

DomainSchedule::DomainSchedule(double eps0, double r0, double delta0, double kappa)
    : eps0_(eps0), r0_(r0), delta0_(delta0), kappa_(kappa) {
    if (!(eps0 > 0 && eps0 < 1) || !(r0 > 0 && r0 < 1) || !(delta0 > 0 && delta0 < 1))
        throw std::invalid_argument("schedule: eps0, r0, delta0 must lie in (0,1)");
    if (!(kappa > 0)) throw std::invalid_argument("schedule: kappa must be positive");
    // eps_k decreases by 5 delta_k / kappa in total 5 delta0 pi^2 / (6 kappa);
    // r_k by the factor exp(-5 delta0 pi^2 / 6); both limits must clear half
    // the initial value
    const double total = 5.0 * schedule_tail(delta0);
    if (total / kappa >= eps0 / 2.0)
        throw std::invalid_argument(
            "schedule: parameters violate eps_k > eps0/2 (5*delta0*pi^2/(6*kappa) = " +
            std::to_string(total / kappa) + " >= eps0/2 = " + std::to_string(eps0 / 2.0) + ")");
    if (total >= std::numbers::ln2)
        throw std::invalid_argument(
            "schedule: parameters violate r_k > r0/2 (5*delta0*pi^2/6 = " +
            std::to_string(total) + " >= ln 2)");
    eps_.push_back(eps0);
    r_.push_back(r0);
}

double DomainSchedule::delta(int k) const {
    if (k < 0) throw std::invalid_argument("schedule: step index must be >= 0");
    const double kk = static_cast<double>(k) + 1.0;
    return delta0_ / (kk * kk);
}

void DomainSchedule::extend(int k) const {
    while (static_cast<int>(eps_.size()) <= k) {
        const int i = static_cast<int>(eps_.size()) - 1;
        const double dk = delta(i);
        eps_.push_back(eps_[i] - 5.0 * dk / kappa_);
        r_.push_back(r_[i] * std::exp(-5.0 * dk));
    }
}

double DomainSchedule::eps(int k) const {
    if (k < 0) throw std::invalid_argument("schedule: step index must be >= 0");
    extend(k);
    return eps_[k];
}

double DomainSchedule::r(int k) const {
    if (k < 0) throw std::invalid_argument("schedule: step index must be >= 0");
    extend(k);
    return r_[k];
}

Cocycle::Cocycle(DeckMaps deck_, std::vector<MatrixSeries> f_)
    : deck(std::move(deck_)), f(std::move(f_)) {
    if (static_cast<int>(f.size()) != deck.n())
        throw std::invalid_argument("cocycle: expected one deviation per generator");
    const TruncationSpec& spec = f.front().spec();
    if (spec.n != deck.n() || spec.d != deck.d())
        throw std::invalid_argument("cocycle: truncation spec does not match the deck maps");
    for (const auto& fi : f) {
        if (!(fi.spec() == spec) || fi.size() != f.front().size())
            throw std::invalid_argument("cocycle: mismatched deviations");
        if (fi.has_v_constant_term())
            throw BadJetError("cocycle: deviation has a v-constant term");
    }
}

double automorphy_residual(const Cocycle& c, const MajorantWeight& w) {
    const int n = c.deck.n();
    double worst = 0;
    std::vector<MatrixSeries> F;
    F.reserve(n);
    for (const auto& fi : c.f) F.push_back(plus_identity(fi));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const MatrixSeries lhs = mul(compose_deck(F[j], i, c.deck), F[i]);
            const MatrixSeries rhs = mul(compose_deck(F[i], j, c.deck), F[j]);
            worst = std::max(worst, majorant_norm(sub(lhs, rhs), w));
        }
    return worst;
}

NewtonStepResult newton_step(const Cocycle& c, int k, const DomainSchedule& sched,
                             const NewtonOptions& opts) {
    if (k < 0) throw std::invalid_argument("newton_step: step index must be >= 0");
    const long long m = k < 62 ? (1LL << k) - 1 : std::numeric_limits<long long>::max() / 4;
    const int jet_cut = static_cast<int>(
        std::min<long long>(2 * m + 1, c.spec().taylor_degree));

    const double dk = sched.delta(k);
    const MajorantWeight w_entry(c.deck.lattice(), sched.eps(k), sched.r(k));
    const MajorantWeight w_sol(c.deck.lattice(), sched.eps(k) - dk / sched.kappa(),
                               sched.r(k) * std::exp(-dk));
    const MajorantWeight w_exit(c.deck.lattice(), sched.eps(k + 1), sched.r(k + 1));

    StepRecord rec;
    rec.k = k;
    rec.m = m;
    rec.delta_k = dk;
    rec.eps_k = sched.eps(k);
    rec.r_k = sched.r(k);
    for (const auto& fi : c.f) rec.f_norm = std::max(rec.f_norm, majorant_norm(fi, w_entry));
    rec.entry_hypothesis = rec.f_norm <= std::pow(dk, opts.mu_exp);

    // linearized equation: L_i(phi) = -J(f_i) on the jet window
    std::vector<MatrixSeries> rhs;
    rhs.reserve(c.f.size());
    for (const auto& fi : c.f) rhs.push_back(neg(jet_truncate(fi, jet_cut)));
    SolveOptions sopts;
    sopts.resonance_threshold = opts.resonance_threshold;
    sopts.drop_tolerance = opts.tolerance;
    sopts.compat_tolerance = opts.compat_tolerance;
    const CohomologySolution sol = solve_cohomology(rhs, c.deck, w_sol, sopts);
    rec.phi_norm = majorant_norm(sol.g, w_sol);
    rec.min_divisor = sol.min_divisor;

    // conjugate: the new deviation is (phi(deck_i) f_i + (f_i - J f_i)) (I + phi)^{-1}
    LossTracker loss(w_exit);
    const MatrixSeries inv = neumann_inverse(plus_identity(sol.g), &loss);
    std::vector<MatrixSeries> f_plus;
    f_plus.reserve(c.f.size());
    for (int i = 0; i < static_cast<int>(c.f.size()); ++i) {
        const MatrixSeries phi_tau = compose_deck(sol.g, i, c.deck);
        const MatrixSeries numerator =
            add(mul(phi_tau, c.f[i], &loss), jet_tail(c.f[i], jet_cut));
        f_plus.push_back(mul(numerator, inv, &loss));
    }
    rec.trunc_loss = loss.total();

    Cocycle next(c.deck, std::move(f_plus));
    auto deg = std::optional<int>{};
    for (const auto& fi : next.f) {
        auto d = fi.min_v_degree();
        if (d && (!deg || *d < *deg)) deg = d;
    }
    rec.min_vdeg = deg.value_or(-1);
    rec.automorphy_res = automorphy_residual(next, w_exit);
    double exit_norm = 0;
    for (const auto& fi : next.f) exit_norm = std::max(exit_norm, majorant_norm(fi, w_exit));
    rec.decay_ok = exit_norm <= std::pow(sched.delta(k + 1), opts.mu_exp);

    return NewtonStepResult{sol.g, std::move(next), rec};
}

double conjugation_residual(const Cocycle& original, const MatrixSeries& frame,
                            const MajorantWeight& w) {
    const MatrixSeries inv = neumann_inverse(frame);
    double worst = 0;
    for (int i = 0; i < original.deck.n(); ++i) {
        const MatrixSeries conj =
            mul(mul(compose_deck(frame, i, original.deck), plus_identity(original.f[i])), inv);
        worst = std::max(worst, majorant_norm(minus_identity(conj), w));
    }
    return worst;
}

TrivializeResult trivialize(const Cocycle& c, const DomainSchedule& sched,
                            const NewtonOptions& opts) {
    const int m_max = c.spec().taylor_degree;
    MatrixSeries frame = MatrixSeries::identity(c.spec(), c.size());
    Cocycle cur = c;
    ConvergenceReport rep;

    int k = 0;
    for (;; ++k) {
        const MajorantWeight w_k(cur.deck.lattice(), sched.eps(k), sched.r(k));
        double f_norm = 0;
        for (const auto& fi : cur.f) f_norm = std::max(f_norm, majorant_norm(fi, w_k));
        if (k == 0 && opts.mu_exp > 0)
            rep.delta0_suggested = f_norm > 0 ? std::pow(f_norm, 1.0 / opts.mu_exp) : 0.0;

        if (f_norm <= opts.tolerance) {
            rep.verdict = "converged";
            break;
        }
        const long long m = k < 62 ? (1LL << k) - 1 : std::numeric_limits<long long>::max() / 4;
        if (2 * m + 1 > m_max) {
            // jet window exceeds the truncation order: nothing left to solve for
            rep.verdict = "truncation_limited";
            break;
        }
        if (k >= opts.max_steps) {
            rep.verdict = "max_steps";
            break;
        }

        NewtonStepResult step = newton_step(cur, k, sched, opts);
        if (rep.feasibility_k0 < 0 && step.record.entry_hypothesis) rep.feasibility_k0 = k;

        const MajorantWeight w_exit(cur.deck.lattice(), sched.eps(k + 1), sched.r(k + 1));
        LossTracker frame_loss(w_exit);
        frame = mul(plus_identity(step.phi), frame, &frame_loss);
        rep.total_trunc_loss += step.record.trunc_loss + frame_loss.total();
        rep.steps.push_back(step.record);
        cur = std::move(step.next);

        const int s = static_cast<int>(rep.steps.size());
        if (s >= 3 && rep.steps[s - 1].f_norm > rep.steps[s - 2].f_norm &&
            rep.steps[s - 2].f_norm > rep.steps[s - 3].f_norm)
            throw DivergedError(k, rep.steps[s - 2].f_norm, rep.steps[s - 1].f_norm);
    }

    rep.final_eps = sched.eps(k);
    rep.final_r = sched.r(k);
    const MajorantWeight w_final(cur.deck.lattice(), rep.final_eps, rep.final_r);
    for (const auto& fi : cur.f)
        rep.final_f_norm = std::max(rep.final_f_norm, majorant_norm(fi, w_final));
    rep.final_residual = conjugation_residual(c, frame, w_final);
    return TrivializeResult{std::move(frame), std::move(rep)};
}

}  // namespace kamtriv
