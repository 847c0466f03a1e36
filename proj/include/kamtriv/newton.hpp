// Quadratic Newton scheme trivializing a cocycle F_i = I + f_i (f_i = O(v))
// over the deck maps: each step solves the linearized (cohomological)
// equation on a doubling jet window, conjugates, and shrinks the domain along
// a fixed summable schedule.  The accumulated left product of the per-step
// factors converges to the trivializing frame.
#pragma once

#include <string>
#include <vector>

#include "kamtriv/cohomology.hpp"
#include "kamtriv/series.hpp"

namespace kamtriv {

// delta_k = delta0 / (k+1)^2, eps_{k+1} = eps_k - 5 delta_k / kappa,
// r_{k+1} = r_k exp(-5 delta_k).  Construction rejects parameters whose
// limits violate eps_k > eps0/2 or r_k > r0/2.
class DomainSchedule {
public:
    DomainSchedule(double eps0, double r0, double delta0, double kappa);

    double eps0() const { return eps0_; }
    double r0() const { return r0_; }
    double delta0() const { return delta0_; }
    double kappa() const { return kappa_; }

    double delta(int k) const;
    double eps(int k) const;  // computed by the recurrence, cached
    double r(int k) const;

private:
    double eps0_, r0_, delta0_, kappa_;
    mutable std::vector<double> eps_, r_;  // prefix cache
    void extend(int k) const;
};

struct Cocycle {
    DeckMaps deck;
    std::vector<MatrixSeries> f;  // deviations; the cocycle operators are I + f_i

    Cocycle(DeckMaps deck_, std::vector<MatrixSeries> f_);
    int size() const { return f.empty() ? 0 : f.front().size(); }
    const TruncationSpec& spec() const { return f.front().spec(); }
};

// max over ordered pairs i != j of || F_j(deck_i) F_i - F_i(deck_j) F_j ||_w;
// zero for n = 1
double automorphy_residual(const Cocycle& c, const MajorantWeight& w);

struct NewtonOptions {
    double tolerance = 1e-12;            // stop when max_i ||f_i|| falls below
    int max_steps = 40;
    double resonance_threshold = 1e-14;
    double compat_tolerance = 1e-10;
    double mu_exp = 8;                   // exponent of the monitored decay delta_k^mu_exp
};

struct StepRecord {
    int k = 0;
    long long m = 0;           // 2^k - 1; the step removes the jet of degree <= 2m+1
    double delta_k = 0, eps_k = 0, r_k = 0;
    double f_norm = 0;         // max_i ||f_i|| at (eps_k, r_k), entering the step
    double phi_norm = 0;       // ||phi|| at (eps_k - delta_k/kappa, r_k e^{-delta_k})
    double min_divisor = 0;
    int min_vdeg = -1;         // lowest v-degree of the residual after the step; -1 = empty
    double automorphy_res = 0; // of the conjugated cocycle at (eps_{k+1}, r_{k+1})
    double trunc_loss = 0;     // dropped mass this step, weighted at (eps_{k+1}, r_{k+1})
    bool entry_hypothesis = false;  // ||f|| <= delta_k^mu_exp at entry
    bool decay_ok = false;          // ||f_plus|| <= delta_{k+1}^mu_exp (meaningful when entry holds)
};

struct NewtonStepResult {
    MatrixSeries phi;      // solution of the linearized equation; factor is I + phi
    Cocycle next;          // conjugated cocycle
    StepRecord record;
};

NewtonStepResult newton_step(const Cocycle& c, int k, const DomainSchedule& sched,
                             const NewtonOptions& opts = {});

struct ConvergenceReport {
    std::vector<StepRecord> steps;
    std::string verdict;        // "converged" | "truncation_limited" | "max_steps"
    double final_f_norm = 0;    // residual deviation norm at the final weight
    double final_residual = 0;  // || Phi(deck_i) F_i^orig Phi^{-1} - I || at the final weight
    double final_eps = 0, final_r = 0;
    int feasibility_k0 = -1;        // first step whose entry hypothesis held; -1 = never
    double delta0_suggested = 0;    // ||f_0||^(1/mu_exp): delta0 making the k=0 hypothesis tight
    double total_trunc_loss = 0;
};

struct TrivializeResult {
    MatrixSeries phi_inf;  // accumulated left product, I + O(v)
    ConvergenceReport report;
};

// Runs newton steps until the residual falls below tolerance, the jet window
// exceeds the truncation degree, or max_steps is hit.  Throws DivergedError
// when the residual grows across two consecutive steps, and propagates
// ResonantModeError / IncompatibleError from the per-step solves.
TrivializeResult trivialize(const Cocycle& c, const DomainSchedule& sched,
                            const NewtonOptions& opts = {});

// Final verification helper: || Phi(deck_i)(I + f_i) Phi^{-1} - I || maximized
// over generators, computed from scratch at the given weight.
double conjugation_residual(const Cocycle& original, const MatrixSeries& phi,
                            const MajorantWeight& w);

}  // namespace kamtriv
