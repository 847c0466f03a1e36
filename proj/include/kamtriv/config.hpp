// Experiment configuration: a flat, commented block format.
//
//   seed = 42
//   threads = 1
//   lattice { n = 1  e = [[0, 1]] }
//   bundle { d = 1  theta = [[golden]] }
//   truncation { fourier_cutoff = 16  taylor_degree = 64 }
//   domain { epsilon0 = 0.5  r0 = 0.5  delta0 = 0.05  kappa = 4  mu_exp = 8 }
//   solver { resonance_threshold = 1e-14  tolerance = 1e-12  max_steps = 40
//            compat_tolerance = 1e-10 }
//   synthesis { amplitude = 0.01  min_degree = 1  max_degree = 2
//               fourier_bound = 2  matrix_size = 1 }
//
// `#` starts a comment.  Angle entries accept decimals or the named values
// golden ((sqrt5-1)/2), sqrt2 (sqrt2-1), sqrt5 (sqrt5-2), third (1/3) and
// liouville(k) (decimal truncation of sum_{j<=k} 10^-j!).  Unknown keys and
// blocks are rejected with field-level diagnostics.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kamtriv/cocycle_lab.hpp"
#include "kamtriv/lattice.hpp"
#include "kamtriv/newton.hpp"
#include "kamtriv/series.hpp"

namespace kamtriv {

struct DomainConfig {
    double epsilon0 = 0.5;
    double r0 = 0.5;
    double delta0 = 0.05;
    double kappa = 4;
    double mu_exp = 8;
};

struct SolverConfig {
    double resonance_threshold = 1e-14;
    double tolerance = 1e-12;
    int max_steps = 40;
    double compat_tolerance = 1e-10;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    int threads = 1;  // accepted and validated; the pipelines are sequential today
    TorusLattice lattice = TorusLattice::elliptic({0.0, 1.0});
    FlatBundleData bundle;
    TruncationSpec truncation;
    DomainConfig domain;
    SolverConfig solver;
    SynthesisSpec synthesis;

    DeckMaps deck() const { return DeckMaps(lattice, bundle); }
    DomainSchedule schedule() const;
    NewtonOptions newton_options() const;
    SolveOptions solve_options() const;
};

// throws ConfigError carrying one message per offending field
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

double parse_angle_token(const std::string& token);  // decimals and named angles

std::vector<std::string> preset_names();
// golden | sqrt2 | third-root | liouville | elliptic-tau-i
ExperimentConfig preset_config(const std::string& name);
std::string preset_text(const std::string& name);  // the config file body

// resolved-config echo used by provenance reports
void write_config_json(class JsonWriter& w, const ExperimentConfig& cfg);

}  // namespace kamtriv
