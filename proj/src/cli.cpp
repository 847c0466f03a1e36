#include "kamtriv/cli.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "kamtriv/cocycle_lab.hpp"
#include "kamtriv/cohomology.hpp"
#include "kamtriv/config.hpp"
#include "kamtriv/errors.hpp"
#include "kamtriv/io.hpp"
#include "kamtriv/newton.hpp"

namespace kamtriv::cli {
namespace {

std::string timestamp_utc() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (int x : v) {
        if (!s.empty()) s += ' ';
        s += std::to_string(x);
    }
    return s;
}

// Collects everything written under --out so the manifest can checksum it.
// provenance.json carries the timestamp and stays out of the manifest, which
// keeps every checksummed artifact byte-stable for a fixed config and seed.
struct OutDir {
    std::string dir;
    std::vector<std::pair<std::string, std::string>> sums;  // file -> fnv1a64 hex

    explicit OutDir(const std::string& d) : dir(d) {
        std::error_code ec;
        std::filesystem::create_directories(d, ec);
        if (ec) throw ConfigError("cannot create output directory '" + d + "': " + ec.message());
    }
    void raw(const std::string& name, const std::string& content) const {
        write_file(dir + "/" + name, content);
        std::printf("wrote %s/%s\n", dir.c_str(), name.c_str());
    }
    void emit(const std::string& name, const std::string& content) {
        raw(name, content);
        sums.emplace_back(name, fnv1a64_hex(content));
    }
    void manifest(std::uint64_t seed) const {
        JsonWriter w;
        w.begin_object();
        w.key("seeds").begin_array();
        w.value(seed);
        w.end_array();
        w.key("artifacts").begin_array();
        for (const auto& [file, sum] : sums) {
            w.begin_object();
            w.key("file").value(file);
            w.key("fnv1a64").value(sum);
            w.end_object();
        }
        w.end_array();
        w.end_object();
        raw("manifest.json", w.str() + "\n");
    }
};

std::string provenance_json(const std::string& command, const ExperimentConfig& cfg) {
    JsonWriter w;
    w.begin_object();
    w.key("command").value(command);
    w.key("timestamp").value(timestamp_utc());
    w.key("config");
    write_config_json(w, cfg);
    w.end_object();
    return w.str() + "\n";
}

// canonical block-format echo; parse_config(config_to_text(cfg)) == cfg
std::string config_to_text(const ExperimentConfig& cfg) {
    std::string s = "# resolved configuration\n";
    s += "seed = " + std::to_string(cfg.seed) + "\n";
    s += "threads = " + std::to_string(cfg.threads) + "\n";
    s += "lattice {\n  n = " + std::to_string(cfg.lattice.n) + "\n  e = [";
    bool first = true;
    for (const auto& row : cfg.lattice.rows)
        for (const auto& c : row) {
            if (!first) s += ", ";
            first = false;
            s += "[" + format_double(c.real()) + ", " + format_double(c.imag()) + "]";
        }
    s += "]\n}\n";
    s += "bundle {\n  d = " + std::to_string(cfg.bundle.d) + "\n  theta = [";
    first = true;
    for (const auto& row : cfg.bundle.theta) {
        if (!first) s += ", ";
        first = false;
        s += "[";
        for (std::size_t l = 0; l < row.size(); ++l) {
            if (l) s += ", ";
            s += format_double(row[l]);
        }
        s += "]";
    }
    s += "]\n}\n";
    s += "truncation {\n  fourier_cutoff = " + std::to_string(cfg.truncation.fourier_cutoff) +
         "\n  taylor_degree = " + std::to_string(cfg.truncation.taylor_degree) + "\n}\n";
    s += "domain {\n  epsilon0 = " + format_double(cfg.domain.epsilon0) +
         "\n  r0 = " + format_double(cfg.domain.r0) +
         "\n  delta0 = " + format_double(cfg.domain.delta0) +
         "\n  kappa = " + format_double(cfg.domain.kappa) +
         "\n  mu_exp = " + format_double(cfg.domain.mu_exp) + "\n}\n";
    s += "solver {\n  resonance_threshold = " + format_double(cfg.solver.resonance_threshold) +
         "\n  tolerance = " + format_double(cfg.solver.tolerance) +
         "\n  max_steps = " + std::to_string(cfg.solver.max_steps) +
         "\n  compat_tolerance = " + format_double(cfg.solver.compat_tolerance) + "\n}\n";
    s += "synthesis {\n  amplitude = " + format_double(cfg.synthesis.amplitude) +
         "\n  min_degree = " + std::to_string(cfg.synthesis.min_degree) +
         "\n  max_degree = " + std::to_string(cfg.synthesis.max_degree) +
         "\n  fourier_bound = " + std::to_string(cfg.synthesis.fourier_bound) +
         "\n  matrix_size = " + std::to_string(cfg.synthesis.matrix_size) + "\n}\n";
    return s;
}

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::string out_dir;
    std::string in_path;
    std::uint64_t seed = 0;
};

ExperimentConfig resolve(const CommonOpts& o, bool seed_given) {
    ExperimentConfig cfg;
    if (!o.config_path.empty())
        cfg = load_config(o.config_path);
    else if (!o.preset.empty())
        cfg = preset_config(o.preset);
    else
        throw ConfigError("one of --config or --preset is required");
    if (seed_given) cfg.seed = o.seed;
    return cfg;
}

// From --in when given (the file's truncation spec wins), else synthesized
// from the config's seed and synthesis block.
Cocycle load_or_synth(ExperimentConfig& cfg, const std::string& in_path,
                      std::string* cocycle_text) {
    if (!in_path.empty()) {
        auto devs = cocycle_from_text(read_file(in_path));
        const TruncationSpec& fs = devs.front().spec();
        std::vector<std::string> issues;
        if (fs.n != cfg.lattice.n)
            issues.push_back("cocycle file '" + in_path + "': n = " + std::to_string(fs.n) +
                             " does not match the lattice (n = " + std::to_string(cfg.lattice.n) +
                             ")");
        if (fs.d != cfg.bundle.d)
            issues.push_back("cocycle file '" + in_path + "': d = " + std::to_string(fs.d) +
                             " does not match the bundle (d = " + std::to_string(cfg.bundle.d) +
                             ")");
        if (static_cast<int>(devs.size()) != cfg.lattice.n)
            issues.push_back("cocycle file '" + in_path + "': expected " +
                             std::to_string(cfg.lattice.n) + " generators, found " +
                             std::to_string(devs.size()));
        if (!issues.empty()) throw ConfigError(issues);
        cfg.truncation = fs;
        *cocycle_text = to_text(devs);
        return Cocycle(cfg.deck(), std::move(devs));
    }
    SynthesisSpec synth = cfg.synthesis;
    synth.seed = cfg.seed;
    MatrixSeries psi = random_near_identity(synth, cfg.truncation);
    Cocycle c = synthesize_cocycle(psi, cfg.deck());
    *cocycle_text = to_text(c.f);
    return c;
}

void write_scanned_mode(JsonWriter& w, const ScannedMode& m) {
    w.begin_object();
    w.key("s").value(m.s);
    w.key("p").value(m.p);
    w.key("q").value(m.q);
    w.key("target").value(m.target);
    w.key("divisor").value(m.divisor);
    w.end_object();
}

std::string scan_report_json(const DiophantineReport& rep) {
    JsonWriter w;
    w.begin_object();
    w.key("variant").value(to_string(rep.variant));
    w.key("bound").value(rep.bound);
    w.key("p_window").value(rep.p_window);
    w.key("excluded_divisor_bound").value(rep.excluded_divisor_bound);
    w.key("modes_scanned").value(rep.modes_scanned);
    w.key("verdict").value(rep.verdict);
    w.key("fitted_d").value(rep.fitted_d);
    w.key("fitted_tau").value(rep.fitted_tau);
    w.key("fitted_tau_half").value(rep.fitted_tau_half);
    w.key("min_divisor_times_s").value(rep.min_divisor_times_s);
    w.key("resonance_count").value(rep.resonance_count);
    w.key("worst_modes").begin_array();
    for (const auto& m : rep.worst) write_scanned_mode(w, m);
    w.end_array();
    w.key("resonances").begin_array();
    for (const auto& m : rep.resonances) write_scanned_mode(w, m);
    w.end_array();
    w.key("envelope").begin_array();
    for (const auto& [s, div] : rep.envelope) {
        w.begin_array();
        w.value(s).value(div);
        w.end_array();
    }
    w.end_array();
    w.end_object();
    return w.str() + "\n";
}

std::string solution_json(const CohomologySolution& sol, int ngen) {
    std::vector<int> chosen_counts(ngen, 0);
    for (const auto& [mode, gen] : sol.chosen_generator) ++chosen_counts[gen];
    JsonWriter w;
    w.begin_object();
    w.key("min_divisor").value(sol.min_divisor);
    w.key("norm_g").value(sol.norm_g);
    w.key("max_norm_rhs").value(sol.max_norm_rhs);
    w.key("compat_residual").value(sol.compat_residual);
    w.key("equation_residuals").begin_array();
    for (double x : sol.equation_residuals) w.value(x);
    w.end_array();
    w.key("chosen_generator_counts").value(chosen_counts);
    w.key("resonant_skipped").begin_array();
    for (const auto& m : sol.resonant_skipped) {
        w.begin_object();
        w.key("p").value(m.p);
        w.key("q").value(m.q);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str() + "\n";
}

std::string report_csv(const ConvergenceReport& rep) {
    std::string s = "k,m,delta_k,eps_k,r_k,f_norm,phi_norm,min_vdeg,automorphy_res,trunc_loss\n";
    for (const StepRecord& st : rep.steps) {
        s += std::to_string(st.k) + "," + std::to_string(st.m) + "," +
             format_double(st.delta_k) + "," + format_double(st.eps_k) + "," +
             format_double(st.r_k) + "," + format_double(st.f_norm) + "," +
             format_double(st.phi_norm) + "," + std::to_string(st.min_vdeg) + "," +
             format_double(st.automorphy_res) + "," + format_double(st.trunc_loss) + "\n";
    }
    return s;
}

std::string summary_json(const ConvergenceReport& rep) {
    JsonWriter w;
    w.begin_object();
    w.key("command").value("trivialize");
    w.key("verdict").value(rep.verdict);
    w.key("steps").value(static_cast<int>(rep.steps.size()));
    w.key("final_f_norm").value(rep.final_f_norm);
    w.key("final_residual").value(rep.final_residual);
    w.key("final_eps").value(rep.final_eps);
    w.key("final_r").value(rep.final_r);
    w.key("feasibility_k0").value(rep.feasibility_k0);
    w.key("delta0_suggested").value(rep.delta0_suggested);
    w.key("total_trunc_loss").value(rep.total_trunc_loss);
    w.end_object();
    return w.str() + "\n";
}

void write_math_error(const std::string& dir, const MathError& e) {
    JsonWriter w;
    w.begin_object();
    w.key("kind").value(e.kind());
    w.key("message").value(e.what());
    if (const auto* r = dynamic_cast<const ResonantModeError*>(&e)) {
        w.key("p").value(r->p());
        w.key("q").value(r->q());
        w.key("divisor").value(r->divisor());
        w.key("coefficient_magnitude").value(r->coeff_magnitude());
    } else if (const auto* ic = dynamic_cast<const IncompatibleError*>(&e)) {
        w.key("residual").value(ic->residual());
        w.key("tolerance").value(ic->tolerance());
    } else if (const auto* dv = dynamic_cast<const DivergedError*>(&e)) {
        w.key("step").value(dv->step());
        w.key("norm_before").value(dv->norm_before());
        w.key("norm_after").value(dv->norm_after());
    }
    w.end_object();
    write_file(dir + "/error.json", w.str() + "\n");
    std::printf("wrote %s/error.json\n", dir.c_str());
}

int cmd_scan(CommonOpts& o, bool seed_given, int bound, const std::string& variant,
             std::string& err_dir) {
    ExperimentConfig cfg = resolve(o, seed_given);
    OutDir out(o.out_dir);
    err_dir = o.out_dir;
    out.raw("provenance.json", provenance_json("scan", cfg));
    out.emit("config.resolved", config_to_text(cfg));

    ScanOptions sopts;
    sopts.bound = bound;
    sopts.variant = dio_variant_from_string(variant);
    sopts.resonance_threshold = cfg.solver.resonance_threshold;
    std::string csv = "s,p,q,target,divisor\n";
    sopts.mode_sink = [&csv](const ScannedMode& m) {
        csv += std::to_string(m.s) + "," + join_ints(m.p) + "," + join_ints(m.q) + "," +
               std::to_string(m.target) + "," + format_double(m.divisor) + "\n";
    };
    DiophantineReport rep = diophantine_scan(cfg.deck(), sopts);
    out.emit("report.json", scan_report_json(rep));
    out.emit("modes.csv", csv);
    out.manifest(cfg.seed);
    std::printf("scan: verdict %s over %lld modes (bound %d, variant %s)\n", rep.verdict.c_str(),
                rep.modes_scanned, rep.bound, to_string(rep.variant).c_str());

    if (rep.verdict == "resonant") {
        JsonWriter w;
        w.begin_object();
        w.key("kind").value("resonance");
        w.key("message").value("scan found " + std::to_string(rep.resonance_count) +
                               " mode(s) with divisor below the resonance threshold");
        w.key("modes").begin_array();
        for (const auto& m : rep.resonances) write_scanned_mode(w, m);
        w.end_array();
        w.end_object();
        write_file(o.out_dir + "/error.json", w.str() + "\n");
        std::printf("wrote %s/error.json\n", o.out_dir.c_str());
        return 2;
    }
    return 0;
}

int cmd_solve(CommonOpts& o, bool seed_given, std::string& err_dir) {
    ExperimentConfig cfg = resolve(o, seed_given);
    OutDir out(o.out_dir);
    err_dir = o.out_dir;
    std::string cocycle_text;
    Cocycle c = load_or_synth(cfg, o.in_path, &cocycle_text);
    out.raw("provenance.json", provenance_json("solve", cfg));
    out.emit("config.resolved", config_to_text(cfg));
    out.emit("cocycle.series", cocycle_text);

    MajorantWeight w(cfg.lattice, cfg.domain.epsilon0, cfg.domain.r0);
    CohomologySolution sol = solve_cohomology(c.f, c.deck, w, cfg.solve_options());
    out.emit("solution.series", to_text(sol.g));
    out.emit("solution.json", solution_json(sol, c.deck.n()));
    out.manifest(cfg.seed);
    std::printf("solve: min divisor %s, solution norm %s\n",
                format_double(sol.min_divisor).c_str(), format_double(sol.norm_g).c_str());
    return 0;
}

int cmd_trivialize(CommonOpts& o, bool seed_given, std::string& err_dir) {
    ExperimentConfig cfg = resolve(o, seed_given);
    OutDir out(o.out_dir);
    err_dir = o.out_dir;
    std::string cocycle_text;
    Cocycle c = load_or_synth(cfg, o.in_path, &cocycle_text);
    out.raw("provenance.json", provenance_json("trivialize", cfg));
    out.emit("config.resolved", config_to_text(cfg));
    out.emit("cocycle.series", cocycle_text);

    TrivializeResult res = trivialize(c, cfg.schedule(), cfg.newton_options());
    out.emit("report.csv", report_csv(res.report));
    out.emit("phi_inf.series", to_text(res.phi_inf));
    out.emit("summary.json", summary_json(res.report));
    out.manifest(cfg.seed);
    std::printf("trivialize: verdict %s after %zu steps, final residual %s\n",
                res.report.verdict.c_str(), res.report.steps.size(),
                format_double(res.report.final_residual).c_str());
    return 0;
}

int cmd_synth(CommonOpts& o, bool seed_given) {
    ExperimentConfig cfg = resolve(o, seed_given);
    OutDir out(o.out_dir);
    out.raw("provenance.json", provenance_json("synth", cfg));
    out.emit("config.resolved", config_to_text(cfg));
    std::string cocycle_text;
    Cocycle c = load_or_synth(cfg, "", &cocycle_text);
    out.emit("cocycle.series", cocycle_text);
    out.manifest(cfg.seed);
    std::printf("synth: seed %llu, %d generator(s), matrix size %d\n",
                static_cast<unsigned long long>(cfg.seed), c.deck.n(), c.size());
    return 0;
}

int cmd_check(const std::string& in_dir, double rel_tol) {
    using nlohmann::json;
    const std::string base = in_dir + "/";
    for (const char* need : {"summary.json", "manifest.json", "config.resolved",
                             "cocycle.series", "phi_inf.series"})
        if (!std::filesystem::exists(base + need))
            throw ConfigError("'" + in_dir + "' is not a trivialize output directory (missing " +
                              std::string(need) + ")");

    json summary, manifest;
    try {
        summary = json::parse(read_file(base + "summary.json"));
        manifest = json::parse(read_file(base + "manifest.json"));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("cannot parse stored JSON: ") + e.what());
    }

    std::vector<std::string> mismatches;
    try {
        for (const auto& a : manifest.at("artifacts")) {
            const std::string file = a.at("file").get<std::string>();
            const std::string want = a.at("fnv1a64").get<std::string>();
            const std::string got = fnv1a64_hex(read_file(base + file));
            if (got != want) mismatches.push_back(file);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("manifest.json: ") + e.what());
    }

    ExperimentConfig cfg = load_config(base + "config.resolved");
    auto devs = cocycle_from_text(read_file(base + "cocycle.series"));
    MatrixSeries phi = matrix_from_text(read_file(base + "phi_inf.series"));

    double stored = 0, eps = 0, r = 0;
    try {
        stored = summary.at("final_residual").get<double>();
        eps = summary.at("final_eps").get<double>();
        r = summary.at("final_r").get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("summary.json: ") + e.what());
    }
    MajorantWeight w(cfg.lattice, eps, r);
    const double recomputed = conjugation_residual(Cocycle(cfg.deck(), devs), phi, w);
    const bool residual_ok = std::abs(recomputed - stored) <= rel_tol * std::max(1.0, std::abs(stored));
    const bool ok = residual_ok && mismatches.empty();

    JsonWriter jw;
    jw.begin_object();
    jw.key("ok").value(ok);
    jw.key("stored_residual").value(stored);
    jw.key("recomputed_residual").value(recomputed);
    jw.key("residual_ok").value(residual_ok);
    jw.key("checksum_mismatches").begin_array();
    for (const auto& f : mismatches) jw.value(f);
    jw.end_array();
    jw.end_object();
    std::printf("%s\n", jw.str().c_str());
    return ok ? 0 : 2;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"small-divisor scans and Newton trivialization of flat-bundle cocycles "
                 "over complex tori"};
    app.name("kamtriv");

    CommonOpts scan_o, solve_o, triv_o, synth_o;
    int scan_bound = 200;
    std::string scan_variant = "dv";
    std::string check_in;
    double check_tol = 1e-12;
    std::string presets_show;

    auto add_common = [](CLI::App* sub, CommonOpts& o, bool with_in) {
        auto* c = sub->add_option("--config", o.config_path, "configuration file");
        auto* p = sub->add_option("--preset", o.preset,
                                  "built-in configuration (see `kamtriv presets`)");
        c->excludes(p);
        p->excludes(c);
        sub->add_option("--out", o.out_dir, "output directory, created if absent")->required();
        sub->add_option("--seed", o.seed, "override the config seed");
        if (with_in)
            sub->add_option("--in", o.in_path,
                            "cocycle series file; synthesized from the config when absent")
                ->check(CLI::ExistingFile);
    };

    auto* scan = app.add_subcommand("scan", "Diophantine scan of the deck-map divisors");
    add_common(scan, scan_o, false);
    scan->add_option("--bound", scan_bound, "scan orders s = |P| + |Q| up to this bound")
        ->check(CLI::PositiveNumber);
    scan->add_option("--variant", scan_variant, "divisor variant: vd, svd, hd or dv")
        ->check(CLI::IsMember({"vd", "svd", "hd", "dv"}));

    auto* solve = app.add_subcommand("solve", "one linearized (cohomological) solve");
    add_common(solve, solve_o, true);

    auto* triv = app.add_subcommand("trivialize", "full Newton trivialization");
    add_common(triv, triv_o, true);

    auto* synth = app.add_subcommand("synth", "synthesize a trivializable cocycle");
    add_common(synth, synth_o, false);

    auto* check = app.add_subcommand("check", "re-verify a stored trivialize run");
    check->add_option("--in", check_in, "output directory of a prior trivialize run")
        ->required()
        ->check(CLI::ExistingDirectory);
    check->add_option("--tolerance", check_tol, "relative tolerance on the residual comparison");

    auto* presets = app.add_subcommand("presets", "list built-in presets");
    presets->add_option("--show", presets_show, "print the config body of the named preset");

    std::function<int(std::string&)> action;
    scan->callback([&, scan] {
        const bool sg = scan->count("--seed") > 0;
        action = [&, sg](std::string& err_dir) {
            return cmd_scan(scan_o, sg, scan_bound, scan_variant, err_dir);
        };
    });
    solve->callback([&, solve] {
        const bool sg = solve->count("--seed") > 0;
        action = [&, sg](std::string& err_dir) { return cmd_solve(solve_o, sg, err_dir); };
    });
    triv->callback([&, triv] {
        const bool sg = triv->count("--seed") > 0;
        action = [&, sg](std::string& err_dir) { return cmd_trivialize(triv_o, sg, err_dir); };
    });
    synth->callback([&, synth] {
        const bool sg = synth->count("--seed") > 0;
        action = [&, sg](std::string&) { return cmd_synth(synth_o, sg); };
    });
    check->callback([&] {
        action = [&](std::string&) { return cmd_check(check_in, check_tol); };
    });
    presets->callback([&] {
        action = [&](std::string&) {
            if (presets_show.empty())
                for (const auto& name : preset_names()) std::printf("%s\n", name.c_str());
            else
                std::fputs(preset_text(presets_show).c_str(), stdout);
            return 0;
        };
    });

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(std::move(rev));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (!action) {
        std::fputs(app.help().c_str(), stdout);
        return 1;
    }

    std::string err_dir;
    try {
        return action(err_dir);
    } catch (const ConfigError& e) {
        for (const auto& issue : e.issues()) std::fprintf(stderr, "error: %s\n", issue.c_str());
        return 1;
    } catch (const MathError& e) {
        if (!err_dir.empty()) {
            try {
                write_math_error(err_dir, e);
            } catch (const std::exception&) {
                // the error report is best effort; the exit code still signals failure
            }
        }
        std::fprintf(stderr, "error (%s): %s\n", e.kind().c_str(), e.what());
        return 2;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

}  // namespace kamtriv::cli
