#include "kamtriv/config.hpp"

#include <cctype>
#include <cmath>
#include <cstring>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>

#include "kamtriv/errors.hpp"
#include "kamtriv/io.hpp"

namespace kamtriv {

namespace {

struct Token {
    enum Kind { atom, punct, end } kind = end;
    std::string text;
    int line = 0;
};

class Tokenizer {
public:
    explicit Tokenizer(const std::string& text) : text_(text) {}

    Token next() {
        skip();
        Token t;
        t.line = line_;
        if (pos_ >= text_.size()) return t;
        const char c = text_[pos_];
        if (std::strchr("{}[]=,()", c)) {
            ++pos_;
            t.kind = Token::punct;
            t.text = std::string(1, c);
            return t;
        }
        std::string atom;
        while (pos_ < text_.size()) {
            const char ch = text_[pos_];
            if (std::isspace(static_cast<unsigned char>(ch)) || std::strchr("{}[]=,()#", ch))
                break;
            atom += ch;
            ++pos_;
        }
        t.kind = Token::atom;
        t.text = atom;
        return t;
    }

    Token peek() {
        const std::size_t p = pos_;
        const int l = line_;
        Token t = next();
        pos_ = p;
        line_ = l;
        return t;
    }

private:
    void skip() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else if (c == '\n') {
                ++line_;
                ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

struct ParseState {
    Tokenizer tok;
    std::vector<std::string> issues;
    explicit ParseState(const std::string& text) : tok(text) {}

    [[noreturn]] void abort(const std::string& msg, int line) {
        issues.push_back("line " + std::to_string(line) + ": " + msg);
        throw ConfigError(issues);
    }
};

double liouville_angle(int k) {
    if (k < 1 || k > 10) throw std::invalid_argument("liouville(k): k must be in 1..10");
    double sum = 0;
    double factorial = 1;
    for (int j = 1; j <= k; ++j) {
        factorial *= j;
        if (factorial > 320) break;  // 10^-321 underflows; later terms vanish
        sum += std::pow(10.0, -factorial);
    }
    return sum;
}

// number or named angle; `liouville` consumes its (k) argument
double parse_angle(ParseState& ps, const Token& t) {
    if (t.kind != Token::atom) ps.abort("expected an angle, got '" + t.text + "'", t.line);
    const std::string& s = t.text;
    if (s == "golden") return (std::sqrt(5.0) - 1.0) / 2.0;
    if (s == "sqrt2") return std::sqrt(2.0) - 1.0;
    if (s == "sqrt5") return std::sqrt(5.0) - 2.0;
    if (s == "third") return 1.0 / 3.0;
    if (s == "liouville") {
        Token open = ps.tok.next();
        Token arg = ps.tok.next();
        Token close = ps.tok.next();
        if (open.text != "(" || close.text != ")" || arg.kind != Token::atom)
            ps.abort("liouville needs an integer argument in parentheses", t.line);
        try {
            return liouville_angle(std::stoi(arg.text));
        } catch (const std::exception& e) {
            ps.abort(std::string("liouville: ") + e.what(), t.line);
        }
    }
    try {
        std::size_t used = 0;
        const double x = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        ps.abort("not a number or named angle: '" + s + "'", t.line);
    }
}

double parse_double(ParseState& ps, const std::string& field) {
    Token t = ps.tok.next();
    if (t.kind != Token::atom) ps.abort(field + ": expected a number", t.line);
    try {
        std::size_t used = 0;
        const double x = std::stod(t.text, &used);
        if (used != t.text.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        ps.abort(field + ": not a number: '" + t.text + "'", t.line);
    }
}

long long parse_int(ParseState& ps, const std::string& field) {
    Token t = ps.tok.next();
    if (t.kind != Token::atom) ps.abort(field + ": expected an integer", t.line);
    try {
        std::size_t used = 0;
        const long long x = std::stoll(t.text, &used);
        if (used != t.text.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        ps.abort(field + ": not an integer: '" + t.text + "'", t.line);
    }
}

std::uint64_t parse_u64(ParseState& ps, const std::string& field) {
    Token t = ps.tok.next();
    if (t.kind != Token::atom) ps.abort(field + ": expected an unsigned integer", t.line);
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(t.text, &used);
        if (used != t.text.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        ps.abort(field + ": not an unsigned integer: '" + t.text + "'", t.line);
    }
}

void expect(ParseState& ps, const std::string& text, const std::string& context) {
    Token t = ps.tok.next();
    if (t.text != text) ps.abort(context + ": expected '" + text + "', got '" + t.text + "'", t.line);
}

// [a, b]: a fixed-length list of angle-or-number atoms
std::vector<double> parse_tuple(ParseState& ps, const std::string& field) {
    expect(ps, "[", field);
    std::vector<double> out;
    while (true) {
        Token t = ps.tok.next();
        if (t.text == "]") break;
        if (t.text == ",") continue;
        out.push_back(parse_angle(ps, t));
    }
    return out;
}

std::vector<std::vector<double>> parse_tuple_list(ParseState& ps, const std::string& field) {
    expect(ps, "[", field);
    std::vector<std::vector<double>> out;
    while (true) {
        Token t = ps.tok.peek();
        if (t.kind == Token::end) ps.abort(field + ": unterminated list", t.line);
        if (t.text == "]") {
            ps.tok.next();
            break;
        }
        if (t.text == ",") {
            ps.tok.next();
            continue;
        }
        out.push_back(parse_tuple(ps, field));
    }
    return out;
}

struct RawBlocks {
    std::optional<std::vector<std::vector<double>>> lattice_e;
    std::optional<int> lattice_n;
    std::optional<int> bundle_d;
    std::optional<std::vector<std::vector<double>>> bundle_theta;
    bool saw_lattice = false, saw_bundle = false;
};

}  // namespace

double parse_angle_token(const std::string& token) {
    ParseState ps(token);
    Token t = ps.tok.next();
    return parse_angle(ps, t);
}

ExperimentConfig parse_config(const std::string& text) {
    ParseState ps(text);
    ExperimentConfig cfg;
    RawBlocks raw;

    auto unknown = [&](const std::string& where, const Token& t) {
        ps.issues.push_back("line " + std::to_string(t.line) + ": " + where + ": unknown key '" +
                            t.text + "'");
    };

    while (true) {
        Token t = ps.tok.next();
        if (t.kind == Token::end) break;
        if (t.kind != Token::atom) ps.abort("expected a key or block name, got '" + t.text + "'",
                                            t.line);
        const std::string name = t.text;
        Token nxt = ps.tok.next();
        if (nxt.text == "=") {
            if (name == "seed")
                cfg.seed = parse_u64(ps, "seed");
            else if (name == "threads")
                cfg.threads = static_cast<int>(parse_int(ps, "threads"));
            else {
                unknown("top level", t);
                ps.tok.next();  // skip the value
            }
            continue;
        }
        if (nxt.text != "{") ps.abort("expected '=' or '{' after '" + name + "'", nxt.line);

        auto in_block = [&](auto&& handle_key) {
            while (true) {
                Token kt = ps.tok.next();
                if (kt.text == "}") break;
                if (kt.kind != Token::atom)
                    ps.abort(name + ": expected a key, got '" + kt.text + "'", kt.line);
                expect(ps, "=", name + "." + kt.text);
                handle_key(kt);
            }
        };

        if (name == "lattice") {
            raw.saw_lattice = true;
            in_block([&](const Token& kt) {
                if (kt.text == "n")
                    raw.lattice_n = static_cast<int>(parse_int(ps, "lattice.n"));
                else if (kt.text == "e")
                    raw.lattice_e = parse_tuple_list(ps, "lattice.e");
                else {
                    unknown("lattice", kt);
                    ps.tok.next();
                }
            });
        } else if (name == "bundle") {
            raw.saw_bundle = true;
            in_block([&](const Token& kt) {
                if (kt.text == "d")
                    raw.bundle_d = static_cast<int>(parse_int(ps, "bundle.d"));
                else if (kt.text == "theta")
                    raw.bundle_theta = parse_tuple_list(ps, "bundle.theta");
                else {
                    unknown("bundle", kt);
                    ps.tok.next();
                }
            });
        } else if (name == "truncation") {
            in_block([&](const Token& kt) {
                if (kt.text == "fourier_cutoff")
                    cfg.truncation.fourier_cutoff =
                        static_cast<int>(parse_int(ps, "truncation.fourier_cutoff"));
                else if (kt.text == "taylor_degree")
                    cfg.truncation.taylor_degree =
                        static_cast<int>(parse_int(ps, "truncation.taylor_degree"));
                else {
                    unknown("truncation", kt);
                    ps.tok.next();
                }
            });
        } else if (name == "domain") {
            in_block([&](const Token& kt) {
                if (kt.text == "epsilon0")
                    cfg.domain.epsilon0 = parse_double(ps, "domain.epsilon0");
                else if (kt.text == "r0")
                    cfg.domain.r0 = parse_double(ps, "domain.r0");
                else if (kt.text == "delta0")
                    cfg.domain.delta0 = parse_double(ps, "domain.delta0");
                else if (kt.text == "kappa")
                    cfg.domain.kappa = parse_double(ps, "domain.kappa");
                else if (kt.text == "mu_exp")
                    cfg.domain.mu_exp = parse_double(ps, "domain.mu_exp");
                else {
                    unknown("domain", kt);
                    ps.tok.next();
                }
            });
        } else if (name == "solver") {
            in_block([&](const Token& kt) {
                if (kt.text == "resonance_threshold")
                    cfg.solver.resonance_threshold = parse_double(ps, "solver.resonance_threshold");
                else if (kt.text == "tolerance")
                    cfg.solver.tolerance = parse_double(ps, "solver.tolerance");
                else if (kt.text == "max_steps")
                    cfg.solver.max_steps = static_cast<int>(parse_int(ps, "solver.max_steps"));
                else if (kt.text == "compat_tolerance")
                    cfg.solver.compat_tolerance = parse_double(ps, "solver.compat_tolerance");
                else {
                    unknown("solver", kt);
                    ps.tok.next();
                }
            });
        } else if (name == "synthesis") {
            in_block([&](const Token& kt) {
                if (kt.text == "amplitude")
                    cfg.synthesis.amplitude = parse_double(ps, "synthesis.amplitude");
                else if (kt.text == "min_degree")
                    cfg.synthesis.min_degree =
                        static_cast<int>(parse_int(ps, "synthesis.min_degree"));
                else if (kt.text == "max_degree")
                    cfg.synthesis.max_degree =
                        static_cast<int>(parse_int(ps, "synthesis.max_degree"));
                else if (kt.text == "fourier_bound")
                    cfg.synthesis.fourier_bound =
                        static_cast<int>(parse_int(ps, "synthesis.fourier_bound"));
                else if (kt.text == "matrix_size")
                    cfg.synthesis.matrix_size =
                        static_cast<int>(parse_int(ps, "synthesis.matrix_size"));
                else {
                    unknown("synthesis", kt);
                    ps.tok.next();
                }
            });
        } else {
            unknown("top level", t);
            // skip the whole unknown block
            int depth = 1;
            while (depth > 0) {
                Token sk = ps.tok.next();
                if (sk.kind == Token::end) ps.abort("unterminated block '" + name + "'", t.line);
                if (sk.text == "{") ++depth;
                if (sk.text == "}") --depth;
            }
        }
    }

    // assemble and validate the structured pieces
    if (!raw.saw_lattice) ps.issues.push_back("lattice: block required");
    if (!raw.saw_bundle) ps.issues.push_back("bundle: block required");
    int n = raw.lattice_n.value_or(0);
    if (raw.saw_lattice) {
        if (!raw.lattice_n)
            ps.issues.push_back("lattice.n: required");
        else if (n < 1)
            ps.issues.push_back("lattice.n: must be >= 1");
        if (!raw.lattice_e)
            ps.issues.push_back("lattice.e: required");
        else if (n >= 1) {
            if (static_cast<int>(raw.lattice_e->size()) != n * n)
                ps.issues.push_back("lattice.e: expected " + std::to_string(n * n) +
                                    " [re, im] pairs (row-major)");
            else {
                std::vector<std::vector<std::complex<double>>> rows(n);
                bool ok = true;
                for (int j = 0; j < n && ok; ++j)
                    for (int k = 0; k < n && ok; ++k) {
                        const auto& pair = (*raw.lattice_e)[j * n + k];
                        if (pair.size() != 2) {
                            ps.issues.push_back("lattice.e: each entry must be [re, im]");
                            ok = false;
                        } else {
                            rows[j].push_back({pair[0], pair[1]});
                        }
                    }
                if (ok) {
                    try {
                        cfg.lattice = TorusLattice::make(n, std::move(rows));
                    } catch (const std::invalid_argument& e) {
                        ps.issues.push_back(std::string("lattice.e: ") + e.what());
                    }
                }
            }
        }
    }
    if (raw.saw_bundle) {
        const int d = raw.bundle_d.value_or(0);
        if (!raw.bundle_d)
            ps.issues.push_back("bundle.d: required");
        else if (d < 1)
            ps.issues.push_back("bundle.d: must be >= 1");
        if (!raw.bundle_theta)
            ps.issues.push_back("bundle.theta: required");
        else if (raw.bundle_d && d >= 1 && n >= 1) {
            try {
                cfg.bundle = FlatBundleData::make(n, d, *raw.bundle_theta);
            } catch (const std::invalid_argument& e) {
                ps.issues.push_back(std::string("bundle.theta: ") + e.what());
            }
        }
    }

    if (cfg.threads < 1) ps.issues.push_back("threads: must be >= 1");
    cfg.truncation.n = std::max(n, 1);
    cfg.truncation.d = std::max(cfg.bundle.d, 1);
    try {
        cfg.truncation.validate();
    } catch (const std::invalid_argument& e) {
        ps.issues.push_back(std::string("truncation: ") + e.what());
    }
    try {
        DomainSchedule sched(cfg.domain.epsilon0, cfg.domain.r0, cfg.domain.delta0,
                             cfg.domain.kappa);
    } catch (const std::invalid_argument& e) {
        ps.issues.push_back(std::string("domain: ") + e.what());
    }
    if (!(cfg.domain.mu_exp > 0)) ps.issues.push_back("domain.mu_exp: must be positive");
    if (!(cfg.solver.resonance_threshold > 0))
        ps.issues.push_back("solver.resonance_threshold: must be positive");
    if (!(cfg.solver.tolerance >= 0)) ps.issues.push_back("solver.tolerance: must be >= 0");
    if (cfg.solver.max_steps < 1) ps.issues.push_back("solver.max_steps: must be >= 1");
    if (!(cfg.solver.compat_tolerance > 0))
        ps.issues.push_back("solver.compat_tolerance: must be positive");
    try {
        cfg.synthesis.validate(cfg.truncation);
    } catch (const std::invalid_argument& e) {
        ps.issues.push_back(std::string("synthesis: ") + e.what());
    }

    if (!ps.issues.empty()) throw ConfigError(ps.issues);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    return parse_config(read_file(path));
}

DomainSchedule ExperimentConfig::schedule() const {
    return DomainSchedule(domain.epsilon0, domain.r0, domain.delta0, domain.kappa);
}

NewtonOptions ExperimentConfig::newton_options() const {
    NewtonOptions opts;
    opts.tolerance = solver.tolerance;
    opts.max_steps = solver.max_steps;
    opts.resonance_threshold = solver.resonance_threshold;
    opts.compat_tolerance = solver.compat_tolerance;
    opts.mu_exp = domain.mu_exp;
    return opts;
}

SolveOptions ExperimentConfig::solve_options() const {
    SolveOptions opts;
    opts.resonance_threshold = solver.resonance_threshold;
    opts.drop_tolerance = solver.tolerance;
    opts.compat_tolerance = solver.compat_tolerance;
    return opts;
}

namespace {
std::string preset_body(const std::string& bundle_line, const std::string& synthesis_line) {
    return "# generated preset configuration\n"
           "seed = 42\n"
           "threads = 1\n"
           "lattice { n = 1  e = [[0, 1]] }  # elliptic curve, tau = i\n" +
           bundle_line +
           "truncation { fourier_cutoff = 16  taylor_degree = 64 }\n"
           "domain { epsilon0 = 0.25  r0 = 0.5  delta0 = 0.05  kappa = 4  mu_exp = 8 }\n"
           "solver { resonance_threshold = 1e-14  tolerance = 1e-12  max_steps = 40  "
           "compat_tolerance = 1e-10 }\n" +
           synthesis_line;
}
}  // namespace

std::vector<std::string> preset_names() {
    return {"golden", "sqrt2", "third-root", "liouville", "elliptic-tau-i"};
}

std::string preset_text(const std::string& name) {
    const std::string synth1 =
        "synthesis { amplitude = 0.01  min_degree = 1  max_degree = 2  fourier_bound = 2  "
        "matrix_size = 1 }\n";
    const std::string synth2 =
        "synthesis { amplitude = 0.01  min_degree = 1  max_degree = 2  fourier_bound = 2  "
        "matrix_size = 2 }\n";
    if (name == "golden")
        return preset_body("bundle { d = 1  theta = [[golden]] }\n", synth1);
    if (name == "sqrt2")
        return preset_body("bundle { d = 1  theta = [[sqrt2]] }\n", synth1);
    if (name == "third-root")
        return preset_body("bundle { d = 1  theta = [[third]] }\n", synth1);
    if (name == "liouville")
        return preset_body("bundle { d = 1  theta = [[liouville(4)]] }\n", synth1);
    if (name == "elliptic-tau-i")
        return preset_body("bundle { d = 2  theta = [[golden, sqrt2]] }\n", synth2);
    throw ConfigError("unknown preset '" + name + "'; available: golden, sqrt2, third-root, "
                      "liouville, elliptic-tau-i");
}

ExperimentConfig preset_config(const std::string& name) {
    return parse_config(preset_text(name));
}

void write_config_json(JsonWriter& w, const ExperimentConfig& cfg) {
    w.begin_object();
    w.key("seed").value(cfg.seed);
    w.key("threads").value(cfg.threads);
    w.key("lattice").begin_object();
    w.key("n").value(cfg.lattice.n);
    w.key("e").begin_array();
    for (const auto& row : cfg.lattice.rows)
        for (const auto& c : row) {
            w.begin_array();
            w.value(c.real()).value(c.imag());
            w.end_array();
        }
    w.end_array();
    w.end_object();
    w.key("bundle").begin_object();
    w.key("d").value(cfg.bundle.d);
    w.key("theta").begin_array();
    for (const auto& row : cfg.bundle.theta) {
        w.begin_array();
        for (double t : row) w.value(t);
        w.end_array();
    }
    w.end_array();
    w.end_object();
    w.key("truncation").begin_object();
    w.key("fourier_cutoff").value(cfg.truncation.fourier_cutoff);
    w.key("taylor_degree").value(cfg.truncation.taylor_degree);
    w.end_object();
    w.key("domain").begin_object();
    w.key("epsilon0").value(cfg.domain.epsilon0);
    w.key("r0").value(cfg.domain.r0);
    w.key("delta0").value(cfg.domain.delta0);
    w.key("kappa").value(cfg.domain.kappa);
    w.key("mu_exp").value(cfg.domain.mu_exp);
    w.end_object();
    w.key("solver").begin_object();
    w.key("resonance_threshold").value(cfg.solver.resonance_threshold);
    w.key("tolerance").value(cfg.solver.tolerance);
    w.key("max_steps").value(cfg.solver.max_steps);
    w.key("compat_tolerance").value(cfg.solver.compat_tolerance);
    w.end_object();
    w.key("synthesis").begin_object();
    w.key("amplitude").value(cfg.synthesis.amplitude);
    w.key("min_degree").value(cfg.synthesis.min_degree);
    w.key("max_degree").value(cfg.synthesis.max_degree);
    w.key("fourier_bound").value(cfg.synthesis.fourier_bound);
    w.key("matrix_size").value(cfg.synthesis.matrix_size);
    w.end_object();
    w.end_object();
}

}  // namespace kamtriv
