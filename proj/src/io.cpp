#include "kamtriv/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "kamtriv/errors.hpp"

namespace kamtriv {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void append_records(std::string& out, const FourierTaylorSeries& f) {
    for (const auto& [mode, c] : f.coeffs()) {
        std::string line;
        for (std::size_t k = 0; k < mode.p.size(); ++k) {
            if (k) line += ' ';
            line += std::to_string(mode.p[k]);
        }
        line += " | ";
        for (std::size_t l = 0; l < mode.q.size(); ++l) {
            if (l) line += ' ';
            line += std::to_string(mode.q[l]);
        }
        line += " | ";
        line += format_double(c.real());
        line += ' ';
        line += format_double(c.imag());
        line += '\n';
        out += line;
    }
}

std::string spec_fields(const TruncationSpec& s) {
    return std::to_string(s.n) + " " + std::to_string(s.d) + " " +
           std::to_string(s.fourier_cutoff) + " " + std::to_string(s.taylor_degree);
}

struct LineReader {
    std::istringstream in;
    int lineno = 0;
    explicit LineReader(const std::string& text) : in(text) {}
    // next meaningful line (comments and blanks skipped); false at EOF
    bool next(std::string& line) {
        while (std::getline(in, line)) {
            ++lineno;
            const auto pos = line.find('#');
            if (pos != std::string::npos) line.erase(pos);
            bool blank = true;
            for (char ch : line)
                if (!std::isspace(static_cast<unsigned char>(ch))) {
                    blank = false;
                    break;
                }
            if (!blank) return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("series file, line " + std::to_string(lineno) + ": " + msg);
    }
};

TruncationSpec parse_header(LineReader& r, std::istringstream& rest, const std::string& tag) {
    std::string line;
    if (!r.next(line)) r.fail("empty file");
    rest = std::istringstream(line);
    std::string word;
    rest >> word;
    if (word != tag) r.fail("expected header starting with '" + tag + "', got '" + word + "'");
    TruncationSpec spec;
    if (!(rest >> spec.n >> spec.d >> spec.fourier_cutoff >> spec.taylor_degree))
        r.fail("malformed header: need n d fourier_cutoff taylor_degree");
    try {
        spec.validate();
    } catch (const std::invalid_argument& e) {
        r.fail(e.what());
    }
    return spec;
}

// parses one coefficient record into the series; `line` must be a record
void parse_record(LineReader& r, const std::string& line, FourierTaylorSeries& f) {
    std::istringstream in(line);
    Mode mode;
    mode.p.resize(f.spec().n);
    mode.q.resize(f.spec().d);
    for (int k = 0; k < f.spec().n; ++k)
        if (!(in >> mode.p[k])) r.fail("expected " + std::to_string(f.spec().n) + " P indices");
    std::string sep;
    if (!(in >> sep) || sep != "|") r.fail("expected '|' after P indices");
    for (int l = 0; l < f.spec().d; ++l)
        if (!(in >> mode.q[l])) r.fail("expected " + std::to_string(f.spec().d) + " Q indices");
    if (!(in >> sep) || sep != "|") r.fail("expected '|' after Q indices");
    double re, im;
    if (!(in >> re >> im)) r.fail("expected 're im' coefficient pair");
    std::string extra;
    if (in >> extra) r.fail("unexpected trailing token '" + extra + "'");
    if (!f.in_bounds(mode)) r.fail("mode outside the declared truncation bounds");
    f.set(mode, {re, im});
}

}  // namespace

std::string to_text(const FourierTaylorSeries& f) {
    std::string out = "series " + spec_fields(f.spec()) + "\n";
    append_records(out, f);
    return out;
}

std::string to_text(const MatrixSeries& m) {
    std::string out =
        "matrix-series " + spec_fields(m.spec()) + " " + std::to_string(m.size()) + "\n";
    for (int r = 0; r < m.size(); ++r)
        for (int c = 0; c < m.size(); ++c) {
            if (m.at(r, c).empty()) continue;
            out += "entry " + std::to_string(r + 1) + " " + std::to_string(c + 1) + "\n";
            append_records(out, m.at(r, c));
        }
    return out;
}

std::string to_text(const std::vector<MatrixSeries>& cocycle_deviations) {
    if (cocycle_deviations.empty())
        throw std::invalid_argument("to_text: empty cocycle");
    const MatrixSeries& first = cocycle_deviations.front();
    std::string out = "cocycle " + spec_fields(first.spec()) + " " +
                      std::to_string(first.size()) + " " +
                      std::to_string(cocycle_deviations.size()) + "\n";
    for (std::size_t i = 0; i < cocycle_deviations.size(); ++i) {
        const MatrixSeries& m = cocycle_deviations[i];
        out += "generator " + std::to_string(i + 1) + "\n";
        for (int r = 0; r < m.size(); ++r)
            for (int c = 0; c < m.size(); ++c) {
                if (m.at(r, c).empty()) continue;
                out += "entry " + std::to_string(r + 1) + " " + std::to_string(c + 1) + "\n";
                append_records(out, m.at(r, c));
            }
    }
    return out;
}

FourierTaylorSeries series_from_text(const std::string& text) {
    LineReader r(text);
    std::istringstream rest;
    FourierTaylorSeries f(parse_header(r, rest, "series"));
    std::string extra;
    if (rest >> extra) r.fail("unexpected trailing token '" + extra + "' in header");
    std::string line;
    while (r.next(line)) parse_record(r, line, f);
    return f;
}

MatrixSeries matrix_from_text(const std::string& text) {
    LineReader r(text);
    std::istringstream rest;
    const TruncationSpec spec = parse_header(r, rest, "matrix-series");
    int size = 0;
    if (!(rest >> size) || size < 1) r.fail("matrix header needs a positive size");
    MatrixSeries m(spec, size);
    FourierTaylorSeries* cur = nullptr;
    std::string line;
    while (r.next(line)) {
        std::istringstream in(line);
        std::string word;
        in >> word;
        if (word == "entry") {
            int row = 0, col = 0;
            if (!(in >> row >> col) || row < 1 || row > size || col < 1 || col > size)
                r.fail("entry indices out of range");
            cur = &m.at(row - 1, col - 1);
            continue;
        }
        if (!cur) r.fail("coefficient record before any 'entry' line");
        parse_record(r, line, *cur);
    }
    return m;
}

std::vector<MatrixSeries> cocycle_from_text(const std::string& text) {
    LineReader r(text);
    std::istringstream rest;
    const TruncationSpec spec = parse_header(r, rest, "cocycle");
    int size = 0, ngen = 0;
    if (!(rest >> size >> ngen) || size < 1 || ngen < 1)
        r.fail("cocycle header needs a positive size and generator count");
    std::vector<MatrixSeries> out(ngen, MatrixSeries(spec, size));
    FourierTaylorSeries* cur = nullptr;
    MatrixSeries* cur_gen = nullptr;
    std::string line;
    while (r.next(line)) {
        std::istringstream in(line);
        std::string word;
        in >> word;
        if (word == "generator") {
            int g = 0;
            if (!(in >> g) || g < 1 || g > ngen) r.fail("generator index out of range");
            cur_gen = &out[g - 1];
            cur = nullptr;
            continue;
        }
        if (word == "entry") {
            if (!cur_gen) r.fail("'entry' before any 'generator' line");
            int row = 0, col = 0;
            if (!(in >> row >> col) || row < 1 || row > size || col < 1 || col > size)
                r.fail("entry indices out of range");
            cur = &cur_gen->at(row - 1, col - 1);
            continue;
        }
        if (!cur) r.fail("coefficient record before any 'entry' line");
        parse_record(r, line, *cur);
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << content;
    if (!out) throw ConfigError("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

JsonWriter& JsonWriter::begin_object() {
    comma();
    out_ += '{';
    first_stack_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_object() {
    out_ += '}';
    first_stack_.pop_back();
    return *this;
}

JsonWriter& JsonWriter::begin_array() {
    comma();
    out_ += '[';
    first_stack_.push_back(true);
    return *this;
}

JsonWriter& JsonWriter::end_array() {
    out_ += ']';
    first_stack_.pop_back();
    return *this;
}

void JsonWriter::comma() {
    if (pending_key_) {
        pending_key_ = false;
        return;  // value directly after a key
    }
    if (!first_stack_.empty()) {
        if (!first_stack_.back()) out_ += ',';
        first_stack_.back() = false;
    }
}

namespace {
std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    return out;
}
}  // namespace

JsonWriter& JsonWriter::key(const std::string& k) {
    comma();
    out_ += '"';
    out_ += json_escape(k);
    out_ += "\":";
    pending_key_ = true;
    return *this;
}

JsonWriter& JsonWriter::value(const std::string& s) {
    comma();
    out_ += '"';
    out_ += json_escape(s);
    out_ += '"';
    return *this;
}

JsonWriter& JsonWriter::value(const char* s) { return value(std::string(s)); }

JsonWriter& JsonWriter::value(double x) {
    comma();
    out_ += format_double(x);
    return *this;
}

JsonWriter& JsonWriter::value(int x) {
    comma();
    out_ += std::to_string(x);
    return *this;
}

JsonWriter& JsonWriter::value(long long x) {
    comma();
    out_ += std::to_string(x);
    return *this;
}

JsonWriter& JsonWriter::value(std::uint64_t x) {
    comma();
    out_ += std::to_string(x);
    return *this;
}

JsonWriter& JsonWriter::value(bool b) {
    comma();
    out_ += b ? "true" : "false";
    return *this;
}

JsonWriter& JsonWriter::value_null() {
    comma();
    out_ += "null";
    return *this;
}

JsonWriter& JsonWriter::value(const std::vector<int>& xs) {
    begin_array();
    for (int x : xs) value(x);
    return end_array();
}

}  // namespace kamtriv
