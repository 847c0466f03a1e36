// Text serialization.  Series files are line oriented:
//
//   series <n> <d> <fourier_cutoff> <taylor_degree>
//   P_1 ... P_n | Q_1 ... Q_d | re im
//
// Matrix files open with `matrix-series <n> <d> <K> <m_max> <ell>` and group
// records under `entry <row> <col>` lines (1-based).  Cocycle files open with
// `cocycle <n> <d> <K> <m_max> <ell> <ngen>` and group matrices under
// `generator <i>` lines (1-based); they store the deviations f_i of
// F_i = I + f_i.  Blank lines and `#` comments are ignored.  All floats are
// written with 17 significant digits, enough to round-trip doubles exactly.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kamtriv/series.hpp"

namespace kamtriv {

std::string format_double(double x);  // %.17g

std::string to_text(const FourierTaylorSeries& f);
std::string to_text(const MatrixSeries& m);
std::string to_text(const std::vector<MatrixSeries>& cocycle_deviations);

FourierTaylorSeries series_from_text(const std::string& text);
MatrixSeries matrix_from_text(const std::string& text);
std::vector<MatrixSeries> cocycle_from_text(const std::string& text);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);  // throws ConfigError when unreadable

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

// Minimal JSON emitter with insertion-ordered keys and %.17g numbers, so
// reports are byte-stable run to run.
class JsonWriter {
public:
    JsonWriter& begin_object();
    JsonWriter& end_object();
    JsonWriter& begin_array();
    JsonWriter& end_array();
    JsonWriter& key(const std::string& k);
    JsonWriter& value(const std::string& s);
    JsonWriter& value(const char* s);
    JsonWriter& value(double x);
    JsonWriter& value(int x);
    JsonWriter& value(long long x);
    JsonWriter& value(std::uint64_t x);
    JsonWriter& value(bool b);
    JsonWriter& value_null();
    JsonWriter& value(const std::vector<int>& xs);
    std::string str() const { return out_; }

private:
    void comma();
    std::string out_;
    std::vector<bool> first_stack_;
    bool pending_key_ = false;
};

}  // namespace kamtriv
