// Model description files (.qsc): parser, canonical serializer, and the
// numeric validation report. Grammar: `[section]` headers followed by
// `key = value` entries; values are numbers, complex literals `a+bi`, matrix
// literals `[[...];[...]]`, number lists `[...]`, or bare words; `#` starts a
// comment. Unknown keys are rejected unless parsing leniently.
#pragma once

#include "qsc/block_matrix.hpp"
#include "qsc/noise.hpp"
#include "qsc/unitarity.hpp"
#include "qsc/wong_zakai.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace qsc {

enum class ParseErrorKind { lexical, syntax, unknown_key, dimension, invariant, io };

// Positioned parse failure; line and column are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(ParseErrorKind kind, int line, int col, const std::string& message);
    ParseErrorKind kind() const { return kind_; }
    int line() const { return line_; }
    int col() const { return col_; }

private:
    ParseErrorKind kind_;
    int line_, col_;
};

const char* parse_error_kind_name(ParseErrorKind k);

enum class CoefficientStyle { e_blocks, hp, raw_g };

// Parsed model file. Exactly one coefficient style is populated; matrices not
// declared in the file are zero blocks of the declared shape.
struct ModelSpec {
    int d = 1;  // initial-space dimension
    int n = 1;  // channel count

    CoefficientStyle style = CoefficientStyle::e_blocks;
    BlockMatrix e;          // style e_blocks: Hermitian coefficient family
    HPParams hp;            // style hp: scattering/coupling/Hamiltonian triple
    BlockMatrix g;          // style raw_g: Ito coefficients as given

    bool gauge_from_noise = true;  // [gauge] source=from-noise (default)
    Matrix z;                      // explicit n x n gauge matrix otherwise

    bool has_noise = false;
    NoiseKind noise_kind = NoiseKind::ou;
    double omega = 0.0;

    bool has_sim = false;
    double t = 1.0;
    std::vector<double> lambdas;
    int order = 4;
    std::vector<std::vector<Segment>> f_profile;  // per channel, may be empty
    std::vector<std::vector<Segment>> g_profile;

    // Derived accessors.
    CorrelationFamily family() const;  // requires has_noise
    Gauge gauge() const;               // explicit Z, else noise-derived weight
    TestFunction f_function() const;
    TestFunction g_function() const;
};

// Parses a model file; throws ParseError. In lenient mode unknown sections and
// keys are skipped instead of rejected.
ModelSpec parse_model(const std::string& text, bool lenient = false);

// Parses a bare matrix literal (comments allowed, nothing else in the text).
Matrix parse_matrix_literal(const std::string& text);

// Canonical text form: fixed section order, sorted keys, 17-significant-digit
// numbers. parse_model(serialize_model(m)) reproduces m exactly.
std::string serialize_model(const ModelSpec& m);

// Exact field-by-field equality (matrix entries compared by value).
bool spec_equal(const ModelSpec& a, const ModelSpec& b);

// Numeric validation: Hermiticity of declared families, gauge Hermiticity,
// channel contraction of V E, admissibility of HP/raw coefficient data.
struct ValidationItem {
    std::string name;
    bool pass = true;
    double measured = 0.0;
    std::string detail;
};
struct ValidationReport {
    std::vector<ValidationItem> items;
    bool pass = true;
};
ValidationReport validate_model(const ModelSpec& m);

}  // namespace qsc
