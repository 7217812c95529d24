#include "qsc/modelspec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <map>
#include <set>
#include <utility>

namespace qsc {

// ----- positioned errors -----

namespace {

std::string position_message(ParseErrorKind kind, int line, int col,
                             const std::string& message) {
    char head[96];
    std::snprintf(head, sizeof head, "line %d, col %d: ", line, col);
    return std::string(head) + parse_error_kind_name(kind) + " error: " + message;
}

}  // namespace

ParseError::ParseError(ParseErrorKind kind, int line, int col,
                       const std::string& message)
    : std::runtime_error(position_message(kind, line, col, message)),
      kind_(kind),
      line_(line),
      col_(col) {}

const char* parse_error_kind_name(ParseErrorKind k) {
    switch (k) {
        case ParseErrorKind::lexical: return "lexical";
        case ParseErrorKind::syntax: return "syntax";
        case ParseErrorKind::unknown_key: return "unknown-key";
        case ParseErrorKind::dimension: return "dimension";
        case ParseErrorKind::invariant: return "invariant";
        case ParseErrorKind::io: return "io";
    }
    return "unknown";
}

// ----- lexer -----

namespace {

struct Token {
    enum Kind { lbracket, rbracket, comma, semi, equals, ident, number, complex_lit, eof };
    Kind kind = eof;
    double num = 0.0;
    Complex cplx{0.0, 0.0};
    std::string text;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    Token next() {
        skip_space();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) {
            t.kind = Token::eof;
            return t;
        }
        char c = src_[pos_];
        switch (c) {
            case '[': advance(); t.kind = Token::lbracket; return t;
            case ']': advance(); t.kind = Token::rbracket; return t;
            case ',': advance(); t.kind = Token::comma; return t;
            case ';': advance(); t.kind = Token::semi; return t;
            case '=': advance(); t.kind = Token::equals; return t;
            default: break;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return lex_ident(t);
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
            c == '.')
            return lex_number(t);
        throw ParseError(ParseErrorKind::lexical, line_, col_,
                         std::string("unexpected character '") + c + "'");
    }

private:
    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (pos_ < src_.size()) {
            if (src_[pos_] == '\n') {
                ++line_;
                col_ = 1;
            } else {
                ++col_;
            }
            ++pos_;
        }
    }

    Token lex_ident(Token t) {
        size_t start = pos_;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')
                advance();
            else
                break;
        }
        t.kind = Token::ident;
        t.text = src_.substr(start, pos_ - start);
        return t;
    }

    // Reads one float starting at pos_; returns consumed length (0 on failure).
    size_t scan_float(double* out) const {
        const char* begin = src_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) return 0;
        // reject strtod's hex/inf/nan spellings for a regular token set
        for (const char* p = begin; p != end; ++p) {
            char c = *p;
            if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
                  c == '.' || c == 'e' || c == 'E'))
                return 0;
        }
        *out = v;
        return static_cast<size_t>(end - begin);
    }

    Token lex_number(Token t) {
        double re = 0.0;
        size_t len = scan_float(&re);
        if (len == 0)
            throw ParseError(ParseErrorKind::lexical, line_, col_, "malformed number");
        for (size_t k = 0; k < len; ++k) advance();
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
            // candidate a+bi / a-bi literal (no whitespace inside)
            int sign_line = line_, sign_col = col_;
            double im = 0.0;
            size_t ilen = scan_float(&im);
            if (ilen == 0)
                throw ParseError(ParseErrorKind::lexical, sign_line, sign_col,
                                 "malformed complex literal");
            bool has_i = pos_ + ilen < src_.size() && src_[pos_ + ilen] == 'i';
            if (!has_i)
                throw ParseError(ParseErrorKind::lexical, sign_line, sign_col,
                                 "complex literal must end in 'i'");
            for (size_t k = 0; k < ilen + 1; ++k) advance();
            t.kind = Token::complex_lit;
            t.cplx = Complex(re, im);
            return t;
        }
        if (pos_ < src_.size() &&
            (std::isalpha(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            throw ParseError(ParseErrorKind::lexical, line_, col_,
                             "unexpected character after number");
        t.kind = Token::number;
        t.num = re;
        return t;
    }

    const std::string& src_;
    size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

// ----- syntax phase -----

struct Value {
    enum Kind { number, complex_scalar, matrix, list, word };
    Kind kind = number;
    double num = 0.0;
    Complex cplx{0.0, 0.0};
    Matrix mat;
    std::vector<double> items;
    std::string text;
    int line = 1, col = 1;
};

struct Entry {
    std::string key;
    Value value;
    int line = 1, col = 1;
};

struct Section {
    std::string name;
    std::vector<Entry> entries;
    int line = 1, col = 1;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lexer_(text) { cur_ = lexer_.next(); }

    // one value followed by end of input (bare-literal files)
    Value single_value() {
        Value v = parse_value();
        if (cur_.kind != Token::eof)
            throw ParseError(ParseErrorKind::syntax, cur_.line, cur_.col,
                             "unexpected trailing content");
        return v;
    }

    std::vector<Section> run() {
        std::vector<Section> out;
        while (cur_.kind != Token::eof) {
            if (cur_.kind != Token::lbracket)
                throw ParseError(ParseErrorKind::syntax, cur_.line, cur_.col,
                                 "expected '[section]' header");
            Section s;
            s.line = cur_.line;
            s.col = cur_.col;
            consume();  // '['
            if (cur_.kind != Token::ident)
                throw ParseError(ParseErrorKind::syntax, cur_.line, cur_.col,
                                 "expected section name");
            s.name = cur_.text;
            consume();
            expect(Token::rbracket, "expected ']' after section name");
            while (cur_.kind == Token::ident) {
                Entry e;
                e.key = cur_.text;
                e.line = cur_.line;
                e.col = cur_.col;
                consume();
                expect(Token::equals, "expected '=' after key");
                e.value = parse_value();
                for (const Entry& prev : s.entries)
                    if (prev.key == e.key)
                        throw ParseError(ParseErrorKind::syntax, e.line, e.col,
                                         "duplicate key '" + e.key + "'");
                s.entries.push_back(std::move(e));
            }
            out.push_back(std::move(s));
        }
        return out;
    }

private:
    void consume() { cur_ = lexer_.next(); }

    void expect(Token::Kind k, const char* message) {
        if (cur_.kind != k)
            throw ParseError(ParseErrorKind::syntax, cur_.line, cur_.col, message);
        consume();
    }

    Value parse_value() {
        Value v;
        v.line = cur_.line;
        v.col = cur_.col;
        switch (cur_.kind) {
            case Token::number:
                v.kind = Value::number;
                v.num = cur_.num;
                consume();
                return v;
            case Token::complex_lit:
                v.kind = Value::complex_scalar;
                v.cplx = cur_.cplx;
                consume();
                return v;
            case Token::ident:
                v.kind = Value::word;
                v.text = cur_.text;
                consume();
                return v;
            case Token::lbracket:
                consume();
                if (cur_.kind == Token::lbracket) return parse_matrix(std::move(v));
                return parse_list(std::move(v));
            default:
                throw ParseError(ParseErrorKind::syntax, cur_.line, cur_.col,
                                 "expected a value");
        }
    }

    Complex parse_matrix_entry() {
        if (cur_.kind == Token::number) {
            Complex out(cur_.num, 0.0);
            consume();
            return out;
        }
        if (cur_.kind == Token::complex_lit) {
            Complex out = cur_.cplx;
            consume();
            return out;
        }
        throw ParseError(ParseErrorKind::syntax, cur_.line, cur_.col,
                         "expected a number or complex entry");
    }

    Value parse_matrix(Value v) {
        v.kind = Value::matrix;
        std::vector<std::vector<Complex>> rows;
        while (true) {
            int row_line = cur_.line, row_col = cur_.col;
            expect(Token::lbracket, "expected '[' to start a matrix row");
            std::vector<Complex> row;
            row.push_back(parse_matrix_entry());
            while (cur_.kind == Token::comma) {
                consume();
                row.push_back(parse_matrix_entry());
            }
            expect(Token::rbracket, "expected ']' to close a matrix row");
            if (!rows.empty() && rows.front().size() != row.size())
                throw ParseError(ParseErrorKind::syntax, row_line, row_col,
                                 "matrix row length mismatch");
            rows.push_back(std::move(row));
            if (cur_.kind == Token::semi) {
                consume();
                continue;
            }
            break;
        }
        expect(Token::rbracket, "expected ']' to close the matrix");
        v.mat = Matrix(rows.size(), rows.front().size());
        for (size_t r = 0; r < rows.size(); ++r)
            for (size_t c = 0; c < rows.front().size(); ++c)
                v.mat(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
        return v;
    }

    Value parse_list(Value v) {
        v.kind = Value::list;
        if (cur_.kind == Token::rbracket) {
            consume();
            return v;
        }
        while (true) {
            if (cur_.kind != Token::number)
                throw ParseError(ParseErrorKind::syntax, cur_.line, cur_.col,
                                 "expected a number in list");
            v.items.push_back(cur_.num);
            consume();
            if (cur_.kind == Token::comma) {
                consume();
                continue;
            }
            break;
        }
        expect(Token::rbracket, "expected ']' to close the list");
        return v;
    }

    Lexer lexer_;
    Token cur_;
};

// ----- semantic phase -----

int require_int(const Value& v, const char* what, int lo, int hi) {
    if (v.kind != Value::number || !std::isfinite(v.num) ||
        std::floor(v.num) != v.num)
        throw ParseError(ParseErrorKind::invariant, v.line, v.col,
                         std::string(what) + " must be an integer");
    if (v.num < lo || v.num > hi)
        throw ParseError(ParseErrorKind::dimension, v.line, v.col,
                         std::string(what) + " must be between " + std::to_string(lo) +
                             " and " + std::to_string(hi));
    return static_cast<int>(v.num);
}

double require_number(const Value& v, const char* what) {
    if (v.kind != Value::number || !std::isfinite(v.num))
        throw ParseError(ParseErrorKind::invariant, v.line, v.col,
                         std::string(what) + " must be a finite number");
    return v.num;
}

const Matrix& require_matrix(const Value& v, const Entry& e, int rows, int cols) {
    if (v.kind != Value::matrix)
        throw ParseError(ParseErrorKind::syntax, v.line, v.col,
                         "'" + e.key + "' must be a matrix literal");
    if (v.mat.rows() != rows || v.mat.cols() != cols)
        throw ParseError(ParseErrorKind::dimension, v.line, v.col,
                         "'" + e.key + "' must be " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    return v.mat;
}

// Parses key names like E01 / W12 / L3; returns false when the shape is wrong.
bool block_indices(const std::string& key, char prefix, int* a, int* b) {
    if (key.size() != 3 || key[0] != prefix) return false;
    if (!std::isdigit(static_cast<unsigned char>(key[1])) ||
        !std::isdigit(static_cast<unsigned char>(key[2])))
        return false;
    *a = key[1] - '0';
    *b = key[2] - '0';
    return true;
}

bool channel_index(const std::string& key, char prefix, int* i) {
    if (key.size() != 2 || key[0] != prefix) return false;
    if (!std::isdigit(static_cast<unsigned char>(key[1]))) return false;
    *i = key[1] - '0';
    return true;
}

std::vector<Segment> require_profile(const Value& v, const Entry& e) {
    if (v.kind != Value::matrix)
        throw ParseError(ParseErrorKind::syntax, v.line, v.col,
                         "'" + e.key + "' must be rows of [t_end, value]");
    if (v.mat.cols() != 2)
        throw ParseError(ParseErrorKind::dimension, v.line, v.col,
                         "'" + e.key + "' rows must have two entries");
    std::vector<Segment> out;
    double prev = 0.0;
    for (int r = 0; r < v.mat.rows(); ++r) {
        Complex t_end = v.mat(r, 0);
        if (t_end.imag() != 0.0)
            throw ParseError(ParseErrorKind::invariant, v.line, v.col,
                             "'" + e.key + "' segment times must be real");
        if (!(t_end.real() > prev))
            throw ParseError(ParseErrorKind::invariant, v.line, v.col,
                             "'" + e.key + "' segment times must be ascending");
        prev = t_end.real();
        out.push_back(Segment{t_end.real(), v.mat(r, 1)});
    }
    return out;
}

}  // namespace

// ----- parse -----

ModelSpec parse_model(const std::string& text, bool lenient) {
    std::vector<Section> sections = Parser(text).run();

    static const std::set<std::string> known_sections{"model", "E",     "HP",
                                                      "G",     "gauge", "noise", "sim"};
    for (size_t i = 0; i < sections.size(); ++i) {
        if (!known_sections.count(sections[i].name)) {
            if (lenient) continue;
            throw ParseError(ParseErrorKind::unknown_key, sections[i].line,
                             sections[i].col,
                             "unknown section '" + sections[i].name + "'");
        }
        for (size_t j = i + 1; j < sections.size(); ++j)
            if (sections[j].name == sections[i].name)
                throw ParseError(ParseErrorKind::syntax, sections[j].line,
                                 sections[j].col,
                                 "duplicate section '" + sections[j].name + "'");
    }

    // the model section is read first; everything else depends on d and N
    const Section* model = nullptr;
    for (const auto& s : sections)
        if (s.name == "model") model = &s;
    if (!model)
        throw ParseError(ParseErrorKind::invariant, 1, 1,
                         "missing required section 'model'");

    ModelSpec m;
    bool have_d = false, have_n = false;
    for (const Entry& e : model->entries) {
        if (e.key == "d") {
            m.d = require_int(e.value, "d", 1, 256);
            have_d = true;
        } else if (e.key == "N") {
            m.n = require_int(e.value, "N", 1, 9);
            have_n = true;
        } else if (!lenient) {
            throw ParseError(ParseErrorKind::unknown_key, e.line, e.col,
                             "unknown key '" + e.key + "' in [model]");
        }
    }
    if (!have_d || !have_n)
        throw ParseError(ParseErrorKind::invariant, model->line, model->col,
                         "[model] requires both d and N");

    bool saw_e = false, saw_hp = false, saw_g = false, saw_gauge = false;
    std::map<std::pair<int, int>, const Entry*> declared_e;

    for (const Section& s : sections) {
        if (s.name == "model" || !known_sections.count(s.name)) continue;

        if (s.name == "E") {
            saw_e = true;
            m.e = BlockMatrix(m.n, m.d);
            for (const Entry& e : s.entries) {
                int a = 0, b = 0;
                if (!block_indices(e.key, 'E', &a, &b)) {
                    if (lenient) continue;
                    throw ParseError(ParseErrorKind::unknown_key, e.line, e.col,
                                     "unknown key '" + e.key + "' in [E]");
                }
                if (a > m.n || b > m.n)
                    throw ParseError(ParseErrorKind::dimension, e.line, e.col,
                                     "'" + e.key + "' channel index exceeds N");
                m.e.set_block(a, b, require_matrix(e.value, e, m.d, m.d));
                declared_e[{a, b}] = &e;
            }
            for (const auto& [idx, entry] : declared_e) {
                if (!declared_e.count({idx.second, idx.first}))
                    throw ParseError(ParseErrorKind::invariant, entry->line, entry->col,
                                     "Hermitian family incomplete: '" + entry->key +
                                         "' has no matching partner block");
            }
        } else if (s.name == "HP") {
            saw_hp = true;
            m.hp.w.assign(m.n, std::vector<Matrix>(m.n));
            for (int i = 0; i < m.n; ++i)
                for (int j = 0; j < m.n; ++j)
                    m.hp.w[i][j] = i == j ? Matrix(Matrix::Identity(m.d, m.d))
                                          : Matrix(Matrix::Zero(m.d, m.d));
            m.hp.l.assign(m.n, Matrix::Zero(m.d, m.d));
            m.hp.h = Matrix::Zero(m.d, m.d);
            for (const Entry& e : s.entries) {
                int a = 0, b = 0;
                if (block_indices(e.key, 'W', &a, &b)) {
                    if (a < 1 || a > m.n || b < 1 || b > m.n)
                        throw ParseError(ParseErrorKind::dimension, e.line, e.col,
                                         "'" + e.key + "' channel index out of range");
                    m.hp.w[a - 1][b - 1] = require_matrix(e.value, e, m.d, m.d);
                } else if (channel_index(e.key, 'L', &a)) {
                    if (a < 1 || a > m.n)
                        throw ParseError(ParseErrorKind::dimension, e.line, e.col,
                                         "'" + e.key + "' channel index out of range");
                    m.hp.l[a - 1] = require_matrix(e.value, e, m.d, m.d);
                } else if (e.key == "H") {
                    m.hp.h = require_matrix(e.value, e, m.d, m.d);
                } else if (!lenient) {
                    throw ParseError(ParseErrorKind::unknown_key, e.line, e.col,
                                     "unknown key '" + e.key + "' in [HP]");
                }
            }
        } else if (s.name == "G") {
            saw_g = true;
            m.g = BlockMatrix(m.n, m.d);
            for (const Entry& e : s.entries) {
                int a = 0, b = 0;
                if (!block_indices(e.key, 'G', &a, &b)) {
                    if (lenient) continue;
                    throw ParseError(ParseErrorKind::unknown_key, e.line, e.col,
                                     "unknown key '" + e.key + "' in [G]");
                }
                if (a > m.n || b > m.n)
                    throw ParseError(ParseErrorKind::dimension, e.line, e.col,
                                     "'" + e.key + "' channel index exceeds N");
                m.g.set_block(a, b, require_matrix(e.value, e, m.d, m.d));
            }
        } else if (s.name == "gauge") {
            saw_gauge = true;
            bool have_source = false, have_z = false;
            for (const Entry& e : s.entries) {
                if (e.key == "source") {
                    if (e.value.kind != Value::word || e.value.text != "from-noise")
                        throw ParseError(ParseErrorKind::invariant, e.value.line,
                                         e.value.col,
                                         "gauge source must be 'from-noise'");
                    have_source = true;
                } else if (e.key == "Z") {
                    m.z = require_matrix(e.value, e, m.n, m.n);
                    have_z = true;
                } else if (!lenient) {
                    throw ParseError(ParseErrorKind::unknown_key, e.line, e.col,
                                     "unknown key '" + e.key + "' in [gauge]");
                }
            }
            if (have_source && have_z)
                throw ParseError(ParseErrorKind::invariant, s.line, s.col,
                                 "[gauge] must give source or Z, not both");
            if (!have_source && !have_z)
                throw ParseError(ParseErrorKind::invariant, s.line, s.col,
                                 "[gauge] requires source or Z");
            m.gauge_from_noise = have_source;
        } else if (s.name == "noise") {
            m.has_noise = true;
            bool have_family = false, have_omega = false;
            for (const Entry& e : s.entries) {
                if (e.key == "family") {
                    if (e.value.kind != Value::word)
                        throw ParseError(ParseErrorKind::invariant, e.value.line,
                                         e.value.col, "noise family must be a word");
                    if (e.value.text == "ou") {
                        m.noise_kind = NoiseKind::ou;
                    } else if (e.value.text == "ou-modulated") {
                        m.noise_kind = NoiseKind::ou_modulated;
                    } else {
                        throw ParseError(ParseErrorKind::invariant, e.value.line,
                                         e.value.col,
                                         "unknown noise family '" + e.value.text + "'");
                    }
                    have_family = true;
                } else if (e.key == "omega") {
                    m.omega = require_number(e.value, "omega");
                    have_omega = true;
                } else if (!lenient) {
                    throw ParseError(ParseErrorKind::unknown_key, e.line, e.col,
                                     "unknown key '" + e.key + "' in [noise]");
                }
            }
            if (!have_family)
                throw ParseError(ParseErrorKind::invariant, s.line, s.col,
                                 "[noise] requires a family");
            if (have_omega && m.noise_kind == NoiseKind::ou)
                throw ParseError(ParseErrorKind::invariant, s.line, s.col,
                                 "omega only applies to the ou-modulated family");
        } else if (s.name == "sim") {
            m.has_sim = true;
            m.f_profile.assign(m.n, {});
            m.g_profile.assign(m.n, {});
            for (const Entry& e : s.entries) {
                int i = 0;
                if (e.key == "t") {
                    m.t = require_number(e.value, "t");
                    if (!(m.t > 0.0))
                        throw ParseError(ParseErrorKind::invariant, e.value.line,
                                         e.value.col, "t must be positive");
                } else if (e.key == "order") {
                    m.order = require_int(e.value, "order", 0, 64);
                } else if (e.key == "lambda") {
                    if (e.value.kind != Value::list)
                        throw ParseError(ParseErrorKind::syntax, e.value.line,
                                         e.value.col, "lambda must be a list");
                    for (double x : e.value.items)
                        if (!(x > 0.0) || !std::isfinite(x))
                            throw ParseError(ParseErrorKind::invariant, e.value.line,
                                             e.value.col,
                                             "lambda entries must be positive");
                    m.lambdas = e.value.items;
                } else if (channel_index(e.key, 'f', &i)) {
                    if (i < 1 || i > m.n)
                        throw ParseError(ParseErrorKind::dimension, e.line, e.col,
                                         "'" + e.key + "' channel index out of range");
                    m.f_profile[i - 1] = require_profile(e.value, e);
                } else if (channel_index(e.key, 'g', &i)) {
                    if (i < 1 || i > m.n)
                        throw ParseError(ParseErrorKind::dimension, e.line, e.col,
                                         "'" + e.key + "' channel index out of range");
                    m.g_profile[i - 1] = require_profile(e.value, e);
                } else if (!lenient) {
                    throw ParseError(ParseErrorKind::unknown_key, e.line, e.col,
                                     "unknown key '" + e.key + "' in [sim]");
                }
            }
        }
    }

    int styles = (saw_e ? 1 : 0) + (saw_hp ? 1 : 0) + (saw_g ? 1 : 0);
    if (styles != 1)
        throw ParseError(ParseErrorKind::invariant, 1, 1,
                         styles == 0
                             ? "exactly one coefficient section ([E], [HP], or [G]) "
                               "is required; none found"
                             : "exactly one coefficient section ([E], [HP], or [G]) "
                               "is required; several found");
    m.style = saw_e ? CoefficientStyle::e_blocks
                    : (saw_hp ? CoefficientStyle::hp : CoefficientStyle::raw_g);
    if (!saw_gauge) m.gauge_from_noise = true;
    return m;
}

Matrix parse_matrix_literal(const std::string& text) {
    Parser parser(text);
    Value v = parser.single_value();
    if (v.kind != Value::matrix)
        throw ParseError(ParseErrorKind::syntax, v.line, v.col,
                         "expected a matrix literal");
    return v.mat;
}

// ----- derived accessors -----

CorrelationFamily ModelSpec::family() const {
    if (!has_noise)
        throw std::invalid_argument("ModelSpec::family: no noise section present");
    CorrelationFamily fam;
    fam.kind = noise_kind;
    fam.channels = n;
    fam.omega = noise_kind == NoiseKind::ou_modulated ? omega : 0.0;
    return fam;
}

Gauge ModelSpec::gauge() const {
    if (!gauge_from_noise) return Gauge(n, z);
    if (has_noise) return family().gauge();
    return Gauge(n);  // symmetric gauge
}

TestFunction ModelSpec::f_function() const {
    TestFunction f(n);
    for (int i = 1; i <= n && i <= static_cast<int>(f_profile.size()); ++i)
        if (!f_profile[static_cast<size_t>(i - 1)].empty())
            f.set_channel(i, f_profile[static_cast<size_t>(i - 1)]);
    return f;
}

TestFunction ModelSpec::g_function() const {
    TestFunction g(n);
    for (int i = 1; i <= n && i <= static_cast<int>(g_profile.size()); ++i)
        if (!g_profile[static_cast<size_t>(i - 1)].empty())
            g.set_channel(i, g_profile[static_cast<size_t>(i - 1)]);
    return g;
}

// ----- serialize -----

namespace {

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_int(int x) { return std::to_string(x); }

std::string fmt_complex(Complex z) {
    std::string s = fmt_double(z.real());
    double im = z.imag();
    if (std::signbit(im)) {
        s += '-';
        s += fmt_double(-im);
    } else {
        s += '+';
        s += fmt_double(im);
    }
    s += 'i';
    return s;
}

std::string fmt_matrix(const Matrix& m) {
    std::string s = "[";
    for (int r = 0; r < m.rows(); ++r) {
        if (r) s += ';';
        s += '[';
        for (int c = 0; c < m.cols(); ++c) {
            if (c) s += ',';
            s += fmt_complex(m(r, c));
        }
        s += ']';
    }
    s += ']';
    return s;
}

std::string fmt_profile(const std::vector<Segment>& segs) {
    std::string s = "[";
    for (size_t k = 0; k < segs.size(); ++k) {
        if (k) s += ';';
        s += '[';
        s += fmt_complex(Complex(segs[k].t_end, 0.0));
        s += ',';
        s += fmt_complex(segs[k].value);
        s += ']';
    }
    s += ']';
    return s;
}

}  // namespace

std::string serialize_model(const ModelSpec& m) {
    std::string out;
    out += "[model]\n";
    out += "N=" + fmt_int(m.n) + "\n";
    out += "d=" + fmt_int(m.d) + "\n";

    if (m.style == CoefficientStyle::e_blocks) {
        out += "[E]\n";
        for (int a = 0; a <= m.n; ++a)
            for (int b = 0; b <= m.n; ++b)
                out += "E" + fmt_int(a) + fmt_int(b) + "=" + fmt_matrix(m.e.block(a, b)) +
                       "\n";
    } else if (m.style == CoefficientStyle::hp) {
        out += "[HP]\n";
        out += "H=" + fmt_matrix(m.hp.h) + "\n";
        for (int i = 1; i <= m.n; ++i)
            out += "L" + fmt_int(i) + "=" + fmt_matrix(m.hp.l[static_cast<size_t>(i - 1)]) +
                   "\n";
        for (int i = 1; i <= m.n; ++i)
            for (int j = 1; j <= m.n; ++j)
                out += "W" + fmt_int(i) + fmt_int(j) + "=" +
                       fmt_matrix(m.hp.w[static_cast<size_t>(i - 1)]
                                        [static_cast<size_t>(j - 1)]) +
                       "\n";
    } else {
        out += "[G]\n";
        for (int a = 0; a <= m.n; ++a)
            for (int b = 0; b <= m.n; ++b)
                out += "G" + fmt_int(a) + fmt_int(b) + "=" + fmt_matrix(m.g.block(a, b)) +
                       "\n";
    }

    out += "[gauge]\n";
    if (m.gauge_from_noise)
        out += "source=from-noise\n";
    else
        out += "Z=" + fmt_matrix(m.z) + "\n";

    if (m.has_noise) {
        out += "[noise]\n";
        out += "family=";
        out += m.noise_kind == NoiseKind::ou ? "ou" : "ou-modulated";
        out += "\n";
        if (m.noise_kind == NoiseKind::ou_modulated)
            out += "omega=" + fmt_double(m.omega) + "\n";
    }

    if (m.has_sim) {
        out += "[sim]\n";
        for (int i = 1; i <= m.n && i <= static_cast<int>(m.f_profile.size()); ++i)
            if (!m.f_profile[static_cast<size_t>(i - 1)].empty())
                out += "f" + fmt_int(i) + "=" +
                       fmt_profile(m.f_profile[static_cast<size_t>(i - 1)]) + "\n";
        for (int i = 1; i <= m.n && i <= static_cast<int>(m.g_profile.size()); ++i)
            if (!m.g_profile[static_cast<size_t>(i - 1)].empty())
                out += "g" + fmt_int(i) + "=" +
                       fmt_profile(m.g_profile[static_cast<size_t>(i - 1)]) + "\n";
        out += "lambda=[";
        for (size_t k = 0; k < m.lambdas.size(); ++k) {
            if (k) out += ',';
            out += fmt_double(m.lambdas[k]);
        }
        out += "]\n";
        out += "order=" + fmt_int(m.order) + "\n";
        out += "t=" + fmt_double(m.t) + "\n";
    }
    return out;
}

// ----- exact comparison -----

namespace {

bool mat_equal(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c)
            if (a(r, c) != b(r, c)) return false;
    return true;
}

bool profile_equal(const std::vector<std::vector<Segment>>& a,
                   const std::vector<std::vector<Segment>>& b) {
    auto nonempty = [](const std::vector<std::vector<Segment>>& p) {
        size_t n = 0;
        for (const auto& ch : p) n += ch.empty() ? 0 : 1;
        return n;
    };
    if (nonempty(a) != nonempty(b)) return false;
    size_t common = std::min(a.size(), b.size());
    for (size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
        const std::vector<Segment>* pa = i < a.size() ? &a[i] : nullptr;
        const std::vector<Segment>* pb = i < b.size() ? &b[i] : nullptr;
        if ((pa == nullptr || pa->empty()) != (pb == nullptr || pb->empty()))
            return false;
        if (pa == nullptr || pb == nullptr || i >= common) continue;
        if (pa->size() != pb->size()) return false;
        for (size_t k = 0; k < pa->size(); ++k)
            if ((*pa)[k].t_end != (*pb)[k].t_end || (*pa)[k].value != (*pb)[k].value)
                return false;
    }
    return true;
}

}  // namespace

bool spec_equal(const ModelSpec& a, const ModelSpec& b) {
    if (a.d != b.d || a.n != b.n || a.style != b.style) return false;
    if (a.style == CoefficientStyle::e_blocks && !mat_equal(a.e.flat(), b.e.flat()))
        return false;
    if (a.style == CoefficientStyle::raw_g && !mat_equal(a.g.flat(), b.g.flat()))
        return false;
    if (a.style == CoefficientStyle::hp) {
        if (a.hp.w.size() != b.hp.w.size() || a.hp.l.size() != b.hp.l.size())
            return false;
        for (size_t i = 0; i < a.hp.w.size(); ++i)
            for (size_t j = 0; j < a.hp.w[i].size(); ++j)
                if (!mat_equal(a.hp.w[i][j], b.hp.w[i][j])) return false;
        for (size_t i = 0; i < a.hp.l.size(); ++i)
            if (!mat_equal(a.hp.l[i], b.hp.l[i])) return false;
        if (!mat_equal(a.hp.h, b.hp.h)) return false;
    }
    if (a.gauge_from_noise != b.gauge_from_noise) return false;
    if (!a.gauge_from_noise && !mat_equal(a.z, b.z)) return false;
    if (a.has_noise != b.has_noise) return false;
    if (a.has_noise && (a.noise_kind != b.noise_kind || a.omega != b.omega))
        return false;
    if (a.has_sim != b.has_sim) return false;
    if (a.has_sim) {
        if (a.t != b.t || a.order != b.order || a.lambdas != b.lambdas) return false;
        if (!profile_equal(a.f_profile, b.f_profile) ||
            !profile_equal(a.g_profile, b.g_profile))
            return false;
    }
    return true;
}

// ----- validation -----

namespace {

Matrix channel_embed(const Matrix& v_sub, int d) {
    int n = static_cast<int>(v_sub.rows());
    Matrix out = Matrix::Zero(n * d, n * d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.block(i * d, j * d, d, d) =
                v_sub(i, j) * Matrix::Identity(d, d);
    return out;
}

}  // namespace

ValidationReport validate_model(const ModelSpec& m) {
    ValidationReport rep;
    auto add = [&](const std::string& name, bool pass, double measured,
                   const std::string& detail) {
        rep.items.push_back(ValidationItem{name, pass, measured, detail});
        rep.pass = rep.pass && pass;
    };

    // gauge
    Matrix z_eff;
    if (!m.gauge_from_noise) {
        double defect = op_norm(Matrix(m.z - m.z.adjoint()));
        add("gauge-hermiticity", defect <= 1e-10 * (1.0 + op_norm(m.z)), defect,
            "norm of Z - Z's adjoint");
        z_eff = 0.5 * (m.z + m.z.adjoint());
    } else {
        add("gauge-hermiticity", true, 0.0, "weight derived from the noise family");
        if (m.has_noise) {
            z_eff = m.family().gauge().z();
        } else {
            z_eff = Matrix::Zero(m.n, m.n);
        }
    }

    if (m.style == CoefficientStyle::e_blocks) {
        double herm = (m.e - m.e.adjoint()).op_norm();
        add("coefficient-hermiticity", herm <= 1e-10 * (1.0 + m.e.op_norm()), herm,
            "norm of E - E's adjoint");
        Matrix v_sub = 0.5 * Matrix::Identity(m.n, m.n) + Complex(0.0, 1.0) * z_eff;
        double r = op_norm(Matrix(channel_embed(v_sub, m.d) * m.e.channel_flat()));
        add("contraction", r < 1.0, r, "channel norm of V E");
    } else if (m.style == CoefficientStyle::hp) {
        Matrix w_full(m.n * m.d, m.n * m.d);
        for (int i = 0; i < m.n; ++i)
            for (int j = 0; j < m.n; ++j)
                w_full.block(i * m.d, j * m.d, m.d, m.d) =
                    m.hp.w[static_cast<size_t>(i)][static_cast<size_t>(j)];
        double wu = op_norm(Matrix(w_full.adjoint() * w_full -
                                   Matrix::Identity(m.n * m.d, m.n * m.d)));
        add("hp-unitarity", wu <= 1e-10 * (1.0 + op_norm(w_full)), wu,
            "norm of W'W - 1");
        double hh = op_norm(Matrix(m.hp.h - m.hp.h.adjoint()));
        add("hamiltonian-hermiticity", hh <= 1e-10 * (1.0 + op_norm(m.hp.h)), hh,
            "norm of H - H's adjoint");
        UnitarityResiduals res = unitarity_residuals(ito_from_hp(m.hp));
        double worst = std::max(res.isometry, res.coisometry);
        add("ito-admissibility", worst <= 1e-8 * (1.0 + ito_from_hp(m.hp).op_norm()),
            worst, "worst admissibility residual of the assembled coefficients");
    } else {
        UnitarityResiduals res = unitarity_residuals(m.g);
        double worst = std::max(res.isometry, res.coisometry);
        add("ito-admissibility", worst <= 1e-8 * (1.0 + m.g.op_norm()), worst,
            "worst admissibility residual");
    }
    return rep;
}

}  // namespace qsc
