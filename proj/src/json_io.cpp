#include "qsc/json_io.hpp"

#include "qsc/version.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qsc {

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const Matrix& m) {
    Json rows = Json::array();
    for (int r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json to_json(const BlockMatrix& b) {
    Json blocks = Json::array();
    for (int a = 0; a <= b.channels(); ++a) {
        Json row = Json::array();
        for (int c = 0; c <= b.channels(); ++c) row.push_back(to_json(b.block(a, c)));
        blocks.push_back(std::move(row));
    }
    return Json{{"channels", b.channels()}, {"dim", b.dim()}, {"blocks", std::move(blocks)}};
}

Json to_json(const Conversion& c) {
    return Json{{"ito", to_json(c.ito)},
                {"strat", to_json(c.strat)},
                {"t", to_json(c.t_mat)},
                {"f", to_json(c.f_mat)},
                {"z", to_json(Matrix(c.gauge.z()))},
                {"rcond", c.rcond},
                {"contraction", c.contraction}};
}

Json to_json(const OpticalReport& r) {
    return Json{{"herm_defect", r.herm_defect},
                {"ff_defect", r.ff_defect},
                {"min_re_eig", r.min_re_eig},
                {"im_defect", r.im_defect},
                {"scale", r.scale}};
}

Json to_json(const UnitarityResiduals& r) {
    return Json{{"isometry", r.isometry}, {"coisometry", r.coisometry}};
}

Json to_json(const HPExtraction& x) {
    Json w = Json::array();
    for (const auto& row : x.params.w) {
        Json jrow = Json::array();
        for (const auto& blk : row) jrow.push_back(to_json(blk));
        w.push_back(std::move(jrow));
    }
    Json l = Json::array();
    for (const auto& blk : x.params.l) l.push_back(to_json(blk));
    return Json{{"w", std::move(w)},
                {"l", std::move(l)},
                {"h", to_json(x.params.h)},
                {"h_defect", x.h_defect},
                {"residuals", to_json(x.residuals)}};
}

Json to_json(const ValidationReport& rep) {
    Json items = Json::array();
    for (const auto& item : rep.items)
        items.push_back(Json{{"name", item.name},
                             {"pass", item.pass},
                             {"measured", item.measured},
                             {"detail", item.detail}});
    return Json{{"pass", rep.pass}, {"items", std::move(items)}};
}

Json to_json(const SweepRow& row) {
    return Json{{"lambda", row.lambda},
                {"order", row.order},
                {"err_abs", row.err_abs},
                {"err_rel", row.err_rel},
                {"std_error", row.std_error},
                {"ok", row.ok},
                {"message", row.message},
                {"prelimit", to_json(row.prelimit)},
                {"limit_truncated", to_json(row.limit_truncated)}};
}

Json to_json(const SweepResult& s) {
    Json rows = Json::array();
    for (const auto& row : s.rows) rows.push_back(to_json(row));
    return Json{{"fit_rate", s.fit_rate}, {"monotone", s.monotone},
                {"rows", std::move(rows)}};
}

Json to_json(const PrelimitElement& p) {
    return Json{{"prelimit", to_json(p.prelimit)},
                {"limit_truncated", to_json(p.limit_truncated)},
                {"std_error", p.std_error},
                {"evals", p.evals}};
}

Json to_json(const SeriesSum& s) {
    return Json{{"value", to_json(s.value)},
                {"box", to_json(s.box)},
                {"tail_bound", s.tail_bound},
                {"contraction", s.contraction},
                {"chain_terms", s.chain_terms}};
}

Json to_json(const ReducedPropagator& k) {
    return Json{{"k", to_json(k.k)}, {"steps", k.steps}, {"est_error", k.est_error}};
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex_digest(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

Json to_json(const RunReport& r) {
    return Json{{"schema_version", schema_version},
                {"tool_version", version},
                {"subcommand", r.subcommand},
                {"input_digest", r.input_digest},
                {"seed", r.seed},
                {"results", r.results}};
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_json_file: cannot open " + path);
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write_json_file: write failed for " + path);
}

}  // namespace qsc
