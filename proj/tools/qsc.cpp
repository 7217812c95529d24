// qsc: command-line front end. Subcommands: convert, check, flow, diagrams,
// simulate, sweep. Reads .qsc model files, prints result JSON on stdout, and
// optionally writes a full run report with --out. Exit codes: 0 success,
// 1 validation failure, 2 numerical non-convergence, 3 parse error.
#include "qsc/errors.hpp"
#include "qsc/json_io.hpp"
#include "qsc/modelspec.hpp"
#include "qsc/version.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <random>
#include <string>
#include <vector>

namespace {

using namespace qsc;

// ----- logging (stderr only; levels via QSC_LOG) -----

int log_level() {
    static int level = [] {
        const char* env = std::getenv("QSC_LOG");
        std::string s = env ? env : "warn";
        if (s == "error") return 0;
        if (s == "warn") return 1;
        if (s == "info") return 2;
        if (s == "debug") return 3;
        return 1;
    }();
    return level;
}

void logmsg(int level, const std::string& msg) {
    static const char* names[] = {"error", "warn", "info", "debug"};
    if (level <= log_level())
        std::fprintf(stderr, "qsc [%s] %s\n", names[level], msg.c_str());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(ParseErrorKind::io, 0, 0, "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw ParseError(ParseErrorKind::io, 0, 0, "cannot read file: " + path);
    return ss.str();
}

// ----- model assembly shared by subcommands -----

struct LoadedModel {
    ModelSpec spec;
    std::string digest;
};

LoadedModel load_model(const std::string& path, bool lenient) {
    std::string text = read_file(path);
    LoadedModel out;
    out.spec = parse_model(text, lenient);
    out.digest = hex_digest(fnv1a64(text));
    return out;
}

BlockMatrix assembled_ito(const ModelSpec& m) {
    switch (m.style) {
        case CoefficientStyle::e_blocks:
            return strat_to_ito(Complex(0.0, -1.0) * m.e, m.gauge()).ito;
        case CoefficientStyle::hp:
            return ito_from_hp(m.hp);
        case CoefficientStyle::raw_g:
            return m.g;
    }
    throw std::logic_error("assembled_ito: unreachable");
}

Conversion model_conversion(const ModelSpec& m) {
    if (m.style == CoefficientStyle::e_blocks)
        return strat_to_ito(Complex(0.0, -1.0) * m.e, m.gauge());
    return ito_to_strat(assembled_ito(m), m.gauge());
}

void emit(const Json& results, const std::string& subcommand,
          const std::string& digest, std::uint64_t seed, const std::string& out_path,
          bool compact_stdout = false) {
    if (compact_stdout)
        std::cout << results.dump() << "\n";
    else
        std::cout << results.dump(2) << "\n";
    if (!out_path.empty()) {
        RunReport report;
        report.subcommand = subcommand;
        report.input_digest = digest;
        report.seed = seed;
        report.results = results;
        write_json_file(out_path, to_json(report));
        logmsg(2, "wrote report to " + out_path);
    }
}

int fail_validation(const ValidationReport& rep, const std::string& subcommand,
                    const std::string& digest, std::uint64_t seed,
                    const std::string& out_path) {
    for (const auto& item : rep.items)
        if (!item.pass)
            logmsg(0, "validation failed: " + item.name + " (measured " +
                          std::to_string(item.measured) + ")");
    emit(Json{{"validation", to_json(rep)}}, subcommand, digest, seed, out_path);
    return 1;
}

// ----- subcommands -----

int run_convert(const std::string& model_path, const std::string& direction,
                bool lenient, std::uint64_t seed, const std::string& out_path) {
    LoadedModel lm = load_model(model_path, lenient);
    ValidationReport rep = validate_model(lm.spec);
    if (!rep.pass) return fail_validation(rep, "convert", lm.digest, seed, out_path);

    Conversion conv;
    if (direction == "strat-to-ito") {
        if (lm.spec.style == CoefficientStyle::e_blocks)
            conv = strat_to_ito(Complex(0.0, -1.0) * lm.spec.e, lm.spec.gauge());
        else
            conv = ito_to_strat(assembled_ito(lm.spec), lm.spec.gauge());
    } else {
        conv = ito_to_strat(assembled_ito(lm.spec), lm.spec.gauge());
    }
    // round-trip residual as a self-diagnostic
    Conversion back = ito_to_strat(conv.ito, conv.gauge);
    double rt = (back.strat - conv.strat).op_norm();
    Json results{{"direction", direction},
                 {"validation", to_json(rep)},
                 {"conversion", to_json(conv)},
                 {"roundtrip_residual", rt}};
    emit(results, "convert", lm.digest, seed, out_path);
    return 0;
}

int run_check(const std::string& model_path, bool lenient, std::uint64_t seed,
              const std::string& out_path) {
    LoadedModel lm = load_model(model_path, lenient);
    ValidationReport rep = validate_model(lm.spec);
    if (!rep.pass) return fail_validation(rep, "check", lm.digest, seed, out_path);

    const ModelSpec& m = lm.spec;
    BlockMatrix ito = assembled_ito(m);
    UnitarityResiduals res = unitarity_residuals(ito);
    Json unitarity{{"residuals", to_json(res)}};
    try {
        HPExtraction hp = hp_from_ito(ito);
        unitarity["h_defect"] = hp.h_defect;
    } catch (const std::exception& ex) {
        unitarity["h_defect"] = nullptr;
        logmsg(1, std::string("scattering extraction skipped: ") + ex.what());
    }

    Json optical = nullptr;
    try {
        Conversion conv = model_conversion(m);
        Conversion forward = m.style == CoefficientStyle::e_blocks
                                 ? conv
                                 : strat_to_ito(conv.strat, m.gauge());
        optical = to_json(optical_check(forward));
    } catch (const std::exception& ex) {
        logmsg(1, std::string("optical check skipped: ") + ex.what());
    }

    // generator consistency on a seeded random Hermitian observable
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix x(m.d, m.d);
    for (int r = 0; r < m.d; ++r)
        for (int c = 0; c < m.d; ++c) x(r, c) = Complex(gauss(rng), gauss(rng));
    x = 0.5 * (x + x.adjoint()).eval();

    Json eh = Json::object();
    double worst_pair = 0.0, worst_diss = 0.0;
    try {
        EHGenerator direct = EHGenerator::from_ito(ito);
        Conversion conv = model_conversion(m);
        EHGenerator transfer = EHGenerator::from_hamiltonian(conv.strat, m.gauge());
        for (int a = 0; a <= m.n; ++a)
            for (int b = 0; b <= m.n; ++b) {
                double dv = op_norm(
                    Matrix(direct.apply(a, b, x) - transfer.apply(a, b, x)));
                worst_pair = std::max(worst_pair, dv);
                worst_diss = std::max(worst_diss, dissipation_residual(direct, a, b, x, x));
            }
        eh["sandwich_vs_transfer"] = worst_pair;
        eh["dissipation"] = worst_diss;
    } catch (const std::exception& ex) {
        eh["error"] = ex.what();
        logmsg(1, std::string("generator comparison skipped: ") + ex.what());
    }

    Json results{{"validation", to_json(rep)},
                 {"unitarity", std::move(unitarity)},
                 {"optical", std::move(optical)},
                 {"eh", std::move(eh)}};
    emit(results, "check", lm.digest, seed, out_path);
    return 0;
}

int run_flow(const std::string& model_path, const std::string& observable_path,
             int alpha, int beta, bool lenient, std::uint64_t seed,
             const std::string& out_path) {
    LoadedModel lm = load_model(model_path, lenient);
    ValidationReport rep = validate_model(lm.spec);
    if (!rep.pass) return fail_validation(rep, "flow", lm.digest, seed, out_path);

    Matrix x = parse_matrix_literal(read_file(observable_path));
    if (x.rows() != lm.spec.d || x.cols() != lm.spec.d)
        throw std::invalid_argument("flow: observable must be d x d");

    EHGenerator gen = EHGenerator::from_ito(assembled_ito(lm.spec));
    Json results;
    if (alpha >= 0 && beta >= 0) {
        if (alpha > lm.spec.n || beta > lm.spec.n)
            throw std::invalid_argument("flow: block index exceeds N");
        results = Json{{"alpha", alpha},
                       {"beta", beta},
                       {"value", to_json(gen.apply(alpha, beta, x))}};
    } else {
        Json blocks = Json::array();
        for (int a = 0; a <= lm.spec.n; ++a) {
            Json row = Json::array();
            for (int b = 0; b <= lm.spec.n; ++b)
                row.push_back(to_json(gen.apply(a, b, x)));
            blocks.push_back(std::move(row));
        }
        results = Json{{"blocks", std::move(blocks)}};
    }
    emit(results, "flow", lm.digest, seed, out_path);
    return 0;
}

int run_diagrams(const std::string& model_path, int n, const std::string& mode,
                 double lambda, double t_opt, int order_opt, bool lenient,
                 std::uint64_t seed, const std::string& out_path) {
    if (mode == "count") {
        Json results{{"n", n}, {"count", bell_number(n)}};
        emit(results, "diagrams", "", seed, out_path, true);
        return 0;
    }
    if (model_path.empty())
        throw std::invalid_argument("diagrams: --model is required for mode " + mode);
    LoadedModel lm = load_model(model_path, lenient);
    ValidationReport rep = validate_model(lm.spec);
    if (!rep.pass) return fail_validation(rep, "diagrams", lm.digest, seed, out_path);
    if (lm.spec.style != CoefficientStyle::e_blocks)
        throw std::invalid_argument("diagrams: mode " + mode + " needs an [E] model");

    const ModelSpec& m = lm.spec;
    double t = t_opt > 0.0 ? t_opt : (m.has_sim ? m.t : 1.0);
    Json results;
    if (mode == "tc-sum") {
        int order = order_opt >= 0 ? order_opt : m.order;
        SeriesSum sum = vacuum_series_sum(m.e, m.gauge(), t, order);
        results = Json{{"t", t}, {"order", order}, {"series", to_json(sum)}};
    } else if (mode == "prelimit") {
        if (!(lambda > 0.0))
            throw std::invalid_argument("diagrams: --lambda must be positive");
        if (!m.has_noise)
            throw std::invalid_argument("diagrams: prelimit mode needs a [noise] section");
        WZModel wz = make_wz_model_with_gauge(m.e, m.family(), m.gauge());
        QuadraturePlan plan;
        plan.seed = seed;
        PrelimitElement pe = prelimit_vacuum_element(wz, lambda, t, n, plan);
        results = Json{{"n", n}, {"lambda", lambda}, {"t", t},
                       {"element", to_json(pe)}};
    } else if (mode == "bounds") {
        Gauge gauge = m.gauge();
        double e_max = m.e.op_norm();
        double v_max = gauge.v_norm();
        double contraction =
            op_norm(Matrix((promote(gauge.v(), m.d) * m.e).channel_flat()));
        Json pule = Json::array();
        for (int n2 = 0; 2 * n2 <= n; ++n2)
            pule.push_back(Json{{"n2", n2}, {"bound", pule_bound(e_max, v_max, t, n2)}});
        Json xi = nullptr;
        if (contraction < 1.0)
            xi = xi_bound(contraction, e_max * std::max(t, 1.0));
        results = Json{{"n", n},
                       {"t", t},
                       {"e_norm", e_max},
                       {"contraction", contraction},
                       {"pule", std::move(pule)},
                       {"xi", std::move(xi)}};
    } else {
        throw std::invalid_argument("diagrams: unknown mode '" + mode + "'");
    }
    emit(results, "diagrams", lm.digest, seed, out_path);
    return 0;
}

int run_simulate(const std::string& model_path, bool lenient, std::uint64_t seed,
                 const std::string& out_path) {
    LoadedModel lm = load_model(model_path, lenient);
    ValidationReport rep = validate_model(lm.spec);
    if (!rep.pass) return fail_validation(rep, "simulate", lm.digest, seed, out_path);

    const ModelSpec& m = lm.spec;
    if (!m.has_sim)
        throw std::invalid_argument("simulate: model needs a [sim] section");
    BlockMatrix ito = assembled_ito(m);
    TestFunction f = m.f_function(), g = m.g_function();
    ReducedPropagator k = reduced_propagator(ito, f, g, m.t);
    Complex overlap = exponential_overlap(f, g, m.t);
    Json results{{"t", m.t},
                 {"propagator", to_json(k)},
                 {"overlap", to_json(overlap)},
                 {"element_scaled", to_json(Matrix(overlap * k.k))}};
    emit(results, "simulate", lm.digest, seed, out_path);
    return 0;
}

int run_sweep(const std::string& model_path, const std::string& csv_path, bool lenient,
              std::uint64_t seed, const std::string& out_path) {
    LoadedModel lm = load_model(model_path, lenient);
    ValidationReport rep = validate_model(lm.spec);
    if (!rep.pass) return fail_validation(rep, "sweep", lm.digest, seed, out_path);

    const ModelSpec& m = lm.spec;
    if (m.style != CoefficientStyle::e_blocks)
        throw std::invalid_argument("sweep: needs an [E] model");
    if (!m.has_noise) throw std::invalid_argument("sweep: model needs a [noise] section");
    if (!m.has_sim || m.lambdas.empty())
        throw std::invalid_argument("sweep: model needs a [sim] section with lambda");

    WZModel wz = make_wz_model_with_gauge(m.e, m.family(), m.gauge());
    QuadraturePlan plan;
    plan.seed = seed;
    auto t0 = std::chrono::steady_clock::now();
    SweepResult sweep = convergence_sweep(wz, m.t, m.lambdas, m.order, plan);
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    logmsg(2, "sweep finished in " + std::to_string(ms) + " ms");

    if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        if (!csv) throw std::runtime_error("sweep: cannot open " + csv_path);
        csv << "lambda,order,err_abs,err_rel,fit_rate\n";
        char buf[128];
        for (const auto& row : sweep.rows) {
            std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%.17g\n", row.lambda,
                          row.order, row.err_abs, row.err_rel, sweep.fit_rate);
            csv << buf;
        }
        logmsg(2, "wrote CSV to " + csv_path);
    }
    emit(to_json(sweep), "sweep", lm.digest, seed, out_path);
    for (const auto& row : sweep.rows)
        if (!row.ok) return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum stochastic calculus toolbox"};
    app.require_subcommand(1);

    std::string out_path, model_path, direction = "strat-to-ito";
    std::string observable_path, mode = "count", csv_path;
    std::uint64_t seed = 0;
    bool lenient = false;
    int n = 1, alpha = -1, beta = -1, order_opt = -1;
    double lambda = 0.0, t_opt = 0.0;

    app.add_option("--out", out_path, "write a full run report to this JSON file");
    app.add_option("--seed", seed, "random seed recorded in reports")
        ->default_val("0");
    app.add_flag("--lenient", lenient, "ignore unknown keys in model files");

    auto* conv = app.add_subcommand("convert", "convert between coefficient pictures");
    conv->add_option("model", model_path, "model file (.qsc)")->required();
    conv->add_option("--direction", direction,
                     "strat-to-ito (default) or ito-to-strat")
        ->check(CLI::IsMember({"strat-to-ito", "ito-to-strat"}));
    conv->fallthrough();

    auto* check = app.add_subcommand("check", "validation, unitarity, and generator report");
    check->add_option("model", model_path, "model file (.qsc)")->required();
    check->fallthrough();

    auto* flow = app.add_subcommand("flow", "apply the flow generator to an observable");
    flow->add_option("model", model_path, "model file (.qsc)")->required();
    flow->add_option("--observable", observable_path, "file with a matrix literal")
        ->required();
    flow->add_option("--alpha", alpha, "row index (with --beta: emit one block)");
    flow->add_option("--beta", beta, "column index");
    flow->fallthrough();

    auto* diagrams = app.add_subcommand("diagrams", "diagram counts, sums, and bounds");
    diagrams->add_option("--n", n, "vertex count")->required();
    diagrams->add_option("--mode", mode, "count | tc-sum | prelimit | bounds")
        ->check(CLI::IsMember({"count", "tc-sum", "prelimit", "bounds"}));
    diagrams->add_option("--model", model_path, "model file (modes beyond count)");
    diagrams->add_option("--lambda", lambda, "correlation time (prelimit mode)");
    diagrams->add_option("--t", t_opt, "time horizon override");
    diagrams->add_option("--order", order_opt, "series order (tc-sum mode)");
    diagrams->fallthrough();

    auto* simulate = app.add_subcommand("simulate", "reduced propagator matrix elements");
    simulate->add_option("model", model_path, "model file (.qsc)")->required();
    simulate->fallthrough();

    auto* sweep = app.add_subcommand("sweep", "lambda-convergence sweep");
    sweep->add_option("model", model_path, "model file (.qsc)")->required();
    sweep->add_option("--csv", csv_path, "write lambda,order,err_abs,err_rel,fit_rate");
    sweep->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        auto t0 = std::chrono::steady_clock::now();
        int code = 1;
        if (conv->parsed())
            code = run_convert(model_path, direction, lenient, seed, out_path);
        else if (check->parsed())
            code = run_check(model_path, lenient, seed, out_path);
        else if (flow->parsed())
            code = run_flow(model_path, observable_path, alpha, beta, lenient, seed,
                            out_path);
        else if (diagrams->parsed())
            code = run_diagrams(model_path, n, mode, lambda, t_opt, order_opt, lenient,
                                seed, out_path);
        else if (simulate->parsed())
            code = run_simulate(model_path, lenient, seed, out_path);
        else if (sweep->parsed())
            code = run_sweep(model_path, csv_path, lenient, seed, out_path);
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
        logmsg(2, "total " + std::to_string(ms) + " ms");
        return code;
    } catch (const ParseError& ex) {
        std::fprintf(stderr, "%s\n", ex.what());
        return 3;
    } catch (const ConvergenceError& ex) {
        logmsg(0, ex.what());
        return 2;
    } catch (const SingularMatrixError& ex) {
        logmsg(0, ex.what());
        return 2;
    } catch (const NonContractiveError& ex) {
        logmsg(0, ex.what());
        return 1;
    } catch (const std::exception& ex) {
        logmsg(0, ex.what());
        return 1;
    }
}
