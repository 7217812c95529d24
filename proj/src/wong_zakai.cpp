#include "qsc/wong_zakai.hpp"

#include "qsc/errors.hpp"
#include "qsc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace qsc {

// ----- test profiles -----

TestFunction::TestFunction(int channels) : channels_(channels) {
    if (channels < 0) throw std::invalid_argument("TestFunction: negative channel count");
    segments_.resize(channels);
}

TestFunction TestFunction::zero(int channels) { return TestFunction(channels); }

TestFunction TestFunction::constant(int channels, const std::vector<Complex>& values,
                                    double t_max) {
    if (static_cast<int>(values.size()) != channels)
        throw std::invalid_argument("TestFunction::constant: one value per channel");
    if (!(t_max > 0.0))
        throw std::invalid_argument("TestFunction::constant: need t_max > 0");
    TestFunction f(channels);
    for (int i = 1; i <= channels; ++i)
        f.set_channel(i, {Segment{t_max, values[static_cast<size_t>(i - 1)]}});
    return f;
}

void TestFunction::set_channel(int i, std::vector<Segment> segments) {
    if (i < 1 || i > channels_)
        throw std::invalid_argument("TestFunction::set_channel: channel out of range");
    double prev = 0.0;
    for (const auto& s : segments) {
        if (!(s.t_end > prev))
            throw std::invalid_argument(
                "TestFunction::set_channel: segment ends must be positive and ascending");
        prev = s.t_end;
    }
    segments_[static_cast<size_t>(i - 1)] = std::move(segments);
}

Complex TestFunction::value(int alpha, double t) const {
    if (alpha == 0) return Complex(1.0, 0.0);
    if (alpha < 0 || alpha > channels_)
        throw std::invalid_argument("TestFunction::value: channel out of range");
    const auto& segs = segments_[static_cast<size_t>(alpha - 1)];
    if (t < 0.0) return Complex(0.0, 0.0);
    auto it = std::lower_bound(segs.begin(), segs.end(), t,
                               [](const Segment& s, double x) { return s.t_end < x; });
    if (it == segs.end()) return Complex(0.0, 0.0);
    return it->value;
}

const std::vector<Segment>& TestFunction::channel(int i) const {
    if (i < 1 || i > channels_)
        throw std::invalid_argument("TestFunction::channel: channel out of range");
    return segments_[static_cast<size_t>(i - 1)];
}

double TestFunction::t_max() const {
    double out = 0.0;
    for (const auto& segs : segments_)
        if (!segs.empty()) out = std::max(out, segs.back().t_end);
    return out;
}

Complex overlap_integral(const TestFunction& f, const TestFunction& g, double t) {
    if (f.channels() != g.channels())
        throw std::invalid_argument("overlap_integral: channel count mismatch");
    if (t < 0.0) throw std::invalid_argument("overlap_integral: need t >= 0");
    Complex total(0.0, 0.0);
    for (int i = 1; i <= f.channels(); ++i) {
        std::vector<double> cuts{0.0, t};
        for (const auto& s : f.channel(i))
            if (s.t_end > 0.0 && s.t_end < t) cuts.push_back(s.t_end);
        for (const auto& s : g.channel(i))
            if (s.t_end > 0.0 && s.t_end < t) cuts.push_back(s.t_end);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        for (size_t k = 0; k + 1 < cuts.size(); ++k) {
            double mid = 0.5 * (cuts[k] + cuts[k + 1]);
            total += std::conj(f.value(i, mid)) * g.value(i, mid) *
                     (cuts[k + 1] - cuts[k]);
        }
    }
    return total;
}

Complex exponential_overlap(const TestFunction& f, const TestFunction& g, double t) {
    return std::exp(overlap_integral(f, g, t));
}

// ----- model assembly -----

WZModel make_wz_model_with_gauge(const BlockMatrix& e, const CorrelationFamily& fam,
                                 const Gauge& gauge) {
    if (fam.channels != e.channels() || gauge.channels() != e.channels())
        throw std::invalid_argument("make_wz_model: channel count mismatch");
    double herm = (e - e.adjoint()).op_norm();
    if (herm > 1e-10 * (1.0 + e.op_norm()))
        throw std::invalid_argument("make_wz_model: coefficient matrix must be Hermitian");
    Conversion conv = strat_to_ito(Complex(0.0, -1.0) * e, gauge);
    if (!(conv.contraction < 1.0))
        throw NonContractiveError(
            "make_wz_model: channel norm of V E is " + std::to_string(conv.contraction) +
                " >= 1",
            conv.contraction);
    return WZModel{e, fam, gauge, std::move(conv)};
}

WZModel make_wz_model(const BlockMatrix& e, const CorrelationFamily& fam) {
    return make_wz_model_with_gauge(e, fam, fam.gauge());
}

Matrix contracted_generator(const BlockMatrix& g, const TestFunction& f,
                            const TestFunction& gfun, double t) {
    if (f.channels() != g.channels() || gfun.channels() != g.channels())
        throw std::invalid_argument("contracted_generator: channel count mismatch");
    Matrix out = Matrix::Zero(g.dim(), g.dim());
    for (int a = 0; a <= g.channels(); ++a) {
        Complex fa = std::conj(f.value(a, t));
        if (fa == Complex(0.0)) continue;
        for (int b = 0; b <= g.channels(); ++b) {
            Complex gb = gfun.value(b, t);
            if (gb == Complex(0.0)) continue;
            out += (fa * gb) * g.block(a, b);
        }
    }
    return out;
}

// ----- fixed-step integration with step halving -----

namespace {

template <class Deriv>
Matrix rk4_solve(const Matrix& y0, double t_final, int steps, const Deriv& d) {
    double h = t_final / steps;
    Matrix y = y0;
    for (int s = 0; s < steps; ++s) {
        double t0 = s * h;
        Matrix k1 = d(t0, y);
        Matrix k2 = d(t0 + 0.5 * h, Matrix(y + 0.5 * h * k1));
        Matrix k3 = d(t0 + 0.5 * h, Matrix(y + 0.5 * h * k2));
        Matrix k4 = d(t0 + h, Matrix(y + h * k3));
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return y;
}

template <class Deriv>
Matrix refine_rk4(const Matrix& y0, double t_final, double tol, const char* what,
                  const Deriv& d, int* steps_out, double* err_out) {
    int steps = 64;
    Matrix prev = rk4_solve(y0, t_final, steps, d);
    double diff = 0.0;
    while (steps <= (1 << 20)) {
        steps *= 2;
        Matrix cur = rk4_solve(y0, t_final, steps, d);
        diff = op_norm(cur - prev);
        if (diff <= tol * std::max(1.0, op_norm(cur))) {
            if (steps_out) *steps_out = steps;
            if (err_out) *err_out = diff;
            return cur;
        }
        prev = std::move(cur);
    }
    throw ConvergenceError(std::string(what) + ": step refinement stalled", diff);
}

// Interior profile cuts splitting [0, t_final] into smooth pieces.
std::vector<double> profile_cuts(const TestFunction& f, const TestFunction& g,
                                 double t_final) {
    std::vector<double> cuts{0.0, t_final};
    auto add = [&](const TestFunction& p) {
        for (int i = 1; i <= p.channels(); ++i)
            for (const auto& s : p.channel(i))
                if (s.t_end > 0.0 && s.t_end < t_final) cuts.push_back(s.t_end);
    };
    add(f);
    add(g);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

// Integrates across profile discontinuities piece by piece.  Sample times are
// clamped into each piece's half-open interior (a, b] so that upper-inclusive
// step profiles are read on the correct side of every cut; without the split,
// step halving loses its convergence order at the jumps and stalls.
template <class Deriv>
Matrix piecewise_rk4(Matrix y, const std::vector<double>& cuts, double tol,
                     const char* what, const Deriv& d, int* steps_out,
                     double* err_out) {
    int total_steps = 0;
    double total_err = 0.0;
    for (size_t k = 0; k + 1 < cuts.size(); ++k) {
        double a = cuts[k], b = cuts[k + 1];
        auto local = [&](double s, const Matrix& yy) -> Matrix {
            double t = a + s;
            double lo = std::nextafter(a, b);
            if (t < lo) t = lo;
            if (t > b) t = b;
            return d(t, yy);
        };
        int st = 0;
        double e = 0.0;
        y = refine_rk4(y, b - a, tol, what, local, &st, &e);
        total_steps += st;
        total_err += e;
    }
    if (steps_out) *steps_out = total_steps;
    if (err_out) *err_out = total_err;
    return y;
}

}  // namespace

ReducedPropagator reduced_propagator(const std::function<BlockMatrix(double)>& g_of_t,
                                     const TestFunction& f, const TestFunction& gfun,
                                     double t_final, double tol) {
    if (t_final < 0.0)
        throw std::invalid_argument("reduced_propagator: need t_final >= 0");
    BlockMatrix g0 = g_of_t(0.0);
    const int dim = g0.dim();
    ReducedPropagator out;
    if (t_final == 0.0) {
        out.k = Matrix::Identity(dim, dim);
        return out;
    }
    auto deriv = [&](double t, const Matrix& k) -> Matrix {
        return contracted_generator(g_of_t(t), f, gfun, t) * k;
    };
    out.k = piecewise_rk4(Matrix(Matrix::Identity(dim, dim)),
                          profile_cuts(f, gfun, t_final), tol, "reduced_propagator",
                          deriv, &out.steps, &out.est_error);
    return out;
}

ReducedPropagator reduced_propagator(const BlockMatrix& g, const TestFunction& f,
                                     const TestFunction& gfun, double t_final,
                                     double tol) {
    return reduced_propagator([&g](double) { return g; }, f, gfun, t_final, tol);
}

Matrix flow_propagator(const EHGenerator& gen, const TestFunction& f,
                       const TestFunction& gfun, const Matrix& x0, double t_final,
                       double tol) {
    if (t_final < 0.0) throw std::invalid_argument("flow_propagator: need t_final >= 0");
    if (f.channels() != gen.channels() || gfun.channels() != gen.channels())
        throw std::invalid_argument("flow_propagator: channel count mismatch");
    if (x0.rows() != gen.dim() || x0.cols() != gen.dim())
        throw std::invalid_argument("flow_propagator: observable dimension mismatch");
    if (t_final == 0.0) return x0;
    auto deriv = [&](double t, const Matrix& x) -> Matrix {
        Matrix out = Matrix::Zero(x.rows(), x.cols());
        for (int a = 0; a <= gen.channels(); ++a) {
            Complex fa = std::conj(f.value(a, t));
            if (fa == Complex(0.0)) continue;
            for (int b = 0; b <= gen.channels(); ++b) {
                Complex gb = gfun.value(b, t);
                if (gb == Complex(0.0)) continue;
                out += (fa * gb) * gen.apply(a, b, x);
            }
        }
        return out;
    };
    return piecewise_rk4(x0, profile_cuts(f, gfun, t_final), tol, "flow_propagator",
                         deriv, nullptr, nullptr);
}

// ----- pre-limit vacuum elements -----

PrelimitElement prelimit_vacuum_element(const WZModel& m, double lambda, double t,
                                        int order, const QuadraturePlan& plan) {
    if (order < 0 || order > 6)
        throw std::invalid_argument("prelimit_vacuum_element: need 0 <= order <= 6");
    if (!(lambda > 0.0) || !(t > 0.0))
        throw std::invalid_argument(
            "prelimit_vacuum_element: need lambda > 0 and t > 0");
    const int d = m.e.dim();
    PrelimitElement out;
    out.prelimit = Matrix::Identity(d, d);
    out.limit_truncated = Matrix::Identity(d, d);
    double var = 0.0;
    std::uint64_t counter = 0;
    for (int n = 1; n <= order; ++n) {
        for (const Diagram& dg : enumerate_vacuum_diagrams(n)) {
            out.limit_truncated += tc_limit_value(dg, m.e, m.gauge, t).total();
            QuadraturePlan local = plan;
            local.seed = plan.seed + 1000003u * (++counter);
            PrelimitValue pv = prelimit_diagram_value(dg, m.e, m.fam, lambda, t, local);
            out.prelimit += pv.value;
            var += pv.std_error * pv.std_error;
            out.evals += pv.evals;
        }
    }
    out.std_error = std::sqrt(var);
    return out;
}

// ----- coherent-state coefficient modification -----

std::vector<Complex> smeared_channel(const CorrelationFamily& fam,
                                     const TestFunction& g, double t, double lambda,
                                     bool causal) {
    if (g.channels() != fam.channels)
        throw std::invalid_argument("smeared_channel: channel count mismatch");
    if (!(lambda > 0.0)) throw std::invalid_argument("smeared_channel: need lambda > 0");
    std::vector<Complex> out(static_cast<size_t>(fam.channels), Complex(0.0, 0.0));
    for (int i = 1; i <= fam.channels; ++i) {
        const auto& segs = g.channel(i);
        if (segs.empty()) continue;
        double lo = std::max(0.0, t - 60.0 * lambda);
        double hi = std::min(segs.back().t_end, causal ? t : t + 60.0 * lambda);
        if (!(hi > lo)) continue;
        std::vector<double> cuts{lo, hi};
        for (const auto& s : segs)
            if (s.t_end > lo && s.t_end < hi) cuts.push_back(s.t_end);
        if (t > lo && t < hi) cuts.push_back(t);  // kernel kink
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        Complex acc(0.0, 0.0);
        for (size_t k = 0; k + 1 < cuts.size(); ++k) {
            double a = cuts[k], b = cuts[k + 1];
            Complex v = g.value(i, 0.5 * (a + b));
            if (v == Complex(0.0)) continue;
            auto kernel = [&](double s) { return fam.scalar(t - s, lambda); };
            acc += v * integrate(kernel, a, b, 1e-12).value;
        }
        out[static_cast<size_t>(i - 1)] = acc;
    }
    return out;
}

BlockMatrix coherent_modified_e(const WZModel& m, const TestFunction& f,
                                const TestFunction& gfun, double t, double lambda,
                                bool causal) {
    const int nch = m.e.channels();
    if (f.channels() != nch || gfun.channels() != nch)
        throw std::invalid_argument("coherent_modified_e: channel count mismatch");
    std::vector<Complex> gamma = smeared_channel(m.fam, gfun, t, lambda, causal);
    std::vector<Complex> beta_conj = smeared_channel(m.fam, f, t, lambda, causal);
    for (auto& b : beta_conj) b = std::conj(b);

    BlockMatrix out = m.e;
    // emission column: E_i0 + sum_j E_ij gamma_j
    for (int i = 1; i <= nch; ++i) {
        Matrix blk = out.block(i, 0);
        for (int j = 1; j <= nch; ++j)
            blk += gamma[static_cast<size_t>(j - 1)] * m.e.block(i, j);
        out.set_block(i, 0, blk);
    }
    // absorption row: E_0j + sum_k beta_k^* E_kj
    for (int j = 1; j <= nch; ++j) {
        Matrix blk = out.block(0, j);
        for (int k = 1; k <= nch; ++k)
            blk += beta_conj[static_cast<size_t>(k - 1)] * m.e.block(k, j);
        out.set_block(0, j, blk);
    }
    // scalar block picks up both smearings and their cross term
    Matrix b00 = out.block(0, 0);
    for (int i = 1; i <= nch; ++i)
        b00 += beta_conj[static_cast<size_t>(i - 1)] * m.e.block(i, 0);
    for (int j = 1; j <= nch; ++j)
        b00 += gamma[static_cast<size_t>(j - 1)] * m.e.block(0, j);
    for (int i = 1; i <= nch; ++i)
        for (int j = 1; j <= nch; ++j)
            b00 += beta_conj[static_cast<size_t>(i - 1)] *
                   gamma[static_cast<size_t>(j - 1)] * m.e.block(i, j);
    out.set_block(0, 0, b00);
    return out;
}

// ----- convergence sweeps -----

SweepResult convergence_sweep(const WZModel& m, double t,
                              const std::vector<double>& lambdas, int order,
                              const QuadraturePlan& plan) {
    SweepResult out;
    std::vector<double> grid = lambdas;
    std::sort(grid.begin(), grid.end(), std::greater<double>());
    for (double lambda : grid) {
        SweepRow row;
        row.lambda = lambda;
        row.order = order;
        try {
            PrelimitElement pe = prelimit_vacuum_element(m, lambda, t, order, plan);
            row.prelimit = pe.prelimit;
            row.limit_truncated = pe.limit_truncated;
            row.std_error = pe.std_error;
            row.err_abs = op_norm(pe.prelimit - pe.limit_truncated);
            double ref = op_norm(pe.limit_truncated);
            row.err_rel = ref > 0.0 ? row.err_abs / ref : row.err_abs;
        } catch (const std::exception& ex) {
            row.ok = false;
            row.message = ex.what();
        }
        out.rows.push_back(std::move(row));
    }
    // fitted rate: least-squares slope of log err against log lambda
    std::vector<double> xs, ys;
    bool all_ok = !out.rows.empty();
    for (const auto& row : out.rows) {
        all_ok = all_ok && row.ok;
        if (row.ok && row.err_abs > 0.0) {
            xs.push_back(std::log(row.lambda));
            ys.push_back(std::log(row.err_abs));
        }
    }
    if (xs.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (size_t k = 0; k < xs.size(); ++k) {
            mx += xs[k];
            my += ys[k];
        }
        mx /= xs.size();
        my /= ys.size();
        double sxx = 0.0, sxy = 0.0;
        for (size_t k = 0; k < xs.size(); ++k) {
            sxx += (xs[k] - mx) * (xs[k] - mx);
            sxy += (xs[k] - mx) * (ys[k] - my);
        }
        out.fit_rate = sxx > 0.0 ? sxy / sxx : 0.0;
    }
    out.monotone = all_ok && out.rows.size() >= 2;
    for (size_t k = 0; k + 1 < out.rows.size() && out.monotone; ++k) {
        double a = out.rows[k].err_abs, b = out.rows[k + 1].err_abs;
        if (!(b < a || (a == 0.0 && b == 0.0))) out.monotone = false;
    }
    return out;
}

// ----- worked models -----

namespace {

void require_hermitian(const Matrix& h, const char* what) {
    if (h.rows() != h.cols())
        throw std::invalid_argument(std::string(what) + ": matrix must be square");
    if (op_norm(Matrix(h - h.adjoint())) > 1e-10 * (1.0 + op_norm(h)))
        throw std::invalid_argument(std::string(what) + ": matrix must be Hermitian");
}

CorrelationFamily family_from_kappa(Complex kappa, const char* what) {
    if (std::abs(kappa.real() - 0.5) > 1e-9)
        throw std::invalid_argument(std::string(what) +
                                    ": one-sided weight must have real part 1/2");
    double omega = 2.0 * kappa.imag();
    CorrelationFamily fam;
    fam.channels = 1;
    if (std::abs(omega) <= 1e-14) {
        fam.kind = NoiseKind::ou;
        fam.omega = 0.0;
    } else {
        fam.kind = NoiseKind::ou_modulated;
        fam.omega = omega;
    }
    return fam;
}

}  // namespace

WZModel build_diffusion_model(const Matrix& r, const Matrix& h, Complex kappa) {
    require_hermitian(h, "build_diffusion_model");
    if (r.rows() != h.rows() || r.cols() != h.cols())
        throw std::invalid_argument("build_diffusion_model: R and H dimension mismatch");
    CorrelationFamily fam = family_from_kappa(kappa, "build_diffusion_model");
    const int d = static_cast<int>(h.rows());
    BlockMatrix e(1, d);
    e.set_block(0, 0, h);
    e.set_block(1, 0, r);
    e.set_block(0, 1, r.adjoint());
    return make_wz_model(e, fam);
}

Matrix diffusion_h_prime(const Matrix& r, const Matrix& h, Complex kappa) {
    require_hermitian(h, "diffusion_h_prime");
    return h + kappa.imag() * (r.adjoint() * r);
}

BlockMatrix CountingModel::coefficients(double t) const {
    const int d = static_cast<int>(e.rows());
    Complex f0 = profile.value(1, t);
    BlockMatrix out(1, d);
    out.set_block(0, 0, Matrix(std::norm(f0) * e));
    out.set_block(0, 1, Matrix(std::conj(f0) * e));
    out.set_block(1, 0, Matrix(f0 * e));
    out.set_block(1, 1, e);
    return out;
}

BlockMatrix CountingModel::generator(double t) const {
    const int d = static_cast<int>(e.rows());
    Complex f0 = profile.value(1, t);
    BlockMatrix out(1, d);
    out.set_block(0, 0, Matrix(std::norm(f0) * core));
    out.set_block(0, 1, Matrix(std::conj(f0) * core));
    out.set_block(1, 0, Matrix(f0 * core));
    out.set_block(1, 1, core);
    return out;
}

std::function<BlockMatrix(double)> CountingModel::generator_fn() const {
    return [self = *this](double t) { return self.generator(t); };
}

CountingModel build_counting_model(const Matrix& e_op, const TestFunction& profile,
                                   Complex kappa) {
    require_hermitian(e_op, "build_counting_model");
    if (profile.channels() != 1)
        throw std::invalid_argument("build_counting_model: profile must have one channel");
    const int d = static_cast<int>(e_op.rows());
    Matrix a = Matrix::Identity(d, d) + Complex(0.0, 1.0) * kappa * e_op;
    Matrix core = Complex(0.0, -1.0) * e_op *
                  guarded_inverse(a, 1e-12, "build_counting_model");
    return CountingModel{e_op, profile, kappa, std::move(core)};
}

}  // namespace qsc
