// Colored-noise-to-white-noise limit machinery: reduced propagators between
// exponential vectors, pre-limit vacuum elements from the diagram engine,
// coherent-state coefficient modification, and lambda-convergence sweeps.
#pragma once

#include "qsc/block_matrix.hpp"
#include "qsc/conversion.hpp"
#include "qsc/diagrams.hpp"
#include "qsc/evans_hudson.hpp"
#include "qsc/noise.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qsc {

// One piece of a piecewise-constant profile: `value` holds on the interval
// ending at `t_end` (and starting where the previous segment ended).
struct Segment {
    double t_end = 0.0;
    Complex value{0.0, 0.0};
};

// Per-channel piecewise-constant test profile on [0, t_max]. Channel 0 is the
// implicit constant 1; channels 1..N hold segments with ascending end times.
// Outside its segments a channel evaluates to 0.
class TestFunction {
public:
    explicit TestFunction(int channels);  // all channels identically zero
    static TestFunction zero(int channels);
    static TestFunction constant(int channels, const std::vector<Complex>& values,
                                 double t_max);

    void set_channel(int i, std::vector<Segment> segments);  // i in 1..channels
    Complex value(int alpha, double t) const;                // alpha = 0 gives 1
    const std::vector<Segment>& channel(int i) const;        // i in 1..channels
    int channels() const { return channels_; }
    double t_max() const;

private:
    int channels_ = 0;
    std::vector<std::vector<Segment>> segments_;
};

// Integral over [0, t] of sum_{i>=1} f_i^* g_i, and its exponential (the
// normalization factor carried by exponential-vector matrix elements).
Complex overlap_integral(const TestFunction& f, const TestFunction& g, double t);
Complex exponential_overlap(const TestFunction& f, const TestFunction& g, double t);

// A coefficient matrix E (Hermitian as a flat matrix) together with the
// correlation family driving it, the gauge, and the derived picture pair.
struct WZModel {
    BlockMatrix e;
    CorrelationFamily fam;
    Gauge gauge;
    Conversion conv;  // conversion of -iE under `gauge`
};

// Builds the model with the gauge implied by the family's one-sided weight.
// Requires E Hermitian and channel contraction ||V E|| < 1.
WZModel make_wz_model(const BlockMatrix& e, const CorrelationFamily& fam);
// Same, but with an explicitly chosen (possibly mismatched) gauge.
WZModel make_wz_model_with_gauge(const BlockMatrix& e, const CorrelationFamily& fam,
                                 const Gauge& gauge);

// sum_{ab} f_a^*(t) G_ab g_b(t) as a dim x dim matrix.
Matrix contracted_generator(const BlockMatrix& g, const TestFunction& f,
                            const TestFunction& gfun, double t);

// Initial-space propagator K with dK/dt = [sum_ab f_a^*(t) G_ab(t) g_b(t)] K,
// K(0) = 1. The full matrix element is <u|K(T)|v> times exponential_overlap.
// Classic 4th-order fixed-step integration with step halving until successive
// solutions agree to `tol` (relative); throws ConvergenceError if stalled.
struct ReducedPropagator {
    Matrix k;
    int steps = 0;
    double est_error = 0.0;
};
ReducedPropagator reduced_propagator(const std::function<BlockMatrix(double)>& g_of_t,
                                     const TestFunction& f, const TestFunction& gfun,
                                     double t_final, double tol = 1e-10);
ReducedPropagator reduced_propagator(const BlockMatrix& g, const TestFunction& f,
                                     const TestFunction& gfun, double t_final,
                                     double tol = 1e-10);

// Heisenberg-side propagator: integrates dX/dt = sum_ab f_a^*(t) L_ab(X) g_b(t)
// from X(0) = x0. For f = g and a unitary-admissible generator, x0 = 1 is a
// fixed point (the propagator preserves the identity).
Matrix flow_propagator(const EHGenerator& gen, const TestFunction& f,
                       const TestFunction& gfun, const Matrix& x0, double t_final,
                       double tol = 1e-10);

// Vacuum matrix element of the perturbation series at correlation time lambda,
// summed over all diagrams with n <= order vertices (plus the order-0
// identity), together with the limit-value sum over the same diagram set.
struct PrelimitElement {
    Matrix prelimit;
    Matrix limit_truncated;
    double std_error = 0.0;
    long evals = 0;
};
PrelimitElement prelimit_vacuum_element(const WZModel& m, double lambda, double t,
                                        int order, const QuadraturePlan& plan = {});

// Component i of the smeared profile: integral of C_ii(t - s, lambda) g_i(s) ds
// with s over [0, g.t_max()] (two-sided kernel) or s <= t only (`causal`).
// As lambda -> 0 the two-sided form tends to g_i(t), the causal form to
// kappa g_i(t).
std::vector<Complex> smeared_channel(const CorrelationFamily& fam,
                                     const TestFunction& g, double t, double lambda,
                                     bool causal = false);

// Coefficient matrix for converting exponential-vector elements to vacuum
// ones: scattering blocks unchanged, emission/absorption and scalar blocks
// picking up smeared-profile terms. Time-dependent through t.
BlockMatrix coherent_modified_e(const WZModel& m, const TestFunction& f,
                                const TestFunction& gfun, double t, double lambda,
                                bool causal = false);

// One lambda row of a convergence sweep; `err_abs` compares the pre-limit
// element with the limit-truncated one over the same diagram set.
struct SweepRow {
    double lambda = 0.0;
    int order = 0;
    double err_abs = 0.0;
    double err_rel = 0.0;
    double std_error = 0.0;
    Matrix prelimit;
    Matrix limit_truncated;
    bool ok = true;
    std::string message;
};
struct SweepResult {
    std::vector<SweepRow> rows;  // sorted by descending lambda
    double fit_rate = 0.0;       // least-squares slope of log err vs log lambda
    bool monotone = false;       // errors strictly decrease along the grid
};
// Per-row failures are recorded in the row, not thrown.
SweepResult convergence_sweep(const WZModel& m, double t,
                              const std::vector<double>& lambdas, int order,
                              const QuadraturePlan& plan = {});

// Emission-absorption model: E_10 = R, E_01 = R†, E_00 = H, E_11 = 0, with the
// family implied by kappa (which must have real part 1/2). The derived Ito
// scalar block is -iH - kappa R†R.
WZModel build_diffusion_model(const Matrix& r, const Matrix& h, Complex kappa);
// The effective Hamiltonian of that model: H + Im{kappa} R†R.
Matrix diffusion_h_prime(const Matrix& r, const Matrix& h, Complex kappa);

// Single-channel counting model: coefficients E_ab(t) = E f_a^*(t) f_b(t) with
// f_1 = 1 and f_0 the supplied profile, and the closed-form generator
// G_ab(t) = [-iE (1 + i kappa E)^{-1}] f_a^*(t) f_b(t).
struct CountingModel {
    Matrix e;
    TestFunction profile;  // single channel; its channel-1 value is f(t)
    Complex kappa;
    Matrix core;  // -iE (1 + i kappa E)^{-1}

    BlockMatrix coefficients(double t) const;
    BlockMatrix generator(double t) const;
    std::function<BlockMatrix(double)> generator_fn() const;
};
CountingModel build_counting_model(const Matrix& e_op, const TestFunction& profile,
                                   Complex kappa);

}  // namespace qsc
