#include "qsc/conversion.hpp"

#include "qsc/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace qsc {

namespace {

// Vs ⊗ 1_d as an (N d)x(N d) matrix.
Matrix kron_id(const Matrix& vs, int d) {
    int n = static_cast<int>(vs.rows());
    Matrix out = Matrix::Zero(n * d, n * d);
    Matrix id = Matrix::Identity(d, d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (vs(i, j) != Complex(0.0)) out.block(i * d, j * d, d, d) = vs(i, j) * id;
    return out;
}

// blockdiag(identity_d, channel_inverse) acting on the full flat space.
Matrix embed_resolvent(const Matrix& channel_inv, int channels, int d) {
    int full = (channels + 1) * d;
    Matrix out = Matrix::Identity(full, full);
    out.block(d, d, channels * d, channels * d) = channel_inv;
    return out;
}

void check_gauge_shape(const BlockMatrix& x, const Gauge& g, const char* what) {
    if (x.channels() != g.channels())
        throw std::invalid_argument(std::string(what) + ": gauge channel count mismatch");
}

}  // namespace

Conversion strat_to_ito(const BlockMatrix& strat, const Gauge& gauge,
                        double rcond_floor) {
    check_gauge_shape(strat, gauge, "strat_to_ito");
    const int n = strat.channels(), d = strat.dim();
    Matrix vp = kron_id(gauge.v_sub(), d);
    Matrix s0 = strat.channel_flat();
    Matrix vs0 = vp * s0;
    Matrix a = Matrix::Identity(n * d, n * d) - vs0;

    Eigen::PartialPivLU<Matrix> lu(a);
    double rc = lu.rcond();
    if (!(rc >= rcond_floor))
        throw SingularMatrixError(
            "strat_to_ito: channel solve has reciprocal condition " + std::to_string(rc),
            rc);

    Matrix resolvent = embed_resolvent(lu.inverse(), n, d);
    Matrix vfull = promote(gauge.v(), d).flat();
    Matrix vg0 = vfull * strat.flat();
    Matrix g = strat.flat() + strat.flat() * resolvent * vg0;

    Conversion out;
    out.strat = strat;
    out.ito = BlockMatrix::from_flat(n, d, g);
    // T = (1 - V G0 P)^{-1} V: zero outside the channel block
    Matrix tfull = Matrix::Zero(strat.flat_size(), strat.flat_size());
    tfull.block(d, d, n * d, n * d) = lu.inverse() * vp;
    out.t_mat = BlockMatrix::from_flat(n, d, tfull);
    out.f_mat = BlockMatrix::from_flat(
        n, d, Matrix::Identity(strat.flat_size(), strat.flat_size()) + vfull * g);
    out.gauge = gauge;
    out.rcond = rc;
    out.contraction = op_norm(vs0);
    return out;
}

Conversion ito_to_strat(const BlockMatrix& ito, const Gauge& gauge, double rcond_floor) {
    check_gauge_shape(ito, gauge, "ito_to_strat");
    const int n = ito.channels(), d = ito.dim();
    Matrix vp = kron_id(gauge.v_sub(), d);
    Matrix s = ito.channel_flat();
    Matrix vs = vp * s;
    Matrix a = Matrix::Identity(n * d, n * d) + vs;

    Eigen::PartialPivLU<Matrix> lu(a);
    double rc = lu.rcond();
    if (!(rc >= rcond_floor))
        throw SingularMatrixError(
            "ito_to_strat: channel solve has reciprocal condition " + std::to_string(rc),
            rc);

    Matrix resolvent = embed_resolvent(lu.inverse(), n, d);
    Matrix vfull = promote(gauge.v(), d).flat();
    Matrix vg = vfull * ito.flat();
    Matrix g0 = ito.flat() - ito.flat() * resolvent * vg;

    Conversion out;
    out.ito = ito;
    out.strat = BlockMatrix::from_flat(n, d, g0);
    // T = V + V G V needs no solve
    Matrix tfull = vfull + vfull * ito.flat() * vfull;
    out.t_mat = BlockMatrix::from_flat(n, d, tfull);
    out.f_mat = BlockMatrix::from_flat(
        n, d, Matrix::Identity(ito.flat_size(), ito.flat_size()) + vg);
    out.gauge = gauge;
    out.rcond = rc;
    out.contraction = op_norm(vs);
    return out;
}

BlockMatrix t_matrix(const BlockMatrix& strat, const Gauge& gauge, double rcond_floor) {
    return strat_to_ito(strat, gauge, rcond_floor).t_mat;
}

BlockMatrix f_matrix(const BlockMatrix& ito, const Gauge& gauge) {
    check_gauge_shape(ito, gauge, "f_matrix");
    Matrix vg = promote(gauge.v(), ito.dim()).flat() * ito.flat();
    return BlockMatrix::from_flat(
        ito.channels(), ito.dim(),
        Matrix::Identity(ito.flat_size(), ito.flat_size()) + vg);
}

NeumannSum neumann_sum(const BlockMatrix& strat, const Gauge& gauge, int order) {
    check_gauge_shape(strat, gauge, "neumann_sum");
    if (order < 0) throw std::invalid_argument("neumann_sum: need order >= 0");
    const int n = strat.channels(), d = strat.dim();
    Matrix vs0 = kron_id(gauge.v_sub(), d) * strat.channel_flat();
    double r = op_norm(vs0);
    if (!(r < 1.0))
        throw NonContractiveError(
            "neumann_sum: channel norm of V G0 is " + std::to_string(r) + " >= 1", r);

    Matrix vg0 = promote(gauge.v(), d).flat() * strat.flat();
    Matrix acc = strat.flat();
    Matrix pow = Matrix::Identity(strat.flat_size(), strat.flat_size());
    for (int k = 1; k <= order; ++k) {
        pow = pow * vg0;
        acc += strat.flat() * pow;
    }

    NeumannSum out;
    out.value = BlockMatrix::from_flat(n, d, acc);
    out.contraction = r;
    out.tail_bound = strat.op_norm() * std::pow(r, order + 1) / (1.0 - r);
    out.terms = order + 1;
    return out;
}

BlockMatrix change_gauge(const BlockMatrix& strat, const Gauge& from, const Gauge& to) {
    return ito_to_strat(strat_to_ito(strat, from).ito, to).strat;
}

OpticalReport optical_check(const Conversion& c) {
    const BlockMatrix& g0 = c.strat;
    double g0_scale = std::max(1.0, g0.op_norm());
    if ((g0 + g0.adjoint()).op_norm() > 1e-10 * g0_scale)
        throw std::invalid_argument(
            "optical_check: strat coefficients are not anti-Hermitian");

    // The sum rule T + T† = F F† holds for any Hermitian weight, but the
    // product symmetry F F† = F† F and the quadratic form for Im T are exact
    // only for the symmetric weight 1/2.  The report therefore measures the
    // scattering identities of the coefficient matrix itself, independent of
    // the weight the conversion was run with.
    Conversion canon = strat_to_ito(g0, Gauge(g0.channels()));
    Matrix ec = (Complex(0.0, 1.0) * g0.flat())
                    .block(g0.dim(), g0.dim(), g0.channels() * g0.dim(),
                           g0.channels() * g0.dim());
    Matrix tc = canon.t_mat.channel_flat();
    Matrix fc = canon.f_mat.channel_flat();

    OpticalReport r;
    Matrix re2 = tc + tc.adjoint();  // should equal F F† and F† F
    r.herm_defect = op_norm(re2 - fc * fc.adjoint());
    r.ff_defect = op_norm(fc * fc.adjoint() - fc.adjoint() * fc);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * re2);
    r.min_re_eig = eig.eigenvalues().minCoeff();
    Matrix im = (tc - tc.adjoint()) / Complex(0.0, 2.0);
    r.im_defect = op_norm(im + tc * ec * tc.adjoint());
    r.scale = 1.0 + op_norm(ec) + op_norm(tc) + op_norm(fc) * op_norm(fc);
    return r;
}

}  // namespace qsc
