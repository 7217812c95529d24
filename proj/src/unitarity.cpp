#include "qsc/unitarity.hpp"

#include "qsc/errors.hpp"

#include <stdexcept>
#include <string>

namespace qsc {

namespace {

int hp_dim(const HPParams& p) {
    if (p.h.rows() != p.h.cols() || p.h.rows() == 0)
        throw std::invalid_argument("HPParams: H must be a nonempty square matrix");
    return static_cast<int>(p.h.rows());
}

int hp_channels(const HPParams& p, int d) {
    int n = static_cast<int>(p.l.size());
    if (n < 1) throw std::invalid_argument("HPParams: need at least one channel");
    if (static_cast<int>(p.w.size()) != n)
        throw std::invalid_argument("HPParams: W must be NxN");
    for (const auto& row : p.w) {
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("HPParams: W must be NxN");
        for (const auto& blk : row)
            if (blk.rows() != d || blk.cols() != d)
                throw std::invalid_argument("HPParams: W blocks must be dxd");
    }
    for (const auto& blk : p.l)
        if (blk.rows() != d || blk.cols() != d)
            throw std::invalid_argument("HPParams: L blocks must be dxd");
    return n;
}

Matrix resolvent_1p_ike(const Matrix& e11, Complex kappa, double rcond_floor,
                        const char* context) {
    Matrix m = Matrix::Identity(e11.rows(), e11.cols()) +
               Complex(0.0, 1.0) * kappa * e11;
    return guarded_inverse(m, rcond_floor, context);
}

}  // namespace

BlockMatrix ito_from_hp(const HPParams& p) {
    int d = hp_dim(p);
    int n = hp_channels(p, d);
    BlockMatrix g(n, d);
    Matrix id = Matrix::Identity(d, d);

    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            g.set_block(i, j, p.w[i - 1][j - 1] - (i == j ? id : Matrix::Zero(d, d)));
    for (int i = 1; i <= n; ++i) g.set_block(i, 0, p.l[i - 1]);
    for (int j = 1; j <= n; ++j) {
        Matrix acc = Matrix::Zero(d, d);
        for (int k = 1; k <= n; ++k)
            acc -= p.l[k - 1].adjoint() * p.w[k - 1][j - 1];
        g.set_block(0, j, acc);
    }
    Matrix ll = Matrix::Zero(d, d);
    for (int k = 1; k <= n; ++k) ll += p.l[k - 1].adjoint() * p.l[k - 1];
    g.set_block(0, 0, -0.5 * ll - Complex(0.0, 1.0) * p.h);
    return g;
}

UnitarityResiduals unitarity_residuals(const BlockMatrix& ito) {
    BlockMatrix adj = ito.adjoint();
    BlockMatrix sum = ito + adj;
    UnitarityResiduals r;
    r.isometry = (sum + adj * project(ito, Projector::channel, Side::left)).op_norm();
    r.coisometry = (sum + ito * project(adj, Projector::channel, Side::left)).op_norm();
    return r;
}

HPExtraction hp_from_ito(const BlockMatrix& ito, double tol) {
    UnitarityResiduals res = unitarity_residuals(ito);
    double scale = std::max(1.0, ito.op_norm());
    if (res.isometry > tol * scale || res.coisometry > tol * scale)
        throw std::invalid_argument(
            "hp_from_ito: admissibility residuals " + std::to_string(res.isometry) +
            ", " + std::to_string(res.coisometry) + " exceed tolerance");

    int n = ito.channels(), d = ito.dim();
    Matrix id = Matrix::Identity(d, d);
    HPExtraction out;
    out.residuals = res;
    out.params.w.assign(n, std::vector<Matrix>(n));
    out.params.l.resize(n);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            out.params.w[i - 1][j - 1] = ito.block(i, j) + (i == j ? id : Matrix::Zero(d, d));
    for (int i = 1; i <= n; ++i) out.params.l[i - 1] = ito.block(i, 0);

    Matrix ll = Matrix::Zero(d, d);
    for (int k = 1; k <= n; ++k)
        ll += out.params.l[k - 1].adjoint() * out.params.l[k - 1];
    Matrix h_raw = Complex(0.0, 1.0) * (ito.block(0, 0) + 0.5 * ll);
    out.params.h = 0.5 * (h_raw + h_raw.adjoint());
    out.h_defect = op_norm(0.5 * (h_raw - h_raw.adjoint()));
    return out;
}

HPParams hp_single_channel(const Matrix& e00, const Matrix& e01, const Matrix& e10,
                           const Matrix& e11, Complex kappa, double rcond_floor) {
    Matrix inv = resolvent_1p_ike(e11, kappa, rcond_floor, "hp_single_channel");
    Matrix id = Matrix::Identity(e11.rows(), e11.cols());
    HPParams p;
    p.w.assign(1, std::vector<Matrix>(1));
    p.w[0][0] = (id - Complex(0.0, 1.0) * std::conj(kappa) * e11) * inv;
    p.l.resize(1);
    p.l[0] = -Complex(0.0, 1.0) * inv * e10;
    Matrix ki = kappa * inv;
    Matrix im_ki = (ki - ki.adjoint()) / Complex(0.0, 2.0);
    p.h = e00 + e01 * im_ki * e10;
    return p;
}

FComponentsN1 f_components_n1(const Matrix& e00, const Matrix& e01, const Matrix& e10,
                              const Matrix& e11, Complex kappa, double rcond_floor) {
    (void)e00;
    (void)e01;
    Matrix inv = resolvent_1p_ike(e11, kappa, rcond_floor, "f_components_n1");
    int d = static_cast<int>(e11.rows());
    FComponentsN1 f;
    f.f00 = Matrix::Identity(d, d);
    f.f01 = Matrix::Zero(d, d);
    f.f10 = -Complex(0.0, 1.0) * kappa * inv * e10;
    f.f11 = inv;
    return f;
}

}  // namespace qsc
