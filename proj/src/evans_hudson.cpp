#include "qsc/evans_hudson.hpp"

#include "qsc/unitarity.hpp"

#include <stdexcept>

namespace qsc {

namespace {

void check_observable(const BlockMatrix& g, const Matrix& x, const char* what) {
    if (x.rows() != g.dim() || x.cols() != g.dim())
        throw std::invalid_argument(std::string(what) + ": observable must be dxd");
}

void check_pair(const BlockMatrix& g, int a, int b, const char* what) {
    if (a < 0 || a > g.channels() || b < 0 || b > g.channels())
        throw std::out_of_range(std::string(what) + ": block index out of range");
}

Matrix commutator(const Matrix& x, const Matrix& y) { return x * y - y * x; }

}  // namespace

Matrix eh_from_ito(const BlockMatrix& ito, int a, int b, const Matrix& x) {
    check_observable(ito, x, "eh_from_ito");
    check_pair(ito, a, b, "eh_from_ito");
    Matrix out = x * ito.block(a, b) + ito.block(b, a).adjoint() * x;
    for (int i = 1; i <= ito.channels(); ++i)
        out += ito.block(i, a).adjoint() * x * ito.block(i, b);
    return out;
}

Matrix eh_from_transfer(const BlockMatrix& e, const BlockMatrix& f, int a, int b,
                        const Matrix& x) {
    check_observable(e, x, "eh_from_transfer");
    check_pair(e, a, b, "eh_from_transfer");
    if (e.channels() != f.channels() || e.dim() != f.dim())
        throw std::invalid_argument("eh_from_transfer: E and F shape mismatch");
    Matrix out = Matrix::Zero(e.dim(), e.dim());
    for (int mu = 0; mu <= e.channels(); ++mu)
        for (int nu = 0; nu <= e.channels(); ++nu)
            out += f.block(mu, a).adjoint() * commutator(x, e.block(mu, nu)) *
                   f.block(nu, b);
    return Complex(0.0, -1.0) * out;
}

Matrix eh_single_channel(const Matrix& e00, const Matrix& e01, const Matrix& e10,
                         const Matrix& e11, Complex kappa, int a, int b,
                         const Matrix& x) {
    if (a < 0 || a > 1 || b < 0 || b > 1)
        throw std::out_of_range("eh_single_channel: block index out of range");
    HPParams p = hp_single_channel(e00, e01, e10, e11, kappa);
    const Matrix& w = p.w[0][0];
    const Matrix& l = p.l[0];
    if (a == 1 && b == 1) return w.adjoint() * x * w - x;
    if (a == 1 && b == 0) return w.adjoint() * commutator(x, l);
    if (a == 0 && b == 1) return -commutator(x, l.adjoint()) * w;
    return 0.5 * commutator(l.adjoint(), x) * l + 0.5 * l.adjoint() * commutator(x, l) -
           Complex(0.0, 1.0) * commutator(x, p.h);
}

EHGenerator EHGenerator::from_ito(const BlockMatrix& ito, double admissibility_tol) {
    if (admissibility_tol > 0.0) {
        UnitarityResiduals res = unitarity_residuals(ito);
        double scale = std::max(1.0, ito.op_norm());
        if (res.isometry > admissibility_tol * scale ||
            res.coisometry > admissibility_tol * scale)
            throw std::invalid_argument(
                "EHGenerator::from_ito: coefficients are not unitary-admissible");
    }
    EHGenerator g;
    g.use_transfer_ = false;
    g.channels_ = ito.channels();
    g.dim_ = ito.dim();
    g.ito_ = ito;
    return g;
}

EHGenerator EHGenerator::from_hamiltonian(const BlockMatrix& strat, const Gauge& gauge,
                                          double admissibility_tol) {
    double scale = std::max(1.0, strat.op_norm());
    if ((strat + strat.adjoint()).op_norm() > 1e-10 * scale)
        throw std::invalid_argument(
            "EHGenerator::from_hamiltonian: strat coefficients are not anti-Hermitian");
    Conversion c = strat_to_ito(strat, gauge);
    if (admissibility_tol > 0.0) {
        UnitarityResiduals res = unitarity_residuals(c.ito);
        double gscale = std::max(1.0, c.ito.op_norm());
        if (res.isometry > admissibility_tol * gscale ||
            res.coisometry > admissibility_tol * gscale)
            throw std::invalid_argument(
                "EHGenerator::from_hamiltonian: induced coefficients are not "
                "unitary-admissible");
    }
    EHGenerator g;
    g.use_transfer_ = true;
    g.channels_ = strat.channels();
    g.dim_ = strat.dim();
    g.e_ = BlockMatrix::from_flat(strat.channels(), strat.dim(),
                                  Complex(0.0, 1.0) * strat.flat());
    g.f_ = c.f_mat;
    return g;
}

Matrix EHGenerator::apply(int a, int b, const Matrix& x) const {
    if (dim_ == 0) throw std::logic_error("EHGenerator: not initialized");
    return use_transfer_ ? eh_from_transfer(e_, f_, a, b, x)
                         : eh_from_ito(ito_, a, b, x);
}

Matrix EHGenerator::superoperator(int a, int b) const {
    int d = dim_;
    Matrix s = Matrix::Zero(d * d, d * d);
    for (int q = 0; q < d; ++q)
        for (int p = 0; p < d; ++p) {
            Matrix basis = Matrix::Zero(d, d);
            basis(p, q) = 1.0;
            Matrix out = apply(a, b, basis);
            // column-major vec: entry (r, c) of out sits at row r + c d
            for (int c = 0; c < d; ++c)
                for (int r = 0; r < d; ++r) s(r + c * d, p + q * d) = out(r, c);
        }
    return s;
}

double dissipation_residual(const EHGenerator& gen, int a, int b, const Matrix& x,
                            const Matrix& y) {
    Matrix defect = gen.apply(a, b, x * y) - gen.apply(a, b, x) * y -
                    x * gen.apply(a, b, y);
    for (int i = 1; i <= gen.channels(); ++i)
        defect -= gen.apply(a, i, x) * gen.apply(i, b, y);
    return op_norm(defect);
}

double adjoint_symmetry_residual(const EHGenerator& gen, int a, int b, const Matrix& x) {
    return op_norm(gen.apply(a, b, x).adjoint() - gen.apply(b, a, x.adjoint()));
}

}  // namespace qsc
