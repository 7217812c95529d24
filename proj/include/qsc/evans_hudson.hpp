// Evans-Hudson flow generator matrix: the maps L_ab acting on system observables.
#pragma once

#include "qsc/block_matrix.hpp"
#include "qsc/conversion.hpp"
#include "qsc/noise.hpp"

namespace qsc {

// Sandwich form from Ito coefficients:
//   L_ab(X) = X G_ab + (G_ba)† X + sum_i (G_ia)† X G_ib.
Matrix eh_from_ito(const BlockMatrix& ito, int a, int b, const Matrix& x);

// Commutator form from Hamiltonian-style data (E with transfer matrix F):
//   L_ab(X) = -i sum_{mu,nu} (F_mu_a)† [X, E_mu_nu] F_nu_b.
Matrix eh_from_transfer(const BlockMatrix& e, const BlockMatrix& f, int a, int b,
                        const Matrix& x);

// Single-channel explicit form built from the closed-form W, L, H:
//   L_11(X) = W† X W - X,   L_10(X) = W† [X, L],   L_01(X) = -[X, L†] W,
//   L_00(X) = (1/2)[L†, X] L + (1/2) L† [X, L] - i [X, H].
Matrix eh_single_channel(const Matrix& e00, const Matrix& e01, const Matrix& e10,
                         const Matrix& e11, Complex kappa, int a, int b,
                         const Matrix& x);

// Lazily evaluated generator; construction does no per-observable work.
class EHGenerator {
public:
    // Route via the sandwich form; `ito` should be unitary-admissible for a
    // bona fide flow (checked against `admissibility_tol` when positive).
    static EHGenerator from_ito(const BlockMatrix& ito, double admissibility_tol = 1e-8);
    // Route via the commutator form from anti-Hermitian strat coefficients.
    static EHGenerator from_hamiltonian(const BlockMatrix& strat, const Gauge& gauge,
                                        double admissibility_tol = 1e-8);

    int channels() const { return channels_; }
    int dim() const { return dim_; }

    Matrix apply(int a, int b, const Matrix& x) const;

    // Dense d^2 x d^2 matrix S with S vec(X) = vec(L_ab(X)), column-major vec.
    Matrix superoperator(int a, int b) const;

private:
    EHGenerator() = default;
    bool use_transfer_ = false;
    int channels_ = 0, dim_ = 0;
    BlockMatrix ito_;      // sandwich route
    BlockMatrix e_, f_;    // commutator route
};

// || L_ab(XY) - L_ab(X) Y - X L_ab(Y) - sum_i L_ai(X) L_ib(Y) ||
double dissipation_residual(const EHGenerator& gen, int a, int b, const Matrix& x,
                            const Matrix& y);

// || L_ab(X)† - L_ba(X†) ||
double adjoint_symmetry_residual(const EHGenerator& gen, int a, int b, const Matrix& x);

}  // namespace qsc
