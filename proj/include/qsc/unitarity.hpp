// Hudson-Parthasarathy form of unitary-admissible coefficient matrices:
// scattering unitary W, coupling operators L, Hamiltonian H.
#pragma once

#include "qsc/block_matrix.hpp"

#include <vector>

namespace qsc {

struct HPParams {
    std::vector<std::vector<Matrix>> w;  // NxN array of dxd blocks, W unitary as a whole
    std::vector<Matrix> l;               // N coupling operators, dxd
    Matrix h;                            // dxd, self-adjoint
};

// G_ij = W_ij - delta_ij, G_i0 = L_i, G_0j = -sum_k L_k† W_kj,
// G_00 = -(1/2) sum_k L_k† L_k - iH.
BlockMatrix ito_from_hp(const HPParams& p);

// Residual norms of the two admissibility identities
// G + G† + G† P G = 0 and G + G† + G P G† = 0 (flat operator norms).
struct UnitarityResiduals {
    double isometry = 0.0;
    double coisometry = 0.0;
};
UnitarityResiduals unitarity_residuals(const BlockMatrix& ito);

// Inverse extraction. H is symmetrized; the discarded anti-Hermitian part is
// reported. Throws std::invalid_argument when the admissibility residuals
// exceed `tol` times the matrix scale.
struct HPExtraction {
    HPParams params;
    double h_defect = 0.0;  // norm of the anti-Hermitian residue of H
    UnitarityResiduals residuals;
};
HPExtraction hp_from_ito(const BlockMatrix& ito, double tol = 1e-8);

// Single-channel closed forms for anti-Hermitian strat coefficients -iE with
// one-sided weight kappa (all blocks dxd):
//   W = (1 - i kappa* E11)(1 + i kappa E11)^{-1}
//   L = -i (1 + i kappa E11)^{-1} E10
//   H = E00 + E01 Im{kappa (1 + i kappa E11)^{-1}} E10,  Im{A} = (A - A†)/2i
HPParams hp_single_channel(const Matrix& e00, const Matrix& e01, const Matrix& e10,
                           const Matrix& e11, Complex kappa,
                           double rcond_floor = 1e-12);

// Single-channel transfer-matrix components for the same data:
//   F00 = 1, F01 = 0, F10 = -i kappa (1 + i kappa E11)^{-1} E10,
//   F11 = (1 + i kappa E11)^{-1}.
struct FComponentsN1 {
    Matrix f00, f01, f10, f11;
};
FComponentsN1 f_components_n1(const Matrix& e00, const Matrix& e01, const Matrix& e10,
                              const Matrix& e11, Complex kappa,
                              double rcond_floor = 1e-12);

}  // namespace qsc
