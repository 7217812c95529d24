// Conversion between the two coefficient pictures of a quantum SDE, with the
// scattering (T) and transfer (F) matrices and their consistency checks.
#pragma once

#include "qsc/block_matrix.hpp"
#include "qsc/noise.hpp"

namespace qsc {

// A matched coefficient pair plus derived objects and solve diagnostics.
struct Conversion {
    BlockMatrix ito;       // G
    BlockMatrix strat;     // G0
    BlockMatrix t_mat;     // T = (1 - V G0 P)^{-1} V
    BlockMatrix f_mat;     // F = 1 + V G
    Gauge gauge;
    double rcond = 1.0;       // reciprocal condition of the channel solve
    double contraction = 0.0; // channel norm of V G0 (or of V G for the reverse map)
};

// G = G0 + G0 (1 - P V G0 P)^{-1} V G0; the inverse is taken on the channel block.
Conversion strat_to_ito(const BlockMatrix& strat, const Gauge& gauge,
                        double rcond_floor = 1e-12);

// G0 = G - G (1 + P V G P)^{-1} V G.
Conversion ito_to_strat(const BlockMatrix& ito, const Gauge& gauge,
                        double rcond_floor = 1e-12);

// Standalone derived objects.
BlockMatrix t_matrix(const BlockMatrix& strat, const Gauge& gauge,
                     double rcond_floor = 1e-12);
BlockMatrix f_matrix(const BlockMatrix& ito, const Gauge& gauge);

// Partial sum G0 sum_{n<=order} (V G0)^n with a geometric tail bound.
struct NeumannSum {
    BlockMatrix value;
    double tail_bound = 0.0;   // ||G0|| r^{order+1} / (1 - r)
    double contraction = 0.0;  // r = channel norm of V G0
    int terms = 0;
};
NeumannSum neumann_sum(const BlockMatrix& strat, const Gauge& gauge, int order);

// Move a coefficient matrix between gauges by pivoting through the gauge-free picture.
BlockMatrix change_gauge(const BlockMatrix& strat, const Gauge& from, const Gauge& to);

// Scattering-identity residuals for anti-Hermitian strat coefficients (G0 = -iE).
// All norms are taken on the NxN channel blocks.
struct OpticalReport {
    double herm_defect = 0.0;  // || T + T† - F F† ||
    double ff_defect = 0.0;    // || F F† - F† F ||
    double min_re_eig = 0.0;   // smallest eigenvalue of (T + T†)/2
    double im_defect = 0.0;    // || Im T + T E T† ||
    double scale = 1.0;        // 1 + ||E|| + ||T|| + ||F||^2
};
OpticalReport optical_check(const Conversion& c);

}  // namespace qsc
