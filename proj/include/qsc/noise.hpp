// Gauge matrices and stationary colored-noise correlation families.
#pragma once

#include "qsc/block_matrix.hpp"

#include <vector>

namespace qsc {

// Gauge data: Hermitian NxN matrix Z. The derived coefficient matrix is
// V = P/2 + iZ embedded in the channel sector, so V + V† = P holds exactly.
class Gauge {
public:
    Gauge() = default;
    explicit Gauge(int channels);            // Z = 0 (symmetric gauge)
    Gauge(int channels, const Matrix& z);    // Z must be Hermitian to 1e-12
    int channels() const { return channels_; }
    const Matrix& z() const { return z_; }   // NxN Hermitian
    Matrix v_sub() const;                    // NxN: 1/2 + iZ
    ScalarMatrix v() const;                  // (N+1)x(N+1): channel embedding of v_sub
    double v_norm() const;                   // spectral norm of v_sub

private:
    int channels_ = 0;
    Matrix z_;
};

// Z from a one-sided correlation weight kappa with kappa + kappa† = 1 (tol 1e-8).
Gauge gauge_from_kappa(const Matrix& kappa, double tol = 1e-8);

enum class NoiseKind { ou, ou_modulated };

// Channel-diagonal stationary families C_ij(tau, lambda) = delta_ij c(tau, lambda):
//   ou:           c = (1/2lambda) e^{-|tau|/lambda}
//   ou_modulated: c = ((1+omega^2)/2lambda) e^{-|tau|/lambda} e^{i omega tau/lambda}
struct CorrelationFamily {
    NoiseKind kind = NoiseKind::ou;
    int channels = 1;
    double omega = 0.0;  // used by ou_modulated only

    Complex scalar(double tau, double lambda) const;            // c(tau, lambda)
    Complex value(int i, int j, double tau, double lambda) const;  // C_ij
    Complex kappa_scalar() const;  // closed form of the one-sided integral of c
    Matrix kappa() const;          // kappa_scalar * identity_N
    Gauge gauge() const;           // gauge_from_kappa(kappa())
};

// Numeric one-sided integral of C_ij over [0, 40 lambda] by adaptive quadrature,
// plus the analytic tail of the remaining [40 lambda, infinity) piece.
Complex kappa_integral(const CorrelationFamily& fam, int i, int j, double lambda,
                       double abs_tol = 1e-12);

// lambda -> 0 limit of the one-sided integral, reported as the intercept of a
// least-squares linear fit in lambda across the grid.
Matrix kappa_limit(const CorrelationFamily& fam, const std::vector<double>& lambda_grid,
                   double abs_tol = 1e-12);

}  // namespace qsc
