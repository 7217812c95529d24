#include "qsc/noise.hpp"

#include "qsc/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace qsc {

Gauge::Gauge(int channels) : channels_(channels) {
    if (channels < 1) throw std::invalid_argument("Gauge: need channels >= 1");
    z_ = Matrix::Zero(channels, channels);
}

Gauge::Gauge(int channels, const Matrix& z) : channels_(channels) {
    if (channels < 1) throw std::invalid_argument("Gauge: need channels >= 1");
    if (z.rows() != channels || z.cols() != channels)
        throw std::invalid_argument("Gauge: Z must be NxN");
    if (op_norm(z - z.adjoint()) > 1e-12 * std::max(1.0, op_norm(z)))
        throw std::invalid_argument("Gauge: Z must be Hermitian");
    z_ = 0.5 * (z + z.adjoint());  // store exactly Hermitian
}

Matrix Gauge::v_sub() const {
    return 0.5 * Matrix::Identity(channels_, channels_) + Complex(0.0, 1.0) * z_;
}

ScalarMatrix Gauge::v() const {
    ScalarMatrix s(channels_);
    Matrix vs = v_sub();
    for (int i = 1; i <= channels_; ++i)
        for (int j = 1; j <= channels_; ++j) s.set(i, j, vs(i - 1, j - 1));
    return s;
}

double Gauge::v_norm() const { return op_norm(v_sub()); }

Gauge gauge_from_kappa(const Matrix& kappa, double tol) {
    if (kappa.rows() != kappa.cols())
        throw std::invalid_argument("gauge_from_kappa: kappa must be square");
    int n = static_cast<int>(kappa.rows());
    Matrix defect = kappa + kappa.adjoint() - Matrix::Identity(n, n);
    if (op_norm(defect) > tol)
        throw std::invalid_argument(
            "gauge_from_kappa: kappa + kappa^dagger differs from identity beyond tolerance");
    // kappa = 1/2 + iZ  =>  Z = (kappa - kappa^dagger) / 2i, Hermitian by construction
    Matrix z = (kappa - kappa.adjoint()) / Complex(0.0, 2.0);
    return Gauge(n, z);
}

Complex CorrelationFamily::scalar(double tau, double lambda) const {
    if (!(lambda > 0.0)) throw std::invalid_argument("CorrelationFamily: need lambda > 0");
    double base = std::exp(-std::abs(tau) / lambda) / (2.0 * lambda);
    switch (kind) {
        case NoiseKind::ou:
            return Complex(base, 0.0);
        case NoiseKind::ou_modulated: {
            double amp = 1.0 + omega * omega;
            double phase = omega * tau / lambda;
            return amp * base * Complex(std::cos(phase), std::sin(phase));
        }
    }
    throw std::logic_error("CorrelationFamily: unknown kind");
}

Complex CorrelationFamily::value(int i, int j, double tau, double lambda) const {
    if (i < 1 || i > channels || j < 1 || j > channels)
        throw std::out_of_range("CorrelationFamily: channel index out of range");
    if (i != j) return Complex(0.0, 0.0);
    return scalar(tau, lambda);
}

Complex CorrelationFamily::kappa_scalar() const {
    switch (kind) {
        case NoiseKind::ou:
            return Complex(0.5, 0.0);
        case NoiseKind::ou_modulated:
            return Complex(0.5, 0.5 * omega);
    }
    throw std::logic_error("CorrelationFamily: unknown kind");
}

Matrix CorrelationFamily::kappa() const {
    return kappa_scalar() * Matrix::Identity(channels, channels);
}

Gauge CorrelationFamily::gauge() const { return gauge_from_kappa(kappa()); }

Complex kappa_integral(const CorrelationFamily& fam, int i, int j, double lambda,
                       double abs_tol) {
    if (i != j) return Complex(0.0, 0.0);
    if (i < 1 || i > fam.channels)
        throw std::out_of_range("kappa_integral: channel index out of range");
    double cut = 40.0 * lambda;
    QuadResult head = integrate(
        [&](double tau) { return fam.scalar(tau, lambda); }, 0.0, cut, abs_tol);
    // analytic tail of int_cut^inf c: both families integrate to
    // amp/(2 lambda) * e^{(i omega - 1) tau / lambda} with antiderivative
    // lambda/(1 - i omega) * (...); at tau = cut the remaining mass is
    // amp/2 * e^{-40} * e^{40 i omega} / (1 - i omega).
    double omega = fam.kind == NoiseKind::ou ? 0.0 : fam.omega;
    double amp = fam.kind == NoiseKind::ou ? 1.0 : 1.0 + omega * omega;
    Complex tail = 0.5 * amp * std::exp(-40.0) *
                   Complex(std::cos(40.0 * omega), std::sin(40.0 * omega)) /
                   Complex(1.0, -omega);
    return head.value + tail;
}

Matrix kappa_limit(const CorrelationFamily& fam, const std::vector<double>& lambda_grid,
                   double abs_tol) {
    if (lambda_grid.empty())
        throw std::invalid_argument("kappa_limit: need a non-empty lambda grid");
    int n = fam.channels;
    Matrix out = Matrix::Zero(n, n);
    for (int i = 1; i <= n; ++i) {
        if (lambda_grid.size() == 1) {
            out(i - 1, i - 1) = kappa_integral(fam, i, i, lambda_grid[0], abs_tol);
            continue;
        }
        // least-squares fit value(lambda) = a + b lambda; report the intercept a
        double sx = 0.0, sxx = 0.0;
        Complex sy{0.0, 0.0}, sxy{0.0, 0.0};
        int m = static_cast<int>(lambda_grid.size());
        for (double lam : lambda_grid) {
            Complex v = kappa_integral(fam, i, i, lam, abs_tol);
            sx += lam;
            sxx += lam * lam;
            sy += v;
            sxy += lam * v;
        }
        double det = m * sxx - sx * sx;
        Complex slope = (Complex(m) * sxy - sx * sy) / det;
        Complex intercept = (sy - slope * sx) / Complex(m);
        out(i - 1, i - 1) = intercept;
    }
    return out;
}

}  // namespace qsc
