// Independent reference implementations used to cross-check the library.
// Everything here is deliberately written with a different algorithm than the
// code under test: power iteration instead of SVD, triple loops instead of
// Eigen products, explicit recursions instead of closed forms, and Taylor
// series with scaling-and-squaring instead of library matrix exponentials.
#pragma once

#include "qsc/block_matrix.hpp"
#include "qsc/noise.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using qsc::BlockMatrix;
using qsc::Complex;
using qsc::Matrix;

// ----- norms -----

// Spectral norm via power iteration on A†A (independent of any SVD).
inline double spectral_norm_power(const Matrix& a, int iters = 400) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    Matrix m = a.adjoint() * a;
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(m.cols());
    v.normalize();
    double lambda = 0.0;
    for (int k = 0; k < iters; ++k) {
        Eigen::VectorXcd w = m * v;
        double n = w.norm();
        if (n == 0.0) return 0.0;
        v = w / n;
        lambda = n;
    }
    return std::sqrt(lambda);
}

// ----- block algebra -----

// Block product by explicit triple loop over block indices.
inline BlockMatrix block_product_loops(const BlockMatrix& a, const BlockMatrix& b) {
    int n = a.channels(), d = a.dim();
    BlockMatrix out(n, d);
    for (int r = 0; r <= n; ++r)
        for (int c = 0; c <= n; ++c) {
            Matrix acc = Matrix::Zero(d, d);
            for (int k = 0; k <= n; ++k) acc += a.block(r, k) * b.block(k, c);
            out.set_block(r, c, acc);
        }
    return out;
}

// ----- combinatorics -----

// Number of set partitions via the Stirling-number table B_n = sum_k S(n, k).
inline std::uint64_t bell_via_stirling(int n) {
    std::vector<std::vector<std::uint64_t>> s(static_cast<size_t>(n) + 1,
                                              std::vector<std::uint64_t>(
                                                  static_cast<size_t>(n) + 1, 0));
    s[0][0] = 1;
    for (int i = 1; i <= n; ++i)
        for (int k = 1; k <= i; ++k)
            s[static_cast<size_t>(i)][static_cast<size_t>(k)] =
                static_cast<std::uint64_t>(k) *
                    s[static_cast<size_t>(i - 1)][static_cast<size_t>(k)] +
                s[static_cast<size_t>(i - 1)][static_cast<size_t>(k - 1)];
    std::uint64_t total = 0;
    for (int k = 0; k <= n; ++k) total += s[static_cast<size_t>(n)][static_cast<size_t>(k)];
    return total;
}

// Count perfect matchings of 2m points by brute-force recursion.
inline std::uint64_t count_matchings_brute(int m) {
    std::vector<bool> used(static_cast<size_t>(2 * m), false);
    std::uint64_t count = 0;
    std::function<void(int)> go = [&](int placed) {
        if (placed == m) {
            ++count;
            return;
        }
        int first = -1;
        for (int i = 0; i < 2 * m; ++i)
            if (!used[static_cast<size_t>(i)]) {
                first = i;
                break;
            }
        used[static_cast<size_t>(first)] = true;
        for (int j = first + 1; j < 2 * m; ++j) {
            if (used[static_cast<size_t>(j)]) continue;
            used[static_cast<size_t>(j)] = true;
            go(placed + 1);
            used[static_cast<size_t>(j)] = false;
        }
        used[static_cast<size_t>(first)] = false;
    };
    if (m == 0) return 1;
    go(0);
    return count;
}

// ----- matrix exponential -----

// Taylor series with scaling and squaring; independent of library matrix
// function machinery.
inline Matrix exp_taylor(const Matrix& a) {
    double nrm = spectral_norm_power(a);
    int s = 0;
    double scale = 1.0;
    while (nrm * scale > 0.5) {
        scale *= 0.5;
        ++s;
    }
    Matrix b = scale * a;
    int d = static_cast<int>(a.rows());
    Matrix term = Matrix::Identity(d, d);
    Matrix sum = term;
    for (int k = 1; k <= 24; ++k) {
        term = (term * b).eval() / static_cast<double>(k);
        sum += term;
    }
    for (int k = 0; k < s; ++k) sum = (sum * sum).eval();
    return sum;
}

// ----- exponentially correlated kernel integrals (closed forms) -----

// One-sided integral of (1/(2L)) exp(-u/L) over [0, t].
inline double ou_one_sided(double t, double lambda) {
    return 0.5 * (1.0 - std::exp(-t / lambda));
}

// Iterated integral over 0 < t1 < t2 < t of the kernel in t2 - t1.
inline double ou_double_integral(double t, double lambda) {
    return 0.5 * (t - lambda * (1.0 - std::exp(-t / lambda)));
}

// Window integral of the kernel centred at t over [0, T] (two-sided reach).
inline double ou_window(double t, double big_t, double lambda) {
    return 1.0 - 0.5 * std::exp(-t / lambda) - 0.5 * std::exp(-(big_t - t) / lambda);
}

// ----- fixed-point conversion oracle -----

// Solves G = G0 + G0 V G by plain fixed-point iteration (converges when the
// channel contraction is < 1); independent of the direct linear solve.
inline BlockMatrix conversion_fixed_point(const BlockMatrix& g0,
                                          const qsc::ScalarMatrix& v, int iters = 4000) {
    BlockMatrix vb = qsc::promote(v, g0.dim());
    BlockMatrix g = g0;
    for (int k = 0; k < iters; ++k) g = g0 + g0 * (vb * g);
    return g;
}

// ----- random ensembles -----

inline Matrix random_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = scale * Complex(gauss(rng), gauss(rng));
    return m;
}

inline Matrix random_hermitian(std::mt19937_64& rng, int d, double scale = 1.0) {
    Matrix m = random_matrix(rng, d, d, scale);
    return 0.5 * (m + m.adjoint()).eval();
}

inline Matrix random_unitary(std::mt19937_64& rng, int d) {
    Matrix m = random_matrix(rng, d, d);
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ() * Matrix::Identity(d, d);
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < d; ++c) {
        Complex diag = r(c, c);
        double mag = std::abs(diag);
        if (mag > 0.0) q.col(c) *= diag / mag;
    }
    return q;
}

// Random Hermitian block family scaled so the channel contraction with the
// given gauge stays at or below `target`.
inline BlockMatrix random_hermitian_family(std::mt19937_64& rng, int channels, int dim,
                                           const qsc::Gauge& gauge, double target) {
    BlockMatrix e(channels, dim);
    for (int a = 0; a <= channels; ++a) {
        e.set_block(a, a, random_hermitian(rng, dim));
        for (int b = a + 1; b <= channels; ++b) {
            Matrix m = random_matrix(rng, dim, dim);
            e.set_block(a, b, m);
            e.set_block(b, a, Matrix(m.adjoint()));
        }
    }
    BlockMatrix ve = qsc::promote(gauge.v(), dim) * e;
    double r = spectral_norm_power(ve.channel_flat());
    if (r > target) e = Complex(target / r, 0.0) * e;
    return e;
}

// Like the above but with the channel sub-block dominating the cross blocks:
// cross and scalar blocks are drawn small relative to the channel block.
inline BlockMatrix random_channel_dominant_family(std::mt19937_64& rng, int channels,
                                                  int dim, const qsc::Gauge& gauge,
                                                  double target) {
    // Scale the channel part first so the weak off-channel blocks stay weak
    // relative to it even when the raw channel draw happens to be small.
    BlockMatrix e(channels, dim);
    e.set_block(0, 0, Matrix::Zero(dim, dim));
    for (int i = 1; i <= channels; ++i) {
        e.set_block(0, i, Matrix::Zero(dim, dim));
        e.set_block(i, 0, Matrix::Zero(dim, dim));
        e.set_block(i, i, random_hermitian(rng, dim, 1.0));
        for (int j = i + 1; j <= channels; ++j) {
            Matrix c = random_matrix(rng, dim, dim, 1.0);
            e.set_block(i, j, c);
            e.set_block(j, i, Matrix(c.adjoint()));
        }
    }
    BlockMatrix ve = qsc::promote(gauge.v(), dim) * e;
    double r = spectral_norm_power(ve.channel_flat());
    if (r > 0.0) e = Complex(target / r, 0.0) * e;

    double channel_scale = 0.0;
    for (int i = 1; i <= channels; ++i)
        channel_scale = std::max(channel_scale, spectral_norm_power(e.block(i, i)));
    double weak = 0.2 * std::max(channel_scale, 1e-3);
    Matrix h = random_hermitian(rng, dim, 1.0);
    e.set_block(0, 0, Matrix((weak / std::max(spectral_norm_power(h), 1e-300)) * h));
    for (int i = 1; i <= channels; ++i) {
        Matrix m = random_matrix(rng, dim, dim, 1.0);
        m *= weak / std::max(spectral_norm_power(m), 1e-300);
        e.set_block(0, i, m);
        e.set_block(i, 0, Matrix(m.adjoint()));
    }
    return e;
}

// ----- error helpers -----

inline double rel_err(double measured, double scale) {
    return measured / std::max(1.0, scale);
}

inline double block_rel_err(const BlockMatrix& a, const BlockMatrix& b) {
    double diff = (a - b).op_norm();
    return diff / std::max(1.0, std::max(a.op_norm(), b.op_norm()));
}

inline double mat_rel_err(const Matrix& a, const Matrix& b) {
    double diff = qsc::op_norm(Matrix(a - b));
    return diff / std::max(1.0, std::max(qsc::op_norm(a), qsc::op_norm(b)));
}

}  // namespace oracle
