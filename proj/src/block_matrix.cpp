#include "qsc/block_matrix.hpp"

#include "qsc/errors.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>
#include <string>

namespace qsc {

double op_norm(const Matrix& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

Matrix guarded_inverse(const Matrix& m, double rcond_floor, const char* context) {
    if (m.rows() != m.cols())
        throw std::invalid_argument(std::string(context) + ": matrix is not square");
    Eigen::PartialPivLU<Matrix> lu(m);
    double rc = lu.rcond();
    if (!std::isfinite(rc)) rc = 0.0;  // exactly singular input yields NaN
    if (!(rc >= rcond_floor))
        throw SingularMatrixError(std::string(context) + ": reciprocal condition " +
                                      std::to_string(rc) + " below floor " +
                                      std::to_string(rcond_floor),
                                  rc);
    return lu.inverse();
}

double rcond_estimate(const Matrix& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("rcond_estimate: matrix is not square");
    Eigen::PartialPivLU<Matrix> lu(m);
    double rc = lu.rcond();
    return std::isfinite(rc) ? rc : 0.0;
}

// ----- ScalarMatrix -----

ScalarMatrix::ScalarMatrix(int channels) : channels_(channels) {
    if (channels < 0) throw std::invalid_argument("ScalarMatrix: negative channel count");
    m_ = Matrix::Zero(channels + 1, channels + 1);
}

ScalarMatrix::ScalarMatrix(int channels, const Matrix& entries) : channels_(channels) {
    if (channels < 0) throw std::invalid_argument("ScalarMatrix: negative channel count");
    if (entries.rows() != channels + 1 || entries.cols() != channels + 1)
        throw std::invalid_argument("ScalarMatrix: entries must be (N+1)x(N+1)");
    m_ = entries;
}

ScalarMatrix ScalarMatrix::identity(int channels) {
    ScalarMatrix s(channels);
    s.m_ = Matrix::Identity(channels + 1, channels + 1);
    return s;
}

ScalarMatrix ScalarMatrix::channel_projector(int channels) {
    ScalarMatrix s(channels);
    for (int i = 1; i <= channels; ++i) s.m_(i, i) = 1.0;
    return s;
}

ScalarMatrix ScalarMatrix::vacuum_projector(int channels) {
    ScalarMatrix s(channels);
    s.m_(0, 0) = 1.0;
    return s;
}

Complex ScalarMatrix::operator()(int a, int b) const {
    if (a < 0 || a > channels_ || b < 0 || b > channels_)
        throw std::out_of_range("ScalarMatrix: index out of range");
    return m_(a, b);
}

void ScalarMatrix::set(int a, int b, Complex v) {
    if (a < 0 || a > channels_ || b < 0 || b > channels_)
        throw std::out_of_range("ScalarMatrix: index out of range");
    m_(a, b) = v;
}

Matrix ScalarMatrix::channel_block() const {
    return m_.block(1, 1, channels_, channels_);
}

ScalarMatrix ScalarMatrix::adjoint() const {
    return ScalarMatrix(channels_, m_.adjoint());
}

double ScalarMatrix::op_norm() const { return qsc::op_norm(m_); }

static void check_same_channels(const ScalarMatrix& a, const ScalarMatrix& b,
                                const char* what) {
    if (a.channels() != b.channels())
        throw std::invalid_argument(std::string(what) + ": channel count mismatch");
}

ScalarMatrix operator+(const ScalarMatrix& a, const ScalarMatrix& b) {
    check_same_channels(a, b, "ScalarMatrix+");
    return ScalarMatrix(a.channels_, a.m_ + b.m_);
}

ScalarMatrix operator-(const ScalarMatrix& a, const ScalarMatrix& b) {
    check_same_channels(a, b, "ScalarMatrix-");
    return ScalarMatrix(a.channels_, a.m_ - b.m_);
}

ScalarMatrix operator*(const ScalarMatrix& a, const ScalarMatrix& b) {
    check_same_channels(a, b, "ScalarMatrix*");
    return ScalarMatrix(a.channels_, a.m_ * b.m_);
}

ScalarMatrix operator*(Complex c, const ScalarMatrix& a) {
    return ScalarMatrix(a.channels_, c * a.m_);
}

// ----- BlockMatrix -----

BlockMatrix::BlockMatrix(int channels, int dim) : channels_(channels), dim_(dim) {
    if (channels < 0 || dim <= 0)
        throw std::invalid_argument("BlockMatrix: need channels >= 0 and dim >= 1");
    flat_ = Matrix::Zero(flat_size(), flat_size());
}

BlockMatrix BlockMatrix::identity(int channels, int dim) {
    BlockMatrix x(channels, dim);
    x.flat_ = Matrix::Identity(x.flat_size(), x.flat_size());
    return x;
}

BlockMatrix BlockMatrix::from_flat(int channels, int dim, const Matrix& flat) {
    BlockMatrix x(channels, dim);
    if (flat.rows() != x.flat_size() || flat.cols() != x.flat_size())
        throw std::invalid_argument("BlockMatrix::from_flat: wrong flat size");
    x.flat_ = flat;
    return x;
}

Matrix BlockMatrix::block(int a, int b) const {
    if (a < 0 || a > channels_ || b < 0 || b > channels_)
        throw std::out_of_range("BlockMatrix::block: index out of range");
    return flat_.block(a * dim_, b * dim_, dim_, dim_);
}

void BlockMatrix::set_block(int a, int b, const Matrix& m) {
    if (a < 0 || a > channels_ || b < 0 || b > channels_)
        throw std::out_of_range("BlockMatrix::set_block: index out of range");
    if (m.rows() != dim_ || m.cols() != dim_)
        throw std::invalid_argument("BlockMatrix::set_block: block must be dxd");
    flat_.block(a * dim_, b * dim_, dim_, dim_) = m;
}

Matrix BlockMatrix::channel_flat() const {
    return flat_.block(dim_, dim_, channels_ * dim_, channels_ * dim_);
}

BlockMatrix BlockMatrix::adjoint() const {
    // flat adjoint realizes (X†)_{ab} = (X_{ba})† blockwise
    return from_flat(channels_, dim_, flat_.adjoint());
}

double BlockMatrix::op_norm() const { return qsc::op_norm(flat_); }

double BlockMatrix::max_block_norm() const {
    double best = 0.0;
    for (int a = 0; a <= channels_; ++a)
        for (int b = 0; b <= channels_; ++b)
            best = std::max(best, qsc::op_norm(block(a, b)));
    return best;
}

static void check_same_shape(const BlockMatrix& a, const BlockMatrix& b,
                             const char* what) {
    if (a.channels() != b.channels() || a.dim() != b.dim())
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

BlockMatrix operator+(const BlockMatrix& a, const BlockMatrix& b) {
    check_same_shape(a, b, "BlockMatrix+");
    return BlockMatrix::from_flat(a.channels_, a.dim_, a.flat_ + b.flat_);
}

BlockMatrix operator-(const BlockMatrix& a, const BlockMatrix& b) {
    check_same_shape(a, b, "BlockMatrix-");
    return BlockMatrix::from_flat(a.channels_, a.dim_, a.flat_ - b.flat_);
}

BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b) {
    check_same_shape(a, b, "BlockMatrix*");
    return BlockMatrix::from_flat(a.channels_, a.dim_, a.flat_ * b.flat_);
}

BlockMatrix operator*(Complex c, const BlockMatrix& a) {
    return BlockMatrix::from_flat(a.channels_, a.dim_, c * a.flat_);
}

BlockMatrix operator*(const ScalarMatrix& s, const BlockMatrix& a) {
    if (s.channels() != a.channels())
        throw std::invalid_argument("ScalarMatrix*BlockMatrix: channel count mismatch");
    return promote(s, a.dim_) * a;
}

BlockMatrix operator*(const BlockMatrix& a, const ScalarMatrix& s) {
    if (s.channels() != a.channels())
        throw std::invalid_argument("BlockMatrix*ScalarMatrix: channel count mismatch");
    return a * promote(s, a.dim_);
}

BlockMatrix promote(const ScalarMatrix& s, int dim) {
    BlockMatrix x(s.channels(), dim);
    Matrix id = Matrix::Identity(dim, dim);
    for (int a = 0; a <= s.channels(); ++a)
        for (int b = 0; b <= s.channels(); ++b)
            if (s(a, b) != Complex(0.0)) x.set_block(a, b, s(a, b) * id);
    return x;
}

BlockMatrix project(const BlockMatrix& x, Projector p, Side side) {
    if (p == Projector::identity) return x;
    ScalarMatrix m = (p == Projector::channel)
                         ? ScalarMatrix::channel_projector(x.channels())
                         : ScalarMatrix::vacuum_projector(x.channels());
    return side == Side::left ? m * x : x * m;
}

}  // namespace qsc
