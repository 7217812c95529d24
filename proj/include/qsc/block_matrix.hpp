// Block operator matrices: (N+1)x(N+1) arrays of dxd complex blocks, stored flat.
// Index 0 is the vacuum row/column; 1..N are the noise channels.
#pragma once

#include <Eigen/Dense>

#include <complex>

namespace qsc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;  // dense complex matrix (initial-space operator)

// Spectral norm (largest singular value); 0x0 matrices have norm 0.
double op_norm(const Matrix& m);

// LU inverse guarded by a reciprocal-condition estimate.
// Throws SingularMatrixError when rcond < floor; `context` names the caller.
Matrix guarded_inverse(const Matrix& m, double rcond_floor = 1e-12,
                       const char* context = "guarded_inverse");
// Same decomposition, but only reports the reciprocal condition estimate.
double rcond_estimate(const Matrix& m);

// ----- scalar coefficient matrices -----

// (N+1)x(N+1) complex matrix acting on the index space {0..N} alone.
class ScalarMatrix {
public:
    ScalarMatrix() = default;
    explicit ScalarMatrix(int channels);  // zero matrix
    ScalarMatrix(int channels, const Matrix& entries);
    static ScalarMatrix identity(int channels);
    static ScalarMatrix channel_projector(int channels);  // diag(0, 1, ..., 1)
    static ScalarMatrix vacuum_projector(int channels);   // diag(1, 0, ..., 0)

    int channels() const { return channels_; }
    Complex operator()(int a, int b) const;
    void set(int a, int b, Complex v);
    const Matrix& entries() const { return m_; }
    // channel sub-block, rows/cols 1..N
    Matrix channel_block() const;

    ScalarMatrix adjoint() const;
    double op_norm() const;

    friend ScalarMatrix operator+(const ScalarMatrix& a, const ScalarMatrix& b);
    friend ScalarMatrix operator-(const ScalarMatrix& a, const ScalarMatrix& b);
    friend ScalarMatrix operator*(const ScalarMatrix& a, const ScalarMatrix& b);
    friend ScalarMatrix operator*(Complex c, const ScalarMatrix& a);

private:
    int channels_ = 0;
    Matrix m_;  // (N+1)x(N+1)
};

// ----- block operator matrices -----

// Projector choice for one-sided projections.
enum class Projector { channel, vacuum, identity };
enum class Side { left, right };

class BlockMatrix {
public:
    BlockMatrix() = default;
    BlockMatrix(int channels, int dim);  // zero matrix
    static BlockMatrix identity(int channels, int dim);
    static BlockMatrix from_flat(int channels, int dim, const Matrix& flat);

    int channels() const { return channels_; }  // N
    int dim() const { return dim_; }            // d
    int flat_size() const { return (channels_ + 1) * dim_; }

    Matrix block(int a, int b) const;  // dxd copy of block (a, b)
    void set_block(int a, int b, const Matrix& m);
    const Matrix& flat() const { return flat_; }
    // channel sub-matrix as an (N d)x(N d) flat matrix (rows/cols 1..N)
    Matrix channel_flat() const;

    // blockwise rule: (X†)_{ab} = (X_{ba})†
    BlockMatrix adjoint() const;

    double op_norm() const;         // spectral norm of the flat matrix
    double max_block_norm() const;  // max over blocks of the spectral norm

    friend BlockMatrix operator+(const BlockMatrix& a, const BlockMatrix& b);
    friend BlockMatrix operator-(const BlockMatrix& a, const BlockMatrix& b);
    friend BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b);
    friend BlockMatrix operator*(Complex c, const BlockMatrix& a);
    friend BlockMatrix operator*(const ScalarMatrix& s, const BlockMatrix& a);
    friend BlockMatrix operator*(const BlockMatrix& a, const ScalarMatrix& s);

private:
    int channels_ = 0, dim_ = 0;
    Matrix flat_;  // (N+1)d x (N+1)d
};

// s ⊗ 1_d as a BlockMatrix with blocks s(a,b)·1_d.
BlockMatrix promote(const ScalarMatrix& s, int dim);

// Multiply by the chosen projector on the given side.
BlockMatrix project(const BlockMatrix& x, Projector p, Side side);

}  // namespace qsc
