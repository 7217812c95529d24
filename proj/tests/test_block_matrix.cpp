#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qsc/block_matrix.hpp"
#include "qsc/errors.hpp"

#include <random>

using namespace qsc;

TEST_CASE("scalar matrix basics") {
    ScalarMatrix s = ScalarMatrix::identity(2);
    CHECK(s.channels() == 2);
    CHECK(s(0, 0) == Complex(1.0, 0.0));
    CHECK(s(1, 2) == Complex(0.0, 0.0));

    ScalarMatrix p = ScalarMatrix::channel_projector(2);
    CHECK(p(0, 0) == Complex(0.0, 0.0));
    CHECK(p(1, 1) == Complex(1.0, 0.0));
    CHECK(p(2, 2) == Complex(1.0, 0.0));

    ScalarMatrix q = ScalarMatrix::vacuum_projector(2);
    CHECK(q(0, 0) == Complex(1.0, 0.0));
    CHECK(q(2, 2) == Complex(0.0, 0.0));

    // projectors are complementary
    ScalarMatrix sum = p + q;
    CHECK((sum - s).op_norm() == doctest::Approx(0.0));
}

TEST_CASE("scalar matrix algebra and adjoint") {
    std::mt19937_64 rng(7);
    Matrix a = oracle::random_matrix(rng, 3, 3);
    Matrix b = oracle::random_matrix(rng, 3, 3);
    ScalarMatrix sa(2, a), sb(2, b);

    Matrix prod = (sa * sb).entries();
    CHECK(oracle::mat_rel_err(prod, Matrix(a * b)) < 1e-14);

    ScalarMatrix adj = (sa * sb).adjoint();
    CHECK(oracle::mat_rel_err(adj.entries(), Matrix((a * b).adjoint())) < 1e-14);

    CHECK(std::abs(sa.op_norm() - oracle::spectral_norm_power(a)) < 1e-9);
}

TEST_CASE("block matrix product matches triple-loop reference") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        int n = 1 + static_cast<int>(rng() % 3);
        int d = 1 + static_cast<int>(rng() % 3);
        BlockMatrix a(n, d), b(n, d);
        for (int r = 0; r <= n; ++r)
            for (int c = 0; c <= n; ++c) {
                a.set_block(r, c, oracle::random_matrix(rng, d, d));
                b.set_block(r, c, oracle::random_matrix(rng, d, d));
            }
        BlockMatrix fast = a * b;
        BlockMatrix slow = oracle::block_product_loops(a, b);
        CHECK(oracle::block_rel_err(fast, slow) < 1e-13);

        // adjoint interacts with products the usual way
        CHECK(oracle::block_rel_err((a * b).adjoint(), b.adjoint() * a.adjoint()) <
              1e-13);
    }
}

TEST_CASE("block get/set round-trip and flat layout") {
    BlockMatrix m(2, 2);
    Matrix x(2, 2);
    x << Complex(1, 2), Complex(3, 4), Complex(5, 6), Complex(7, 8);
    m.set_block(1, 2, x);
    CHECK(Matrix(m.block(1, 2) - x).norm() == doctest::Approx(0.0));
    CHECK(m.block(0, 0).norm() == doctest::Approx(0.0));
    CHECK(m.flat()(2, 4) == Complex(1, 2));  // block (1,2) starts at row d, col 2d

    BlockMatrix back = BlockMatrix::from_flat(2, 2, m.flat());
    CHECK(oracle::block_rel_err(back, m) == doctest::Approx(0.0));
}

TEST_CASE("op_norm agrees with power iteration") {
    std::mt19937_64 rng(13);
    BlockMatrix a(2, 2);
    for (int r = 0; r <= 2; ++r)
        for (int c = 0; c <= 2; ++c) a.set_block(r, c, oracle::random_matrix(rng, 2, 2));
    CHECK(std::abs(a.op_norm() - oracle::spectral_norm_power(a.flat())) < 1e-8);
    CHECK(a.max_block_norm() <= a.op_norm() + 1e-12);
}

TEST_CASE("promote embeds scalar matrices multiplicatively") {
    std::mt19937_64 rng(17);
    ScalarMatrix s(2, oracle::random_matrix(rng, 3, 3));
    ScalarMatrix r(2, oracle::random_matrix(rng, 3, 3));
    int d = 3;
    BlockMatrix lhs = promote(s, d) * promote(r, d);
    BlockMatrix rhs = promote(s * r, d);
    CHECK(oracle::block_rel_err(lhs, rhs) < 1e-13);

    // scalar-times-block equals promoted product
    BlockMatrix x(2, d);
    for (int a = 0; a <= 2; ++a)
        for (int b = 0; b <= 2; ++b) x.set_block(a, b, oracle::random_matrix(rng, d, d));
    CHECK(oracle::block_rel_err(s * x, promote(s, d) * x) < 1e-13);
    CHECK(oracle::block_rel_err(x * s, x * promote(s, d)) < 1e-13);
}

TEST_CASE("projection keeps the selected rows or columns") {
    std::mt19937_64 rng(19);
    BlockMatrix x(2, 2);
    for (int a = 0; a <= 2; ++a)
        for (int b = 0; b <= 2; ++b) x.set_block(a, b, oracle::random_matrix(rng, 2, 2));

    BlockMatrix left = project(x, Projector::channel, Side::left);
    CHECK(left.block(0, 1).norm() == doctest::Approx(0.0));
    CHECK(Matrix(left.block(1, 1) - x.block(1, 1)).norm() == doctest::Approx(0.0));

    BlockMatrix right = project(x, Projector::vacuum, Side::right);
    CHECK(right.block(1, 2).norm() == doctest::Approx(0.0));
    CHECK(Matrix(right.block(1, 0) - x.block(1, 0)).norm() == doctest::Approx(0.0));

    BlockMatrix same = project(x, Projector::identity, Side::left);
    CHECK(oracle::block_rel_err(same, x) == doctest::Approx(0.0));
}

TEST_CASE("guarded inverse works and flags singular input") {
    std::mt19937_64 rng(23);
    Matrix a = oracle::random_matrix(rng, 4, 4) + 5.0 * Matrix::Identity(4, 4);
    Matrix inv = guarded_inverse(a);
    CHECK(oracle::mat_rel_err(Matrix(a * inv), Matrix::Identity(4, 4)) < 1e-12);

    Matrix sing(2, 2);
    sing << 1, 1, 1, 1;
    CHECK_THROWS_AS(guarded_inverse(sing), SingularMatrixError);
    try {
        guarded_inverse(sing, 1e-12, "unit-test");
    } catch (const SingularMatrixError& ex) {
        CHECK(ex.rcond() < 1e-12);
        CHECK(std::string(ex.what()).find("unit-test") != std::string::npos);
    }
}

TEST_CASE("dimension mismatches are rejected") {
    BlockMatrix a(1, 2), b(2, 2);
    CHECK_THROWS_AS(a * b, std::invalid_argument);
    CHECK_THROWS_AS(a + b, std::invalid_argument);
    BlockMatrix m(1, 2);
    CHECK_THROWS_AS(m.block(2, 0), std::out_of_range);
    CHECK_THROWS_AS(m.set_block(0, 0, Matrix::Zero(3, 3)), std::invalid_argument);
}
