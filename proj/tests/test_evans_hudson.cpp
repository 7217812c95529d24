#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qsc/conversion.hpp"
#include "qsc/evans_hudson.hpp"
#include "qsc/unitarity.hpp"

#include <random>

using namespace qsc;

namespace {

struct Model {
    BlockMatrix e;
    Gauge gauge;
    Conversion conv;
};

Model draw(std::mt19937_64& rng, int n, int d, bool with_z) {
    Gauge gauge(n);
    if (with_z) gauge = Gauge(n, oracle::random_hermitian(rng, n, 0.3));
    Model m;
    m.e = oracle::random_hermitian_family(rng, n, d, gauge, 0.45);
    m.gauge = gauge;
    m.conv = strat_to_ito(Complex(0.0, -1.0) * m.e, gauge);
    return m;
}

}  // namespace

TEST_CASE("direct and transfer-matrix forms of the flow generator agree") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 1 + static_cast<int>(rng() % 3);
        int d = 1 + static_cast<int>(rng() % 3);
        Model m = draw(rng, n, d, trial % 2 == 1);
        Matrix x = oracle::random_hermitian(rng, d);
        for (int a = 0; a <= n; ++a)
            for (int b = 0; b <= n; ++b) {
                Matrix direct = eh_from_ito(m.conv.ito, a, b, x);
                Matrix transfer = eh_from_transfer(m.e, m.conv.f_mat, a, b, x);
                CHECK(oracle::mat_rel_err(direct, transfer) < 1e-11);
            }
    }
}

TEST_CASE("single-channel closed form agrees with the generic path") {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 8; ++trial) {
        int d = 1 + static_cast<int>(rng() % 3);
        Matrix e00 = oracle::random_hermitian(rng, d, 0.5);
        Matrix e11 = oracle::random_hermitian(rng, d, 0.5);
        Matrix e10 = oracle::random_matrix(rng, d, d, 0.5);
        Matrix e01 = e10.adjoint();
        Complex kappa(0.5, trial % 2 ? -0.2 : 0.0);
        Matrix x = oracle::random_hermitian(rng, d);

        BlockMatrix e(1, d);
        e.set_block(0, 0, e00);
        e.set_block(0, 1, e01);
        e.set_block(1, 0, e10);
        e.set_block(1, 1, e11);
        Matrix kap(1, 1);
        kap << kappa;
        Gauge gauge = gauge_from_kappa(kap);
        Conversion conv = strat_to_ito(Complex(0.0, -1.0) * e, gauge);

        for (int a = 0; a <= 1; ++a)
            for (int b = 0; b <= 1; ++b) {
                Matrix closed = eh_single_channel(e00, e01, e10, e11, kappa, a, b, x);
                Matrix direct = eh_from_ito(conv.ito, a, b, x);
                CHECK(oracle::mat_rel_err(closed, direct) < 1e-10);
            }
    }
}

TEST_CASE("generator object matches the free functions and caches by blocks") {
    std::mt19937_64 rng(79);
    Model m = draw(rng, 2, 2, true);
    Matrix x = oracle::random_matrix(rng, 2, 2);  // arbitrary, not Hermitian
    EHGenerator gen = EHGenerator::from_ito(m.conv.ito);
    EHGenerator gen2 = EHGenerator::from_hamiltonian(Complex(0.0, -1.0) * m.e, m.gauge);
    CHECK(gen.channels() == 2);
    CHECK(gen.dim() == 2);
    for (int a = 0; a <= 2; ++a)
        for (int b = 0; b <= 2; ++b) {
            CHECK(oracle::mat_rel_err(gen.apply(a, b, x),
                                      eh_from_ito(m.conv.ito, a, b, x)) < 1e-12);
            CHECK(oracle::mat_rel_err(gen.apply(a, b, x), gen2.apply(a, b, x)) < 1e-10);
        }
}

TEST_CASE("superoperator matrix implements apply through vectorization") {
    std::mt19937_64 rng(83);
    Model m = draw(rng, 1, 3, false);
    EHGenerator gen = EHGenerator::from_ito(m.conv.ito);
    Matrix x = oracle::random_matrix(rng, 3, 3);
    for (int a = 0; a <= 1; ++a)
        for (int b = 0; b <= 1; ++b) {
            Matrix s = gen.superoperator(a, b);
            REQUIRE(s.rows() == 9);
            // column-major vec
            Eigen::VectorXcd vx(9);
            for (int c = 0; c < 3; ++c)
                for (int r = 0; r < 3; ++r) vx(c * 3 + r) = x(r, c);
            Eigen::VectorXcd vy = s * vx;
            Matrix y(3, 3);
            for (int c = 0; c < 3; ++c)
                for (int r = 0; r < 3; ++r) y(r, c) = vy(c * 3 + r);
            CHECK(oracle::mat_rel_err(y, gen.apply(a, b, x)) < 1e-12);
        }
}

TEST_CASE("vacuum component is a lindblad-type map") {
    std::mt19937_64 rng(89);
    Model m = draw(rng, 2, 3, false);
    EHGenerator gen = EHGenerator::from_ito(m.conv.ito);

    // unital: identity is annihilated
    Matrix one = Matrix::Identity(3, 3);
    CHECK(op_norm(gen.apply(0, 0, one)) < 1e-10);

    // real: maps Hermitian observables to Hermitian observables
    Matrix x = oracle::random_hermitian(rng, 3);
    Matrix y = gen.apply(0, 0, x);
    CHECK(oracle::mat_rel_err(y, Matrix(y.adjoint())) < 1e-11);
}

TEST_CASE("dissipation identity holds for the full block family") {
    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 6; ++trial) {
        int n = 1 + static_cast<int>(rng() % 2);
        int d = 2;
        Model m = draw(rng, n, d, trial % 2 == 0);
        EHGenerator gen = EHGenerator::from_ito(m.conv.ito);
        Matrix x = oracle::random_matrix(rng, d, d);
        Matrix y = oracle::random_matrix(rng, d, d);
        for (int a = 0; a <= n; ++a)
            for (int b = 0; b <= n; ++b)
                CHECK(dissipation_residual(gen, a, b, x, y) < 1e-11);
    }
}

TEST_CASE("adjoint symmetry across transposed block indices") {
    std::mt19937_64 rng(103);
    Model m = draw(rng, 2, 2, true);
    EHGenerator gen = EHGenerator::from_ito(m.conv.ito);
    Matrix x = oracle::random_matrix(rng, 2, 2);
    for (int a = 0; a <= 2; ++a)
        for (int b = 0; b <= 2; ++b)
            CHECK(adjoint_symmetry_residual(gen, a, b, x) < 1e-11);
}

TEST_CASE("admissibility guard rejects arbitrary coefficients") {
    std::mt19937_64 rng(107);
    BlockMatrix g(1, 2);
    for (int a = 0; a <= 1; ++a)
        for (int b = 0; b <= 1; ++b) g.set_block(a, b, oracle::random_matrix(rng, 2, 2));
    CHECK_THROWS_AS(EHGenerator::from_ito(g), std::invalid_argument);
}
