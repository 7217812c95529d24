#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "qsc/conversion.hpp"
#include "qsc/unitarity.hpp"

#include <random>

using namespace qsc;

namespace {

HPParams random_hp(std::mt19937_64& rng, int n, int d) {
    HPParams p;
    p.w.assign(static_cast<size_t>(n), std::vector<Matrix>(static_cast<size_t>(n)));
    // block-unitary W: embed a random nd x nd unitary
    Matrix big = oracle::random_unitary(rng, n * d);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            p.w[static_cast<size_t>(i)][static_cast<size_t>(j)] =
                big.block(i * d, j * d, d, d);
    p.l.clear();
    for (int i = 0; i < n; ++i) p.l.push_back(oracle::random_matrix(rng, d, d, 0.7));
    p.h = oracle::random_hermitian(rng, d);
    return p;
}

}  // namespace

TEST_CASE("generators assembled from unitary data satisfy both identities") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 12; ++trial) {
        int n = 1 + static_cast<int>(rng() % 3);
        int d = 1 + static_cast<int>(rng() % 3);
        HPParams p = random_hp(rng, n, d);
        BlockMatrix g = ito_from_hp(p);
        UnitarityResiduals res = unitarity_residuals(g);
        double scale = 1.0 + g.op_norm() * g.op_norm();
        CHECK(res.isometry < 1e-12 * scale);
        CHECK(res.coisometry < 1e-12 * scale);
    }
}

TEST_CASE("parameter extraction inverts assembly") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 8; ++trial) {
        int n = 1 + static_cast<int>(rng() % 2);
        int d = 1 + static_cast<int>(rng() % 3);
        HPParams p = random_hp(rng, n, d);
        BlockMatrix g = ito_from_hp(p);
        HPExtraction ex = hp_from_ito(g);
        CHECK(ex.h_defect < 1e-10);
        for (int i = 0; i < n; ++i) {
            CHECK(oracle::mat_rel_err(ex.params.l[static_cast<size_t>(i)],
                                      p.l[static_cast<size_t>(i)]) < 1e-10);
            for (int j = 0; j < n; ++j)
                CHECK(oracle::mat_rel_err(
                          ex.params.w[static_cast<size_t>(i)][static_cast<size_t>(j)],
                          p.w[static_cast<size_t>(i)][static_cast<size_t>(j)]) < 1e-10);
        }
        CHECK(oracle::mat_rel_err(ex.params.h, p.h) < 1e-9);
    }
}

TEST_CASE("hamiltonian models convert to unitary generators") {
    std::mt19937_64 rng(47);
    for (int trial = 0; trial < 12; ++trial) {
        int n = 1 + static_cast<int>(rng() % 3);
        int d = 1 + static_cast<int>(rng() % 3);
        Gauge gauge(n);
        if (trial % 2 == 1) gauge = Gauge(n, oracle::random_hermitian(rng, n, 0.3));
        BlockMatrix e = oracle::random_hermitian_family(rng, n, d, gauge, 0.45);
        Conversion c = strat_to_ito(Complex(0.0, -1.0) * e, gauge);
        UnitarityResiduals res = unitarity_residuals(c.ito);
        double scale = 1.0 + c.ito.op_norm() * c.ito.op_norm();
        CHECK(res.isometry < 1e-10 * scale);
        CHECK(res.coisometry < 1e-10 * scale);

        // the extracted scattering block is unitary
        HPExtraction ex = hp_from_ito(c.ito);
        Matrix w(n * d, n * d);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                w.block(i * d, j * d, d, d) =
                    ex.params.w[static_cast<size_t>(i)][static_cast<size_t>(j)];
        CHECK(oracle::mat_rel_err(Matrix(w.adjoint() * w),
                                  Matrix::Identity(n * d, n * d)) < 1e-9);
    }
}

TEST_CASE("extraction refuses non-unitary generators") {
    std::mt19937_64 rng(53);
    BlockMatrix g(1, 2);
    for (int a = 0; a <= 1; ++a)
        for (int b = 0; b <= 1; ++b) g.set_block(a, b, oracle::random_matrix(rng, 2, 2));
    CHECK_THROWS_AS(hp_from_ito(g), std::invalid_argument);
}

TEST_CASE("single-channel closed forms match the generic path") {
    std::mt19937_64 rng(59);
    for (int trial = 0; trial < 10; ++trial) {
        int d = 1 + static_cast<int>(rng() % 4);
        Matrix e00 = oracle::random_hermitian(rng, d);
        Matrix e11 = oracle::random_hermitian(rng, d);
        Matrix e10 = oracle::random_matrix(rng, d, d, 0.6);
        Matrix e01 = e10.adjoint();
        Complex kappa(0.5, trial % 2 ? 0.35 : 0.0);

        // scale so the picture change is well inside its convergence region
        double nrm = oracle::spectral_norm_power(e11);
        if (std::abs(kappa) * nrm > 0.8) {
            double s = 0.8 / (std::abs(kappa) * nrm);
            e00 *= s; e11 *= s; e10 *= s; e01 *= s;
        }

        HPParams closed = hp_single_channel(e00, e01, e10, e11, kappa);

        BlockMatrix e(1, d);
        e.set_block(0, 0, e00);
        e.set_block(0, 1, e01);
        e.set_block(1, 0, e10);
        e.set_block(1, 1, e11);
        Matrix kap(1, 1);
        kap << kappa;
        Gauge gauge = gauge_from_kappa(kap);
        Conversion c = strat_to_ito(Complex(0.0, -1.0) * e, gauge);
        HPExtraction generic = hp_from_ito(c.ito);

        CHECK(oracle::mat_rel_err(closed.w[0][0], generic.params.w[0][0]) < 1e-10);
        CHECK(oracle::mat_rel_err(closed.l[0], generic.params.l[0]) < 1e-10);
        CHECK(oracle::mat_rel_err(closed.h, generic.params.h) < 1e-9);

        // transfer components against the full matrix
        FComponentsN1 fc = f_components_n1(e00, e01, e10, e11, kappa);
        CHECK(oracle::mat_rel_err(fc.f00, c.f_mat.block(0, 0)) < 1e-10);
        CHECK(oracle::mat_rel_err(fc.f01, c.f_mat.block(0, 1)) < 1e-10);
        CHECK(oracle::mat_rel_err(fc.f10, c.f_mat.block(1, 0)) < 1e-10);
        CHECK(oracle::mat_rel_err(fc.f11, c.f_mat.block(1, 1)) < 1e-10);
    }
}
