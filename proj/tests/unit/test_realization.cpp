#include <gtest/gtest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "vesselkit/realization.hpp"

using namespace vesselkit;

namespace {

Realization scalar_blaschke() {
    Realization r;
    r.a1 = from_rows({{-1.0}});
    r.b = from_rows({{1.0}});
    r.x = from_rows({{0.5}});
    r.sigma1 = from_rows({{1.0}});
    return r;
}

Realization zero_input(Eigen::Index n, Eigen::Index p) {
    Realization r;
    r.a1 = -identity(n);
    r.b = CMatrix::Zero(n, p);
    r.x = identity(n);
    r.sigma1 = identity(p);
    return r;
}

} // namespace

TEST(Transfer, BlaschkeValues) {
    const Realization r = scalar_blaschke();
    r.validate();
    EXPECT_LT(std::abs(eval_transfer(r, 1.0)(0, 0)), 1e-15);
    for (double w : {-3.0, -0.2, 0.0, 0.7, 5.0}) {
        const cplx lam(0.0, w);
        EXPECT_NEAR(std::abs(eval_transfer(r, lam)(0, 0)), 1.0, 1e-14);
        EXPECT_LT(std::abs(eval_transfer(r, lam)(0, 0) - (lam - 1.0) / (lam + 1.0)), 1e-14);
    }
}

TEST(Transfer, ValueAtInfinity) {
    std::mt19937_64 rng(4);
    const Realization r = oracle::random_realization(rng, 3, oracle::random_sigma1(rng, 2, false));
    EXPECT_LT(fro(eval_transfer(r, cplx(1e14, 3e13)) - identity(2)), 1e-10);
}

TEST(Transfer, PoleDetected) {
    try {
        eval_transfer(scalar_blaschke(), -1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::PoleAt);
    }
}

TEST(Transfer, DeterminantIdentity) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 20; ++t) {
        const Realization r = oracle::random_realization(rng, 3, oracle::random_sigma1(rng, 2, t % 2 == 0));
        EXPECT_LT(oracle::det_identity_residual(r, oracle::random_rhp(rng)), 1e-9);
    }
}

TEST(Kernel, BlaschkeValues) {
    const Realization r = scalar_blaschke();
    const KernelValue k11 = kernel_ks(r, 1.0, 1.0);
    EXPECT_NEAR(std::abs(k11.resolvent(0, 0) - 0.5), 0.0, 1e-14);
    ASSERT_TRUE(k11.quotient.has_value());
    EXPECT_NEAR(std::abs((*k11.quotient)(0, 0) - 0.5), 0.0, 1e-14);
    const KernelValue k21 = kernel_ks(r, 2.0, 1.0);
    EXPECT_NEAR(std::abs((*k21.quotient)(0, 0) - 1.0 / 3.0), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(k21.resolvent(0, 0) - 1.0 / 3.0), 0.0, 1e-14);
}

TEST(Kernel, IdentityTransferHasZeroKernel) {
    const Realization r = zero_input(2, 2);
    const KernelValue k = kernel_ks(r, cplx(1.0, 2.0), cplx(0.5, -1.0));
    EXPECT_EQ(fro(k.resolvent), 0.0);
    EXPECT_LT(fro(*k.quotient), 1e-15);
}

TEST(Kernel, DegenerateDenominatorKeepsResolventForm) {
    const Realization r = scalar_blaschke();
    const KernelValue k = kernel_ks(r, cplx(2.0, 1.0), cplx(-2.0, 1.0));
    EXPECT_FALSE(k.quotient.has_value());
    EXPECT_TRUE(all_finite(k.resolvent));
}

TEST(Kernel, QuotientMatchesResolventAtRandomPairs) {
    std::mt19937_64 rng(21);
    const Realization r = oracle::random_realization(rng, 4, oracle::random_sigma1(rng, 3, false));
    for (int t = 0; t < 100; ++t) {
        const KernelValue k = kernel_ks(r, oracle::random_rhp(rng), oracle::random_rhp(rng));
        ASSERT_TRUE(k.quotient.has_value());
        EXPECT_LT(k.mismatch, 1e-9);
    }
}

TEST(Kernel, GramIsPositiveForPositiveX) {
    std::mt19937_64 rng(23);
    const CMatrix sig = identity(2);
    const Realization r = oracle::random_realization(rng, 3, sig);
    ASSERT_TRUE(is_positive_definite(r.x, {1e-9, 0}).positive);
    const int m = 6;
    std::vector<cplx> ws;
    std::vector<CRow> xis;
    for (int i = 0; i < m; ++i) {
        ws.push_back(oracle::random_rhp(rng));
        xis.push_back(oracle::random_matrix(rng, 1, 2));
    }
    CMatrix g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) g(i, j) = (xis[i] * kernel_ks(r, ws[j], ws[i]).resolvent * xis[j].adjoint())(0, 0);
    EXPECT_GE(min_eigenvalue_hermitian(g), -1e-10);
}

TEST(Inner, BlaschkeIsInner) {
    std::vector<double> om;
    for (int k = 0; k <= 20; ++k) om.push_back(0.1 * std::pow(100.0, k / 20.0));
    const InnerResidual res = sigma1_inner_residual(scalar_blaschke(), om, {cplx(1.0, 1.0), 2.0});
    EXPECT_LT(res.axis, 1e-12);
    EXPECT_LE(res.rhp, 0.0);
}

TEST(Inner, IdentityIsTriviallyInner) {
    const InnerResidual res = sigma1_inner_residual(zero_input(2, 2), {0.1, 1.0, 10.0}, {cplx(1.0, 0.0)});
    EXPECT_EQ(res.axis, 0.0);
}

TEST(Moments, BlaschkeSequence) {
    const Realization r = scalar_blaschke();
    EXPECT_LT(std::abs(markov_moment(r, 0)(0, 0) - 2.0), 1e-15);
    EXPECT_LT(std::abs(markov_moment(r, 1)(0, 0) + 2.0), 1e-15);
    EXPECT_LT(std::abs(markov_moment(r, 2)(0, 0) - 2.0), 1e-15);
    const auto hs = markov_moments(r, 8);
    for (std::size_t i = 0; i + 1 < hs.size(); ++i) EXPECT_LT(std::abs(hs[i + 1](0, 0) + hs[i](0, 0)), 1e-14);
}

TEST(Moments, ZeroInput) {
    for (const auto& h : markov_moments(zero_input(2, 3), 5)) EXPECT_EQ(fro(h), 0.0);
}

TEST(Moments, LaurentExpansionAtLargeLambda) {
    std::mt19937_64 rng(31);
    const Realization r = oracle::random_realization(rng, 3, oracle::random_sigma1(rng, 2, false));
    const auto hs = markov_moments(r, 40);
    const cplx lam(25.0, 10.0);
    CMatrix sum = identity(2);
    cplx pw = 1.0 / lam;
    for (const auto& h : hs) {
        sum -= pw * h;
        pw /= lam;
    }
    EXPECT_LT(fro(sum - eval_transfer(r, lam)), 1e-12);
}

TEST(Pick, BlaschkeBlocks) {
    const Realization r = scalar_blaschke();
    EXPECT_LT(std::abs(pick_matrix(r, 0)(0, 0) - 2.0), 1e-15);
    const CMatrix p1 = pick_matrix(r, 1);
    EXPECT_LT(fro(p1 - from_rows({{2.0, -2.0}, {-2.0, 2.0}})), 1e-14);
    EXPECT_GE(min_eigenvalue_hermitian(p1), -1e-14);
    EXPECT_EQ(fro(pick_matrix(zero_input(2, 2), 2)), 0.0);
}

TEST(Lyapunov, RandomRealizationsSatisfyIt) {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 20; ++t) {
        const Realization r = oracle::random_realization(rng, 4, oracle::random_sigma1(rng, 3, false));
        EXPECT_LE(r.lyapunov_residual(), 1e-10 * r.lyapunov_scale());
        EXPECT_NO_THROW(r.validate());
    }
}
