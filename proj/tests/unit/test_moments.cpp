#include <gtest/gtest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "vesselkit/models.hpp"
#include "vesselkit/moments.hpp"

using namespace vesselkit;

namespace {

const CMatrix one = from_rows({{1.0}});

VesselTrajectory fix_b() {
    Realization r;
    r.a1 = from_rows({{-1.0}});
    r.b = one;
    r.x = from_rows({{0.5}});
    r.sigma1 = one;
    return evolve_vessel(r, VesselParams::constant(0.0, 1.0, one, one, CMatrix::Zero(1, 1)), 0.0,
                         ODEGrid{0.0, 1.0, 200});
}

VesselTrajectory fix_c(std::size_t steps = 1000) {
    Realization r;
    r.a1 = from_rows({{-1.0}});
    r.b = from_rows({{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}});
    r.x = from_rows({{0.5}});
    r.sigma1 = sl_sigma1();
    return evolve_vessel(r, sl_vessel_params(0.0, 1.0), 0.0, ODEGrid{0.0, 1.0, steps});
}

VesselParams two_port_params() {
    return VesselParams::constant(0.0, 1.0, identity(2), from_rows({{1.0, 0.0}, {0.0, -1.0}}),
                                  from_rows({{cplx(0, 0.3), 0.0}, {0.0, cplx(0, -0.2)}}));
}

VesselTrajectory two_port(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    return evolve_vessel(oracle::random_realization(rng, static_cast<Eigen::Index>(n), identity(2)),
                         two_port_params(), 0.0, ODEGrid{0.0, 1.0, 500});
}

double max_relative(const MomentSequence& seq, const VesselTrajectory& tr) {
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const auto ref = markov_moments(tr.snapshot(k), seq.levels());
        for (std::size_t i = 0; i < ref.size(); ++i)
            worst = std::max(worst, fro(ref[i] - seq.h[k][i]) / (1.0 + fro(ref[i])));
    }
    return worst;
}

} // namespace

TEST(Moments, FixBAlternate) {
    const auto tr = fix_b();
    for (double t : {0.0, 0.6, 1.0}) {
        const auto h = moments_from_trajectory(tr, t, 5);
        ASSERT_EQ(h.size(), 6u);
        for (std::size_t i = 0; i < h.size(); ++i)
            EXPECT_NEAR(std::abs(h[i](0, 0) - 2.0 * std::pow(-1.0, static_cast<double>(i))), 0.0, 1e-9);
    }
}

TEST(Moments, EmptyStateGivesZero) {
    const auto tr = evolve_vessel(Realization::identity(sl_sigma1()), sl_vessel_params(0.0, 1.0), 0.0,
                                  ODEGrid{0.0, 1.0, 10});
    for (const auto& h : moments_from_trajectory(tr, 0.5, 3)) EXPECT_EQ(fro(h), 0.0);
    EXPECT_EQ(recursion_residual(tr, 0.5, 1), 0.0);
}

TEST(Moments, FixCFirstMomentShape) {
    const auto tr = fix_c();
    const SLModel m = SLModel::from_trajectory(std::make_shared<const VesselTrajectory>(tr));
    for (double t : {0.0, 0.5}) {
        const CMatrix h0 = moments_from_trajectory(tr, t, 0)[0];
        EXPECT_NEAR(std::abs(h0(0, 1) + m.beta_at(t)), 0.0, 1e-10);
        EXPECT_NEAR(std::abs(h0(0, 0) - h0(1, 1) + kI * m.pi11(t)), 0.0, 1e-8);
        // H0 sigma1^{-1} Hermitian
        EXPECT_LE(hermitian_defect(h0 * sl_sigma1()), 1e-12);
    }
    // trace is conserved
    EXPECT_NEAR(std::abs(moments_from_trajectory(tr, 0.0, 0)[0].trace() - moments_from_trajectory(tr, 1.0, 0)[0].trace()),
                0.0, 1e-6);
}

TEST(Linkage, HoldsAndDetectsCorruption) {
    EXPECT_LE(linkage_residual(fix_b(), 0.5), 1e-12);
    const auto tr = fix_c();
    EXPECT_LE(linkage_residual(tr, 0.3), 1e-8);
    const std::size_t k = tr.index_of(0.3);
    CMatrix h0 = markov_moment(tr.snapshot(k), 0);
    h0(0, 0) += 0.1; // H0^{21} is free data and does not enter the linkage
    EXPECT_GT(linkage_residual(tr.params, tr.t[k], tr.gamma_star[k], h0), 1e-2);
}

TEST(Recursion, FixBAndFixC) {
    for (std::size_t i = 0; i < 4; ++i) EXPECT_LE(recursion_residual(fix_b(), 0.5, i), 1e-10);
    const auto tr = fix_c();
    for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(recursion_residual(tr, 0.4, i), 1e-7);
}

TEST(Recursion, TwoPortThreeStates) {
    std::mt19937_64 rng(21);
    const auto tr = evolve_vessel(oracle::random_realization(rng, 3, identity(2)), two_port_params(), 0.0,
                                  ODEGrid{0.0, 1.0, 2000});
    for (std::size_t i = 0; i <= 4; ++i)
        for (double t : {0.0, 0.5, 1.0}) {
            const double scale = 1.0 + fro(moments_from_trajectory(tr, t, i + 1)[i + 1]);
            EXPECT_LE(recursion_residual(tr, t, i), 1e-9 * scale);
        }
}

TEST(Recursion, DerivativeMatchesDifferences) {
    const auto tr = two_port(2, 4);
    const std::size_t k = 250;
    const double h = tr.grid.step();
    auto hm = [&](std::size_t j) { return markov_moment(tr.snapshot(j), 2); };
    const CMatrix fd = (-hm(k + 2) + 8.0 * hm(k + 1) - 8.0 * hm(k - 1) + hm(k - 2)) / (12 * h);
    EXPECT_LE(fro(moment_derivative(tr, k, 2) - fd), 1e-7 * (1.0 + fro(fd)));
}

TEST(Algebraic, ScalarAlternatingSequence) {
    std::vector<CMatrix> h;
    for (int i = 0; i < 9; ++i) h.push_back(from_rows({{2.0 * std::pow(-1.0, i)}}));
    EXPECT_EQ(algebraic_residual(h, one), 0.0);
    std::vector<CMatrix> zeros(5, CMatrix::Zero(2, 2));
    EXPECT_EQ(algebraic_residual(zeros, identity(2)), 0.0);
}

TEST(Algebraic, RandomRealizations) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index p = 1 + trial % 3;
        const CMatrix s1 = oracle::random_sigma1(rng, p, trial % 2 == 0);
        const auto r = oracle::random_realization(rng, 1 + trial % 4, s1);
        const auto h = markov_moments(r, 10);
        double scale = 1.0;
        for (const auto& m : h) scale = std::max(scale, fro(m) * fro(m));
        EXPECT_LE(algebraic_residual(h, s1), 1e-9 * scale);
        EXPECT_LE(hlin_residual(h, r.a1), 1e-8);
    }
}

TEST(Algebraic, CorruptedMomentDetected) {
    std::mt19937_64 rng(2);
    const auto r = oracle::random_realization(rng, 3, identity(2));
    auto h = markov_moments(r, 6);
    h[3](0, 1) += 0.05;
    EXPECT_GT(algebraic_residual(h, identity(2)), 1e-3);
    EXPECT_GT(hlin_residual(h, r.a1), 1e-6);
}

TEST(Commutator, DiagonalClosedForm) {
    const CMatrix c = from_rows({{0.5, 0.0, 0.0}, {0.0, -1.0, 0.0}, {0.0, 0.0, 2.0}});
    std::mt19937_64 rng(8);
    CMatrix rhs = oracle::random_matrix(rng, 3, 3);
    rhs.diagonal().setZero();
    const auto rep = solve_commutator_step(c, rhs);
    EXPECT_EQ(rep.n0, 3u);
    for (Eigen::Index k = 0; k < 3; ++k)
        for (Eigen::Index j = 0; j < 3; ++j)
            if (k != j) EXPECT_NEAR(std::abs(rep.particular(k, j) - rhs(k, j) / (c(k, k) - c(j, j))), 0.0, 1e-10);
    // particular plus any kernel combination still solves the equation
    CMatrix h = rep.particular;
    for (std::size_t b = 0; b < rep.nullspace_basis.size(); ++b) h += cplx(0.3 * b, -1.0) * rep.nullspace_basis[b];
    EXPECT_LE(fro(c * h - h * c - rhs), 1e-9);
}

TEST(Commutator, IdentityHasFullKernel) {
    const auto rep = solve_commutator_step(identity(2), CMatrix::Zero(2, 2));
    EXPECT_EQ(rep.n0, 4u);
    EXPECT_THROW(solve_commutator_step(identity(2), identity(2)), Error);
}

TEST(Commutator, SturmLiouvilleKernelDimension) {
    const CMatrix c = sl_sigma1().inverse() * sl_sigma2();
    EXPECT_LE(fro(c - from_rows({{0.0, 0.0}, {1.0, 0.0}})), 0.0);
    const auto rep = solve_commutator_step(c, CMatrix::Zero(2, 2));
    EXPECT_EQ(rep.n0, 2u);
}

TEST(Commutator, InconsistentRightSide) {
    const CMatrix c = from_rows({{0.0, 0.0}, {1.0, 0.0}});
    // C H - H C always has equal and opposite diagonal entries and zero (1,2) entry
    try {
        solve_commutator_step(c, from_rows({{0.0, 1.0}, {0.0, 0.0}}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotInRange);
        EXPECT_NEAR(e.value(), 1.0, 1e-9);
    }
}

TEST(GenerateSL, ZeroBetaZeroData) {
    const auto seq = generate_moments_sl([](double, std::size_t o) { return Jet::constant(0.0, o); },
                                         ODEGrid{0.0, 1.0, 50}, 0.0, std::vector<SLLevelData>(3, {0.0, 0.0}));
    for (const auto& hs : seq.h)
        for (const auto& h : hs) EXPECT_EQ(fro(h), 0.0);
}

TEST(GenerateSL, MinusTanhFirstLevel) {
    const ScalarFunction beta = parse_expr("-tanh");
    const auto seq = generate_moments_sl(beta, ODEGrid{0.0, 1.0, 200}, 0.0, {{2.0, 0.7}, {0.1, 0.2}});
    for (std::size_t k = 0; k < seq.t.size(); k += 20) {
        const double t = seq.t[k];
        EXPECT_NEAR(std::abs(seq.h[k][0](0, 1) - std::tanh(t)), 0.0, 1e-14);
        // tau = cosh: tau''''/tau - (tau''/tau)^2 = 0, so h21 of H0 stays put
        EXPECT_NEAR(std::abs(seq.h[k][0](1, 0) - 0.7), 0.0, 1e-12);
        // pi11 = -1: H0^{11} - H0^{22} = i
        EXPECT_NEAR(std::abs(seq.h[k][0](0, 0) - seq.h[k][0](1, 1) - kI), 0.0, 1e-14);
    }
}

TEST(GenerateSL, TauFormulaOnSoliton) {
    // tau = (1 + e^{2t})/2: 4 h21' = tau''''/tau - (tau''/tau)^2
    const auto tr = evolve_vessel(sl_soliton_realization(), sl_vessel_params(0.0, 1.0), 0.0, ODEGrid{0.0, 1.0, 1000});
    const double h = tr.grid.step();
    for (std::size_t k : {100u, 500u, 900u}) {
        auto h21 = [&](std::size_t j) { return markov_moment(tr.snapshot(j), 0)(1, 0); };
        const cplx d = (-h21(k + 2) + 8.0 * h21(k + 1) - 8.0 * h21(k - 1) + h21(k - 2)) / (12 * h);
        const double t = tr.t[k], tau = (1 + std::exp(2 * t)) / 2, t2 = 2 * std::exp(2 * t), t4 = 8 * std::exp(2 * t);
        EXPECT_NEAR(std::abs(4.0 * d - (t4 / tau - (t2 / tau) * (t2 / tau))), 0.0, 1e-6);
    }
}

TEST(GenerateSL, RoundTripFixC) {
    const auto tr = fix_c();
    const SLModel m = SLModel::from_trajectory(std::make_shared<const VesselTrajectory>(tr));
    const auto seq = generate_moments_sl(m.beta, tr.grid, 0.0, sl_level_data(moments_from_trajectory(tr, 0.0, 4)));
    EXPECT_LE(max_relative(seq, tr), 1e-5);
}

TEST(GenerateSL, RoundTripTwoStatesFromMiddle) {
    std::mt19937_64 rng(5);
    const auto r = oracle::random_realization(rng, 2, sl_sigma1());
    const auto tr = evolve_vessel(r, sl_vessel_params(0.0, 1.0), 0.5, ODEGrid{0.0, 1.0, 400});
    ASSERT_FALSE(tr.truncated);
    const SLModel m = SLModel::from_trajectory(std::make_shared<const VesselTrajectory>(tr));
    const auto seq = generate_moments_sl(m.beta, tr.grid, 0.5, sl_level_data(moments_from_trajectory(tr, 0.5, 3)));
    EXPECT_LE(max_relative(seq, tr), 1e-5);
}

TEST(GenerateNLS, UnitBetaClosedForms) {
    const auto seq = generate_moments_nls([](double, std::size_t o) { return Jet::constant(1.0, o); },
                                          ODEGrid{0.0, 1.0, 100}, 0.0, {{0.3, -0.2}, {0.1, 0.4}});
    for (std::size_t k = 0; k < seq.t.size(); k += 10) {
        const double t = seq.t[k];
        EXPECT_NEAR(std::abs(seq.h[k][0](0, 0) - (0.3 + t)), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(seq.h[k][0](1, 1) - (-0.2 - t)), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(seq.h[k][0](0, 1) - 1.0), 0.0, 0.0);
        EXPECT_NEAR(std::abs(seq.h[k][1](1, 0) + (0.3 + t)), 0.0, 1e-12);
    }
}

TEST(GenerateNLS, ZeroBetaConstant) {
    const auto seq = generate_moments_nls([](double, std::size_t o) { return Jet::constant(0.0, o); },
                                          ODEGrid{0.0, 1.0, 20}, 0.0, {{0.5, 0.25}, {1.0, 2.0}});
    EXPECT_LE(fro(seq.h.back()[0] - from_rows({{0.5, 0.0}, {0.0, 0.25}})), 0.0);
    EXPECT_LE(fro(seq.h.back()[1] - from_rows({{1.0, 0.0}, {0.0, 2.0}})), 0.0);
}

TEST(GenerateNLS, RoundTrip) {
    std::mt19937_64 rng(3);
    const auto r = oracle::random_realization(rng, 2, identity(2));
    const auto tr = evolve_vessel(r, nls_vessel_params(0.0, 1.0), 0.0, ODEGrid{0.0, 1.0, 400});
    const NLSModel m = NLSModel::from_trajectory(std::make_shared<const VesselTrajectory>(tr));
    const auto seq = generate_moments_nls(m.beta, tr.grid, 0.0, nls_level_data(moments_from_trajectory(tr, 0.0, 4)));
    EXPECT_LE(max_relative(seq, tr), 1e-5);
}

TEST(GenerateDiagonal, RoundTripTwoPort) {
    const auto tr = two_port(2, 17);
    std::vector<CVector> init;
    for (const auto& h : moments_from_trajectory(tr, 0.0, 3)) init.push_back(h.diagonal());
    const auto seq = generate_moments_diagonal(identity(2), tr.params.sigma2(0.0), tr.params.gamma(0.0),
                                               gamma_star_jets(tr), tr.grid, 0.0, init);
    EXPECT_LE(max_relative(seq, tr), 1e-5);
    // off-diagonal of H0 from the closed form
    const CMatrix d = tr.gamma_star[100] - tr.params.gamma(0.0);
    EXPECT_NEAR(std::abs(seq.h[100][0](0, 1) - d(0, 1) / 2.0), 0.0, 1e-10);
}

TEST(GenerateDiagonal, DiagonalMismatchRejected) {
    const MatrixJetProvider bad = [](double, std::size_t order) {
        std::vector<CMatrix> c(order + 1, CMatrix::Zero(2, 2));
        c[0](0, 0) = 1.0;
        return c;
    };
    EXPECT_THROW(generate_moments_diagonal(identity(2), from_rows({{1.0, 0.0}, {0.0, -1.0}}), CMatrix::Zero(2, 2), bad,
                                           ODEGrid{0.0, 1.0, 10}, 0.0, {CVector::Zero(2)}),
                 Error);
    EXPECT_THROW(generate_moments_diagonal(identity(2), identity(2), CMatrix::Zero(2, 2), bad, ODEGrid{0.0, 1.0, 10},
                                           0.0, {CVector::Zero(2)}),
                 Error);
}

TEST(GammaStarFromH0, Cases) {
    const auto sl = sl_vessel_params(0.0, 1.0);
    EXPECT_LE(fro(gamma_star_from_h0(sl, [](double) { return CMatrix::Zero(2, 2); })(0.2) - sl_gamma()), 0.0);
    const auto tr = fix_c();
    const auto shared = std::make_shared<const VesselTrajectory>(tr);
    const auto gs = gamma_star_from_h0(sl, [shared](double t) { return markov_moment(shared->snapshot_at(t), 0); });
    for (double t : {0.0, 0.5, 1.0}) EXPECT_LE(fro(gs(t) - tr.gamma_star[tr.index_of(t)]), 1e-10);
    const auto fb = fix_b();
    EXPECT_LE(fro(gamma_star_from_h0(fb.params, [](double) { return from_rows({{2.0}}); })(0.3)), 0.0);
    // H0 sigma1^{-1} not Hermitian breaks the constraint
    const auto bad = gamma_star_from_h0(sl, [](double) { return from_rows({{1.0, 0.0}, {0.0, 0.0}}); });
    EXPECT_THROW(bad(0.1), Error);
}

TEST(Pick, PositiveAlongTrajectory) {
    const auto tr = fix_b();
    for (std::size_t k = 0; k < tr.size(); k += 50) {
        const CMatrix p = pick_matrix(tr.snapshot(k), 0);
        EXPECT_GT(min_eigenvalue_hermitian(p), 0.0);
    }
}
