#include <gtest/gtest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "vesselkit/vessel.hpp"

using namespace vesselkit;

namespace {

const CMatrix one = from_rows({{1.0}});

Realization fix_a() {
    Realization r;
    r.a1 = from_rows({{-1.0}});
    r.b = one;
    r.x = from_rows({{0.5}});
    r.sigma1 = one;
    return r;
}

VesselParams fix_b_params() { return VesselParams::constant(0.0, 1.0, one, one, CMatrix::Zero(1, 1)); }

VesselTrajectory fix_b(std::size_t steps = 1000) {
    return evolve_vessel(fix_a(), fix_b_params(), 0.0, ODEGrid{0.0, 1.0, steps});
}

// sigma1 = I, sigma2 indefinite, gamma skew.
VesselParams two_port_params() {
    return VesselParams::constant(0.0, 1.0, identity(2), from_rows({{1.0, 0.0}, {0.0, -1.0}}),
                                  from_rows({{cplx(0, 0.3), 0.0}, {0.0, cplx(0, -0.2)}}));
}

Realization two_port_realization() {
    std::mt19937_64 rng(7);
    return oracle::random_realization(rng, 2, identity(2));
}

const std::vector<cplx> lambdas = {{1.5, 0.5}, {0.7, -2.0}, {2.5, 0.0}, {0.3, 1.0}};

} // namespace

TEST(Params, ConstantValidates) { EXPECT_NO_THROW(fix_b_params().validate()); }

TEST(Params, ConstraintViolationRejected) {
    auto vp = VesselParams::constant(0.0, 1.0, one, one, from_rows({{0.5}}));
    EXPECT_GT(vp.constraint_residual(), 0.9);
    try {
        vp.validate();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConstraintViolated);
    }
}

TEST(Params, SingularSigma1Rejected) {
    auto vp = VesselParams::constant(0.0, 1.0, from_rows({{0.0}}), one, CMatrix::Zero(1, 1));
    EXPECT_THROW(vp.validate(), Error);
}

TEST(Evolve, FixBClosedForms) {
    const auto tr = fix_b();
    ASSERT_EQ(tr.size(), 1001u);
    EXPECT_FALSE(tr.truncated);
    for (std::size_t k = 0; k < tr.size(); k += 125) {
        const double t = tr.t[k];
        EXPECT_NEAR(std::abs(tr.b[k](0, 0) - std::exp(t)), 0.0, 1e-10);
        EXPECT_NEAR(std::abs(tr.x[k](0, 0) - std::exp(2 * t) / 2), 0.0, 1e-10);
        EXPECT_LE(fro(tr.gamma_star[k]), 1e-14);
    }
}

TEST(Evolve, FixBTransferIsConstantInT2) {
    const auto tr = fix_b();
    for (cplx lam : lambdas)
        for (double t : {0.0, 0.5, 1.0})
            EXPECT_NEAR(std::abs(eval_S_t2(tr, lam, t)(0, 0) - (lam - 1.0) / (lam + 1.0)), 0.0, 1e-9);
}

TEST(Evolve, FixBResidualsSmall) {
    const auto tr = fix_b();
    const std::vector<double> ts = {0.0, 0.25, 0.5, 1.0};
    EXPECT_LE(intertwining_residual(tr, lambdas, ts), 1e-8);
    for (double t : ts)
        for (cplx lam : lambdas) EXPECT_LE(ds_residual(tr, lam, t), 1e-8);
    EXPECT_LE(symmetry_residual(tr, lambdas, ts), 1e-8);
    EXPECT_LE(detphi_residual(tr, lambdas, ts), 1e-8);
}

TEST(Evolve, StartInTheMiddleIntegratesBothWays) {
    Realization r = fix_a();
    r.b = from_rows({{std::exp(0.5)}});
    r.x = from_rows({{std::exp(1.0) / 2}});
    const auto tr = evolve_vessel(r, fix_b_params(), 0.5, ODEGrid{0.0, 1.0, 1000});
    EXPECT_EQ(tr.anchor(), 500u);
    EXPECT_NEAR(std::abs(tr.b.front()(0, 0) - 1.0), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(tr.b.back()(0, 0) - std::exp(1.0)), 0.0, 1e-10);
}

TEST(Evolve, OffGridStartRejected) {
    try {
        evolve_vessel(fix_a(), fix_b_params(), 0.00037, ODEGrid{0.0, 1.0, 1000});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::OffGrid);
    }
}

TEST(Evolve, SigmaMismatchRejected) {
    Realization r = fix_a();
    r.sigma1 = from_rows({{2.0}});
    r.x = from_rows({{1.0}});
    try {
        evolve_vessel(r, fix_b_params(), 0.0, ODEGrid{0.0, 1.0, 100});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SigmaMismatch);
    }
}

TEST(Evolve, SingularXTruncates) {
    // indefinite sigma1: X is indefinite and det X changes sign somewhere on [-3, 3]
    std::mt19937_64 rng(1);
    const CMatrix s1 = from_rows({{1.0, 0.0}, {0.0, -1.0}});
    const auto r = oracle::random_realization(rng, 2, s1);
    const auto vp = VesselParams::constant(-3.0, 3.0, s1, from_rows({{1.0, 0.0}, {0.0, 0.0}}),
                                           from_rows({{0.0, 0.0}, {0.0, cplx(0, 1)}}));
    const auto tr = evolve_vessel(r, vp, 0.0, ODEGrid{-3.0, 3.0, 600});
    EXPECT_TRUE(tr.truncated);
    EXPECT_FALSE(tr.warning.empty());
    EXPECT_LT(tr.size(), 601u);
    const bool sign0 = r.x.determinant().real() > 0;
    for (const auto& x : tr.x) EXPECT_EQ(x.determinant().real() > 0, sign0);
}

TEST(Evolve, TwoPortResiduals) {
    const auto tr = evolve_vessel(two_port_realization(), two_port_params(), 0.0, ODEGrid{0.0, 1.0, 2000});
    const std::vector<double> ts = {0.0, 0.5, 1.0};
    EXPECT_LE(intertwining_residual(tr, lambdas, ts), 1e-8);
    for (double t : ts)
        for (cplx lam : lambdas) EXPECT_LE(ds_residual(tr, lam, t), 1e-9);
    EXPECT_LE(symmetry_residual(tr, lambdas, ts), 1e-9);
    EXPECT_LE(detphi_residual(tr, lambdas, ts), 1e-8);
    for (std::size_t k = 0; k < tr.size(); k += 400) EXPECT_LE(tr.snapshot(k).lyapunov_residual(), 1e-9);
}

TEST(Evolve, TwoPortIntertwiningConvergesAtFourthOrder) {
    const std::vector<double> ts = {1.0};
    const double coarse = intertwining_residual(
        evolve_vessel(two_port_realization(), two_port_params(), 0.0, ODEGrid{0.0, 1.0, 10}), lambdas, ts);
    const double fine = intertwining_residual(
        evolve_vessel(two_port_realization(), two_port_params(), 0.0, ODEGrid{0.0, 1.0, 20}), lambdas, ts);
    EXPECT_GT(coarse, 1e-12);
    EXPECT_GE(coarse / fine, 8.0);
}

TEST(Evolve, GammaStarOffGridAgreesWithNode) {
    const auto tr = evolve_vessel(two_port_realization(), two_port_params(), 0.0, ODEGrid{0.0, 1.0, 200});
    const CMatrix mid = gamma_star_at(tr, 0.5);
    EXPECT_LE(fro(mid - tr.gamma_star[100]), 1e-14);
    const CMatrix near = gamma_star_at(tr, 0.5 + 1e-6);
    EXPECT_LE(fro(near - tr.gamma_star[100]), 1e-4);
    // linkage keeps gamma* + gamma*^* = 0 for constant sigma1
    EXPECT_LE(fro(near + near.adjoint()), 1e-10);
}

TEST(Detphi, PerturbedOutputCoefficientsDetected) {
    const auto tr = fix_b();
    LdeCoefficients bad = output_lde(tr);
    bad.gamma = [](double) { return from_rows({{0.3}}); };
    const double r = detphi_residual(input_lde(tr.params), bad, tr.grid, 0.0, lambdas, {1.0});
    EXPECT_NEAR(r, std::abs(std::exp(0.3) - 1.0), 1e-8);
}

TEST(Contour, FixBMatchesOde) {
    const auto tr = fix_b();
    const CMatrix b = b_via_contour(fix_a(), fix_b_params(), 0.0, 1.0, default_contour(fix_a().a1));
    EXPECT_NEAR(std::abs(b(0, 0) - std::exp(1.0)), 0.0, 1e-8);
    EXPECT_NEAR(std::abs(b(0, 0) - tr.b.back()(0, 0)), 0.0, 1e-8);
}

TEST(Contour, TwoPortMatchesOde) {
    const auto r = two_port_realization();
    const auto tr = evolve_vessel(r, two_port_params(), 0.0, ODEGrid{0.0, 1.0, 2000});
    ContourSpec spec = default_contour(r.a1);
    spec.steps = 2000;
    const CMatrix b = b_via_contour(r, two_port_params(), 0.0, 1.0, spec);
    EXPECT_LE(fro(b - tr.b.back()), 1e-8 * fro(b));
}

TEST(Contour, RadiusMustEnclose) {
    ContourSpec spec;
    spec.center = 5.0;
    spec.radius = 1.0;
    EXPECT_THROW(b_via_contour(fix_a(), fix_b_params(), 0.0, 1.0, spec), Error);
}

TEST(Similarity, RecoversTransform) {
    std::mt19937_64 rng(11);
    const auto r1 = two_port_realization();
    const CMatrix v = oracle::random_matrix(rng, 2, 2) + 2.0 * identity(2);
    Realization r2 = r1;
    r2.a1 = v * r1.a1 * v.inverse();
    r2.b = v * r1.b;
    r2.x = v * r1.x * v.adjoint();
    const auto rep = similarity_between(r1, r2);
    EXPECT_TRUE(rep.similar);
    EXPECT_LE(fro(rep.v - v), 1e-8 * fro(v));
}

TEST(Similarity, DifferentSpectraNotSimilar) {
    auto r1 = two_port_realization();
    auto r2 = r1;
    r2.a1(0, 0) -= 0.7;
    EXPECT_FALSE(similarity_between(r1, r2).similar);
}

TEST(Tau, ScalesWithDeterminantOfTransform) {
    std::mt19937_64 rng(13);
    const auto r1 = two_port_realization();
    const CMatrix v = oracle::random_matrix(rng, 2, 2) + 2.0 * identity(2);
    Realization r2 = r1;
    r2.a1 = v * r1.a1 * v.inverse();
    r2.b = v * r1.b;
    r2.x = v * r1.x * v.adjoint();
    const ODEGrid g{0.0, 1.0, 500};
    const auto t1 = evolve_vessel(r1, two_port_params(), 0.0, g);
    const auto t2 = evolve_vessel(r2, two_port_params(), 0.0, g);
    const double scale = std::abs((v * v.adjoint()).determinant());
    for (double t : {0.0, 0.3, 0.9, 1.0})
        EXPECT_NEAR(tau_function(t2, t) / tau_function(t1, t), scale, 1e-9 * scale);
}

TEST(GeneralizedStep, AddsOneStateAndStaysInClass) {
    const auto tr = evolve_vessel(two_port_realization(), two_port_params(), 0.0, ODEGrid{0.0, 1.0, 1000});
    std::mt19937_64 rng(5);
    const SchurStepData st = oracle::random_admissible_step(rng, identity(2));
    const auto out = generalized_schur_step(tr, st, 0.5);
    EXPECT_EQ(out.a1.rows(), 3);
    EXPECT_EQ(out.anchor(), 500u);
    const Realization direct = schur_step_realization(tr.snapshot_at(0.5), st);
    for (cplx lam : lambdas)
        EXPECT_LE(fro(eval_S_t2(out, lam, 0.5) - eval_transfer(direct, lam)), 1e-10);
    EXPECT_LE(intertwining_residual(out, lambdas, {0.0, 1.0}), 1e-7);
    EXPECT_LE(symmetry_residual(out, lambdas, {0.0, 1.0}), 1e-9);
}

TEST(TrajectoryJet, FixBSeriesIsExponential) {
    const auto tr = fix_b(100);
    const double t = 0.503; // between nodes
    const auto jet = trajectory_jet(tr, t, 6);
    double fact = 1.0;
    for (std::size_t m = 0; m <= 6; ++m) {
        if (m > 0) fact *= static_cast<double>(m);
        EXPECT_NEAR(std::abs(jet.b[m](0, 0) - std::exp(t) / fact), 0.0, 1e-9);
        EXPECT_NEAR(std::abs(jet.x[m](0, 0) - std::pow(2.0, m) * std::exp(2 * t) / 2 / fact), 0.0, 1e-8);
        EXPECT_NEAR(std::abs(jet.m[m](0, 0) - (m == 0 ? 2.0 : 0.0)), 0.0, 1e-8);
    }
}

TEST(TrajectoryJet, FirstCoefficientsMatchRightSides) {
    const auto tr = evolve_vessel(two_port_realization(), two_port_params(), 0.0, ODEGrid{0.0, 1.0, 1000});
    const std::size_t k = 400;
    const auto jet = trajectory_jet(tr, tr.t[k], 3);
    EXPECT_LE(fro(jet.b[0] - tr.b[k]), 1e-14);
    EXPECT_LE(fro(jet.b[1] - vessel_rhs_b(tr.params, tr.a1, tr.b[k], tr.t[k])), 1e-12);
    EXPECT_LE(fro(jet.x[1] - vessel_rhs_x(tr.params, tr.b[k], tr.t[k])), 1e-12);
    EXPECT_LE(fro(jet.gamma_star[0] - tr.gamma_star[k]), 1e-12);
    const double h = tr.grid.step();
    const auto& g = tr.gamma_star;
    // fourth-order stencils
    const CMatrix fd = (-g[k + 2] + 8.0 * g[k + 1] - 8.0 * g[k - 1] + g[k - 2]) / (12 * h);
    EXPECT_LE(fro(jet.gamma_star[1] - fd), 1e-8 * (1.0 + fro(fd)));
    const CMatrix fd2 = (-g[k + 2] + 16.0 * g[k + 1] - 30.0 * g[k] + 16.0 * g[k - 1] - g[k - 2]) / (12 * h * h);
    EXPECT_LE(fro(2.0 * jet.gamma_star[2] - fd2), 1e-6 * (1.0 + fro(fd2)));
}

TEST(TrajectoryJet, VaryingParametersRejected) {
    auto tr = fix_b(10);
    tr.params.constant_coefficients = false;
    EXPECT_THROW(trajectory_jet(tr, 0.5, 2), Error);
}
