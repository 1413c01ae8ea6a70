#include "vesselkit/fixtures.hpp"

#include <cmath>

#include "vesselkit/models.hpp"

namespace vesselkit::fixtures {

namespace {

const CMatrix one = from_rows({{1.0}});

CRow scalar_row(double v) {
    CRow r(1);
    r(0) = v;
    return r;
}

} // namespace

Realization fix_a() {
    Realization r;
    r.a1 = from_rows({{-1.0}});
    r.b = one;
    r.x = from_rows({{0.5}});
    r.sigma1 = one;
    return r;
}

VesselParams fix_b_params() { return VesselParams::constant(0.0, 1.0, one, one, CMatrix::Zero(1, 1)); }

VesselTrajectory fix_b(std::size_t steps) { return evolve_vessel(fix_a(), fix_b_params(), 0.0, {0.0, 1.0, steps}); }

Realization fix_c_realization() {
    Realization r;
    r.a1 = from_rows({{-1.0}});
    r.b = from_rows({{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)}});
    r.x = from_rows({{0.5}});
    r.sigma1 = sl_sigma1();
    return r;
}

VesselTrajectory fix_c(std::size_t steps) {
    return evolve_vessel(fix_c_realization(), sl_vessel_params(0.0, 1.0), 0.0, {0.0, 1.0, steps});
}

VesselTrajectory soliton(std::size_t steps) {
    return evolve_vessel(sl_soliton_realization(), sl_vessel_params(0.0, 1.0), 0.0, {0.0, 1.0, steps});
}

NPProblem fix_d() {
    NPProblem pr;
    pr.params = fix_b_params();
    pr.grid = {0.0, 1.0, 1000};
    pr.nodes = {{1.0, scalar_row(1.0), scalar_row(0.0), 0.0}, {2.0, scalar_row(1.0), scalar_row(0.2), 0.0}};
    pr.t2_ref = 0.0;
    return pr;
}

Realization random_realization(std::mt19937_64& rng, Eigen::Index n, const CMatrix& sigma1) {
    if (n == 0) return Realization::identity(sigma1);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.5, 2.0);
    auto gauss = [&](Eigen::Index r, Eigen::Index c, double scale) {
        CMatrix m(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index k = 0; k < c; ++k) {
                const double re = g(rng);
                m(i, k) = scale * cplx(re, g(rng));
            }
        return m;
    };
    for (;;) {
        Realization r;
        r.a1 = gauss(n, n, 0.5);
        for (Eigen::Index i = 0; i < n; ++i) r.a1(i, i) -= u(rng) + 1.0;
        r.b = gauss(n, sigma1.rows(), 0.7);
        r.sigma1 = sigma1;
        r.x = solve_lyapunov(r.a1, r.b * sigma1 * r.b.adjoint());
        if (min_singular_ratio(r.x) > 1e-3) return r;
    }
}

std::vector<Description> catalog() {
    return {
        {"fix_a", "A1=-1, B=1, X=0.5, sigma1=1; S(lambda)=(lambda-1)/(lambda+1)"},
        {"fix_b", "fix_a evolved with sigma1=sigma2=1, gamma=0 on [0,1]; B=e^t, X=e^{2t}/2, gamma*=0"},
        {"fix_c", "Sturm-Liouville parameters, A1=-1, B=[1,1]/sqrt2, X=0.5 on [0,1]"},
        {"soliton", "Sturm-Liouville, A1=-i, B=[1,i], X=1; beta=-1-tanh, q=-2sech^2"},
        {"fix_d", "nodes (w=1,xi=1,eta=0), (w=2,xi=1,eta=0.2) with fix_b parameters, t2_ref=0"},
    };
}

} // namespace vesselkit::fixtures
