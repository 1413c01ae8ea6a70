#include "vesselkit/moments.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace vesselkit {

std::vector<CMatrix> moments_from_trajectory(const VesselTrajectory& traj, double t2, std::size_t k_max) {
    return markov_moments(traj.snapshot_at(t2), k_max + 1);
}

MomentSequence moments_along(const VesselTrajectory& traj, std::size_t k_max) {
    MomentSequence seq;
    seq.grid = traj.grid;
    seq.t = traj.t;
    for (std::size_t k = 0; k < traj.size(); ++k) seq.h.push_back(markov_moments(traj.snapshot(k), k_max + 1));
    return seq;
}

double linkage_residual(const VesselParams& params, double t, const CMatrix& gamma_star, const CMatrix& h0) {
    const CMatrix s1 = params.sigma1(t), s2 = params.sigma2(t);
    const CMatrix rhs = s2 * h0 - s1 * h0 * checked_solve(s1, s2, "sigma1");
    return fro(gamma_star - params.gamma(t) - rhs);
}

double linkage_residual(const VesselTrajectory& traj, double t2) {
    const std::size_t k = traj.index_of(t2);
    return linkage_residual(traj.params, traj.t[k], traj.gamma_star[k], markov_moment(traj.snapshot(k), 0));
}

CMatrix moment_derivative(const VesselTrajectory& traj, std::size_t k, std::size_t i) {
    const Realization r = traj.snapshot(k);
    const Eigen::Index p = r.io_dim();
    if (r.state_dim() == 0) return CMatrix::Zero(p, p);
    const double t = traj.t[k];
    const CMatrix db = vessel_rhs_b(traj.params, r.a1, r.b, t);
    const CMatrix dx = vessel_rhs_x(traj.params, r.b, t);
    const CMatrix y = checked_inverse(r.x, "X");
    const CMatrix dy = -y * dx * y;
    CMatrix ai = CMatrix::Identity(r.state_dim(), r.state_dim());
    for (std::size_t j = 0; j < i; ++j) ai = ai * r.a1;
    const CMatrix s1 = r.sigma1, ds1 = traj.params.dsigma1(t);
    return db.adjoint() * y * ai * r.b * s1 + r.b.adjoint() * dy * ai * r.b * s1 +
           r.b.adjoint() * y * ai * db * s1 + r.b.adjoint() * y * ai * r.b * ds1;
}

double recursion_residual(const VesselTrajectory& traj, double t2, std::size_t i) {
    const std::size_t k = traj.index_of(t2);
    const double t = traj.t[k];
    const std::vector<CMatrix> h = markov_moments(traj.snapshot(k), i + 2);
    const CMatrix s1 = traj.params.sigma1(t);
    const CMatrix c = checked_solve(s1, traj.params.sigma2(t), "sigma1");
    const CMatrix lhs = c * h[i + 1] - h[i + 1] * c;
    const CMatrix rhs = moment_derivative(traj, k, i) - checked_solve(s1, traj.gamma_star[k], "sigma1") * h[i] +
                        h[i] * checked_solve(s1, traj.params.gamma(t), "sigma1");
    return fro(lhs - rhs);
}

double algebraic_residual(const std::vector<CMatrix>& moments, const CMatrix& sigma1) {
    const CMatrix sinv = checked_inverse(sigma1, "sigma1");
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < moments.size(); ++i) {
        const double sign = i % 2 == 0 ? 1.0 : -1.0;
        CMatrix r = moments[i + 1] * sinv + sign * sinv * moments[i + 1].adjoint();
        for (std::size_t j = 0; j <= i; ++j) {
            const double sj = j % 2 == 0 ? -1.0 : 1.0; // (-1)^{j+1}
            r -= sj * moments[i - j] * sinv * moments[j].adjoint();
        }
        worst = std::max(worst, fro(r));
    }
    return worst;
}

namespace {

// monic characteristic polynomial, c[0] = 1, c[j] multiplies lambda^{n-j}
std::vector<cplx> char_poly(const CMatrix& a) {
    const Eigen::VectorXcd ev = eigenvalues(a);
    std::vector<cplx> c{1.0};
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
        std::vector<cplx> next(c.size() + 1, 0.0);
        for (std::size_t j = 0; j < c.size(); ++j) {
            next[j] += c[j];
            next[j + 1] -= ev(k) * c[j];
        }
        c = std::move(next);
    }
    return c;
}

} // namespace

double hlin_residual(const std::vector<CMatrix>& moments, const CMatrix& a1) {
    const std::vector<cplx> c = char_poly(a1);
    const std::size_t n = c.size() - 1;
    double worst = 0.0;
    for (std::size_t k = n; k < moments.size(); ++k) {
        CMatrix acc = CMatrix::Zero(moments[k].rows(), moments[k].cols());
        double scale = 0.0;
        for (std::size_t j = 0; j <= n; ++j) {
            acc += c[j] * moments[k - j];
            scale += std::abs(c[j]) * fro(moments[k - j]);
        }
        if (scale > 0.0) worst = std::max(worst, fro(acc) / scale);
    }
    return worst;
}

CommutatorSolveReport solve_commutator_step(const CMatrix& c, const CMatrix& rhs) {
    require_square(c, "C");
    require_same_shape(c, rhs, "commutator right side");
    const SylvesterReport sr = analyze_sylvester(c, -c, rhs);
    CommutatorSolveReport rep;
    const std::size_t p2 = static_cast<std::size_t>(c.rows() * c.rows());
    rep.n0 = p2 - sr.rank;
    rep.particular = sr.solution;
    rep.nullspace_basis = sr.nullspace;
    rep.range_residual = sr.range_residual;
    if (rep.range_residual > 1e-9 * fro(rhs) + 1e-14)
        throw Error(ErrorKind::NotInRange, "right side is not in the range of the commutator", rep.range_residual);
    return rep;
}

namespace {

// integrates y' = rhs from the node k0 to both ends of the grid
std::vector<CMatrix> integrate_both_ways(const OdeRhs& rhs, const CMatrix& y0, const ODEGrid& grid, std::size_t k0) {
    std::vector<CMatrix> out(grid.steps + 1);
    out[k0] = y0;
    for (std::size_t k = k0; k < grid.steps; ++k) {
        out[k + 1] = rk4_step(rhs, grid.at(k), out[k], grid.at(k + 1) - grid.at(k));
        require_finite(out[k + 1], "moment state");
    }
    for (std::size_t k = k0; k > 0; --k) {
        out[k - 1] = rk4_step(rhs, grid.at(k), out[k], grid.at(k - 1) - grid.at(k));
        require_finite(out[k - 1], "moment state");
    }
    return out;
}

std::size_t start_node(const ODEGrid& grid, double t0) {
    grid.validate();
    const std::size_t k0 = grid.index_of(t0);
    if (std::abs(grid.at(k0) - t0) > 1e-12 * (1.0 + std::abs(t0)))
        throw Error(ErrorKind::OffGrid, "t0 must be a grid node", t0);
    return k0;
}

struct SLLevelJets {
    Jet a, b, c, d;
};

// All level jets at t from the state values (trace_i, h21_i).
std::vector<SLLevelJets> sl_jets(const ScalarFunction& beta, double t, const CMatrix& y, std::size_t levels) {
    const std::size_t order = 3 * levels + 6;
    const Jet bt = beta(t, order);
    const Jet pi = bt.derivative() - bt * bt;
    const cplx two_i = 2.0 * kI;
    std::vector<SLLevelJets> out(levels);
    Jet b = -bt, amd = pi * (-kI);
    for (std::size_t i = 0; i < levels; ++i) {
        const Jet s = (bt * amd - kI * pi * b).integrate(y(2 * i, 0));
        const Jet a = (s + amd) * 0.5;
        const Jet da = a.derivative();
        const Jet c = ((da.derivative() - 2.0 * bt * da) * (1.0 / two_i)).integrate(y(2 * i + 1, 0));
        out[i] = {a, b, c, (s - amd) * 0.5};
        b = kI * c - da + bt * a;
        amd = c.derivative() + kI * pi * a + bt * c;
    }
    return out;
}

} // namespace

std::vector<SLLevelData> sl_level_data(const std::vector<CMatrix>& moments) {
    std::vector<SLLevelData> out;
    for (const auto& h : moments) out.push_back({h.trace(), h(1, 0)});
    return out;
}

MomentSequence generate_moments_sl(const ScalarFunction& beta, const ODEGrid& grid, double t0,
                                   const std::vector<SLLevelData>& init) {
    const std::size_t k0 = start_node(grid, t0);
    const std::size_t levels = init.size();
    MomentSequence seq;
    seq.grid = grid;
    if (levels == 0) return seq;
    CMatrix y0(2 * levels, 1);
    for (std::size_t i = 0; i < levels; ++i) {
        y0(2 * i, 0) = init[i].trace;
        y0(2 * i + 1, 0) = init[i].h21;
    }
    const OdeRhs rhs = [&beta, levels](double t, const CMatrix& y) {
        const auto jets = sl_jets(beta, t, y, levels);
        CMatrix dy(2 * levels, 1);
        for (std::size_t i = 0; i < levels; ++i) {
            dy(2 * i, 0) = jets[i].a.coeff(1) + jets[i].d.coeff(1);
            dy(2 * i + 1, 0) = jets[i].c.coeff(1);
        }
        return dy;
    };
    const auto states = integrate_both_ways(rhs, y0, grid, k0);
    for (std::size_t k = 0; k <= grid.steps; ++k) {
        const double t = grid.at(k);
        const auto jets = sl_jets(beta, t, states[k], levels);
        std::vector<CMatrix> hs;
        for (const auto& j : jets) hs.push_back(from_rows({{j.a.value(), j.b.value()}, {j.c.value(), j.d.value()}}));
        seq.t.push_back(t);
        seq.h.push_back(std::move(hs));
    }
    return seq;
}

namespace {

struct NLSLevelJets {
    Jet a, b, c, d;
};

std::vector<NLSLevelJets> nls_jets(const ScalarFunction& beta, double t, const CMatrix& y, std::size_t levels) {
    const std::size_t order = levels + 3;
    const Jet bt = beta(t, order);
    const Jet bc = bt.conj();
    std::vector<NLSLevelJets> out(levels);
    Jet b = bt, c = bc;
    for (std::size_t n = 0; n < levels; ++n) {
        const Jet a = (bt * c).integrate(y(2 * n, 0));
        const Jet d = (-(bc * b)).integrate(y(2 * n + 1, 0));
        out[n] = {a, b, c, d};
        const Jet nb = b.derivative() - bt * d;
        c = -c.derivative() - bc * a;
        b = nb;
    }
    return out;
}

} // namespace

std::vector<NLSLevelData> nls_level_data(const std::vector<CMatrix>& moments) {
    std::vector<NLSLevelData> out;
    for (const auto& h : moments) out.push_back({h(0, 0), h(1, 1)});
    return out;
}

MomentSequence generate_moments_nls(const ScalarFunction& beta, const ODEGrid& grid, double t0,
                                    const std::vector<NLSLevelData>& init) {
    const std::size_t k0 = start_node(grid, t0);
    const std::size_t levels = init.size();
    MomentSequence seq;
    seq.grid = grid;
    if (levels == 0) return seq;
    CMatrix y0(2 * levels, 1);
    for (std::size_t i = 0; i < levels; ++i) {
        y0(2 * i, 0) = init[i].h11;
        y0(2 * i + 1, 0) = init[i].h22;
    }
    const OdeRhs rhs = [&beta, levels](double t, const CMatrix& y) {
        const auto jets = nls_jets(beta, t, y, levels);
        CMatrix dy(2 * levels, 1);
        for (std::size_t i = 0; i < levels; ++i) {
            dy(2 * i, 0) = jets[i].a.coeff(1);
            dy(2 * i + 1, 0) = jets[i].d.coeff(1);
        }
        return dy;
    };
    const auto states = integrate_both_ways(rhs, y0, grid, k0);
    for (std::size_t k = 0; k <= grid.steps; ++k) {
        const double t = grid.at(k);
        const auto jets = nls_jets(beta, t, states[k], levels);
        std::vector<CMatrix> hs;
        for (const auto& j : jets) hs.push_back(from_rows({{j.a.value(), j.b.value()}, {j.c.value(), j.d.value()}}));
        seq.t.push_back(t);
        seq.h.push_back(std::move(hs));
    }
    return seq;
}

namespace {

using MatJet = std::vector<CMatrix>;

MatJet mj_mul(const MatJet& f, const MatJet& g) {
    const std::size_t n = std::min(f.size(), g.size());
    MatJet out(n);
    for (std::size_t m = 0; m < n; ++m) {
        out[m] = CMatrix::Zero(f[0].rows(), g[0].cols());
        for (std::size_t j = 0; j <= m; ++j) out[m] += f[j] * g[m - j];
    }
    return out;
}

MatJet mj_left(const CMatrix& a, const MatJet& f) {
    MatJet out(f.size());
    for (std::size_t m = 0; m < f.size(); ++m) out[m] = a * f[m];
    return out;
}

MatJet mj_right(const MatJet& f, const CMatrix& a) {
    MatJet out(f.size());
    for (std::size_t m = 0; m < f.size(); ++m) out[m] = f[m] * a;
    return out;
}

MatJet mj_derivative(const MatJet& f) {
    MatJet out;
    for (std::size_t m = 1; m < f.size(); ++m) out.push_back(static_cast<double>(m) * f[m]);
    return out;
}

MatJet mj_sub(const MatJet& f, const MatJet& g) {
    const std::size_t n = std::min(f.size(), g.size());
    MatJet out(n);
    for (std::size_t m = 0; m < n; ++m) out[m] = f[m] - g[m];
    return out;
}

struct DiagonalSystem {
    CMatrix linv;     // sigma1^{-1}
    CMatrix lgamma;   // sigma1^{-1} gamma
    CVector s;        // diagonal of C
    MatrixJetProvider gamma_star;
    CMatrix gamma;
    std::size_t levels = 0;
};

// Level jets of H_0..H_{levels-1} at t from the diagonal state values.
std::vector<MatJet> diagonal_jets(const DiagonalSystem& sys, double t, const CMatrix& y) {
    const Eigen::Index p = sys.s.size();
    const std::size_t order = sys.levels + 3;
    const MatJet gs = sys.gamma_star(t, order);
    if (gs.size() < order + 1) throw Error(ErrorKind::InvalidArgument, "gamma* provider returned a short jet");
    const MatJet lgs = mj_left(sys.linv, gs);
    // off-diagonal part of H_0 from the linkage
    MatJet off(order + 1);
    for (std::size_t m = 0; m <= order; ++m) {
        const CMatrix d = sys.linv * (gs[m] - (m == 0 ? sys.gamma : CMatrix::Zero(p, p)));
        off[m] = CMatrix::Zero(p, p);
        for (Eigen::Index k = 0; k < p; ++k)
            for (Eigen::Index j = 0; j < p; ++j)
                if (k != j) off[m](k, j) = d(k, j) / (sys.s(k) - sys.s(j));
        if (m == 0) {
            const double diag = d.diagonal().norm();
            if (diag > 1e-9 * (1.0 + fro(d)))
                throw Error(ErrorKind::ConstraintViolated, "diagonal of sigma1^{-1}(gamma* - gamma) must vanish", t);
        }
    }
    std::vector<MatJet> out;
    for (std::size_t i = 0; i < sys.levels; ++i) {
        const std::size_t n = off.size();
        MatJet h = off;
        for (Eigen::Index k = 0; k < p; ++k) h[0](k, k) = y(static_cast<Eigen::Index>(i) * p + k, 0);
        // each pass fixes one more Taylor coefficient of the diagonal
        for (std::size_t pass = 1; pass < n; ++pass) {
            const MatJet r = mj_sub(mj_mul(lgs, h), mj_right(h, sys.lgamma));
            for (std::size_t m = 0; m + 1 < n; ++m)
                for (Eigen::Index k = 0; k < p; ++k) h[m + 1](k, k) = r[m](k, k) / static_cast<double>(m + 1);
        }
        out.push_back(h);
        const MatJet rhs = mj_sub(mj_sub(mj_derivative(h), mj_mul(lgs, h)), mj_right(h, -sys.lgamma));
        off.assign(rhs.size(), CMatrix::Zero(p, p));
        for (std::size_t m = 0; m < rhs.size(); ++m)
            for (Eigen::Index k = 0; k < p; ++k)
                for (Eigen::Index j = 0; j < p; ++j)
                    if (k != j) off[m](k, j) = rhs[m](k, j) / (sys.s(k) - sys.s(j));
    }
    return out;
}

} // namespace

MomentSequence generate_moments_diagonal(const CMatrix& sigma1, const CMatrix& sigma2, const CMatrix& gamma,
                                         const MatrixJetProvider& gamma_star, const ODEGrid& grid, double t0,
                                         const std::vector<CVector>& init) {
    require_square(sigma1, "sigma1");
    require_same_shape(sigma1, sigma2, "sigma2");
    require_same_shape(sigma1, gamma, "gamma");
    const Eigen::Index p = sigma1.rows();
    DiagonalSystem sys;
    sys.linv = checked_inverse(sigma1, "sigma1");
    const CMatrix c = sys.linv * sigma2;
    CMatrix offdiag = c;
    offdiag.diagonal().setZero();
    if (fro(offdiag) > 1e-12 * (1.0 + fro(c)))
        throw Error(ErrorKind::InvalidArgument, "sigma1^{-1} sigma2 is not diagonal");
    sys.s = c.diagonal();
    for (Eigen::Index k = 0; k < p; ++k)
        for (Eigen::Index j = k + 1; j < p; ++j)
            if (std::abs(sys.s(k) - sys.s(j)) < 1e-12)
                throw Error(ErrorKind::InvalidArgument, "diagonal of sigma1^{-1} sigma2 must be distinct");
    sys.lgamma = sys.linv * gamma;
    sys.gamma = gamma;
    sys.gamma_star = gamma_star;
    sys.levels = init.size();
    const std::size_t k0 = start_node(grid, t0);
    MomentSequence seq;
    seq.grid = grid;
    if (sys.levels == 0) return seq;
    CMatrix y0(static_cast<Eigen::Index>(sys.levels) * p, 1);
    for (std::size_t i = 0; i < sys.levels; ++i) {
        if (init[i].size() != p) throw Error(ErrorKind::DimensionMismatch, "initial diagonal has the wrong size");
        y0.block(static_cast<Eigen::Index>(i) * p, 0, p, 1) = init[i];
    }
    const OdeRhs rhs = [&sys, p](double t, const CMatrix& y) {
        const auto jets = diagonal_jets(sys, t, y);
        CMatrix dy(y.rows(), 1);
        for (std::size_t i = 0; i < jets.size(); ++i)
            for (Eigen::Index k = 0; k < p; ++k) dy(static_cast<Eigen::Index>(i) * p + k, 0) = jets[i][1](k, k);
        return dy;
    };
    const auto states = integrate_both_ways(rhs, y0, grid, k0);
    for (std::size_t k = 0; k <= grid.steps; ++k) {
        const double t = grid.at(k);
        const auto jets = diagonal_jets(sys, t, states[k]);
        std::vector<CMatrix> hs;
        for (const auto& j : jets) hs.push_back(j[0]);
        seq.t.push_back(t);
        seq.h.push_back(std::move(hs));
    }
    return seq;
}

MatrixJetProvider gamma_star_jets(const VesselTrajectory& traj) {
    const auto shared = std::make_shared<const VesselTrajectory>(traj);
    return [shared](double t, std::size_t order) { return trajectory_jet(*shared, t, order).gamma_star; };
}

MatrixProvider gamma_star_from_h0(const VesselParams& params, MatrixProvider h0) {
    return [params, h0](double t) {
        const CMatrix s1 = params.sigma1(t), s2 = params.sigma2(t);
        const CMatrix h = h0(t);
        const CMatrix gs = params.gamma(t) + s2 * h - s1 * h * checked_solve(s1, s2, "sigma1");
        const double defect = fro(gs + gs.adjoint() + params.dsigma1(t));
        if (defect > 1e-9 * (1.0 + fro(gs)))
            throw Error(ErrorKind::ConstraintViolated, "gamma* + gamma*^* + sigma1' != 0", defect);
        return gs;
    };
}

double max_relative_deviation(const MomentSequence& seq, const VesselTrajectory& traj) {
    if (seq.t.size() != traj.size()) throw Error(ErrorKind::DimensionMismatch, "moment grid differs from trajectory");
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto ref = markov_moments(traj.snapshot(k), seq.levels());
        for (std::size_t i = 0; i < ref.size(); ++i)
            worst = std::max(worst, fro(ref[i] - seq.h[k][i]) / (1.0 + fro(ref[i])));
    }
    return worst;
}

} // namespace vesselkit
