#include "vesselkit/interp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace vesselkit {

namespace {

CMatrix sigma_ref(const NPProblem& prob) { return prob.params.sigma1(prob.t2_ref); }

std::vector<SchurStepData> node_steps(const NPProblem& prob) {
    const Eigen::Index p = prob.params.p;
    std::vector<SchurStepData> steps;
    for (const auto& n : prob.nodes) {
        if (n.xi.size() != p || n.eta.size() != p)
            throw Error(ErrorKind::DimensionMismatch, "node rows must have p entries");
        if (!(n.w.real() > 0.0)) throw Error(ErrorKind::InvalidArgument, "node w must lie in the right half-plane", 0.0, n.w);
        if (n.xi.norm() == 0.0) throw Error(ErrorKind::InvalidArgument, "node xi must be nonzero");
        if (std::abs(n.t2 - prob.t2_ref) > 1e-12 * (1.0 + std::abs(prob.t2_ref)))
            throw Error(ErrorKind::InvalidArgument, "all nodes must share t2_ref", n.t2);
        steps.push_back({n.w, n.xi, n.eta});
    }
    for (std::size_t i = 0; i < steps.size(); ++i)
        for (std::size_t j = i + 1; j < steps.size(); ++j) {
            if (std::abs(steps[i].w - steps[j].w) > 1e-12 * (1.0 + std::abs(steps[i].w))) continue;
            // same w: xi_j = c xi_i needs eta_j = c eta_i
            const cplx cc = (steps[i].xi.conjugate().cwiseProduct(steps[j].xi)).sum() / steps[i].xi.squaredNorm();
            if ((steps[j].xi - cc * steps[i].xi).norm() <= 1e-12 * steps[j].xi.norm() &&
                (steps[j].eta - cc * steps[i].eta).norm() > 1e-12 * (1.0 + steps[j].eta.norm()))
                throw Error(ErrorKind::DuplicateNode, "equal nodes with conflicting values", static_cast<double>(j),
                            steps[j].w);
        }
    return steps;
}

} // namespace

FeasibilityReport feasibility_same_t2(const NPProblem& prob) {
    const CMatrix sig = sigma_ref(prob);
    const auto steps = node_steps(prob);
    FeasibilityReport rep;
    for (const auto& s : steps) rep.xtilde.push_back(xtilde(s, sig));
    rep.gram = node_gram(steps, sig);
    rep.lambda_min = steps.empty() ? 0.0 : min_eigenvalue_hermitian(rep.gram);
    rep.feasible = steps.empty() || rep.lambda_min > 1e-8;
    return rep;
}

NPSolution solve_same_t2(const NPProblem& prob) {
    const FeasibilityReport fr = feasibility_same_t2(prob);
    if (!fr.feasible) throw Error(ErrorKind::Infeasible, "node Gram matrix is not positive", fr.lambda_min);
    const CMatrix sig = sigma_ref(prob);
    NPSolution sol;
    const auto raw = node_steps(prob);
    sol.steps = interpolating_steps(raw, sig);
    const Realization s = sol.steps.empty() ? Realization::identity(sig) : iterate_from_identity(sol.steps, sig);
    if (raw.empty()) {
        sol.theta.sigma1 = sig;
        sol.theta.realization = Realization::identity(make_j(sig));
    } else {
        sol.theta = build_theta_multi(raw, sig);
    }
    sol.trajectory = evolve_vessel(s, prob.params, prob.t2_ref, prob.grid);
    return sol;
}

double transported_condition_residual(const VesselTrajectory& traj, const std::vector<InterpNode>& nodes,
                                      const std::vector<double>& t2s) {
    double worst = 0.0;
    for (const auto& n : nodes) {
        const double t0 = n.t2;
        for (double t : t2s) {
            const CMatrix phi = fundamental_solution(traj, n.w, t0, t, LdeKind::Input);
            const CMatrix phis = fundamental_solution(traj, n.w, t0, t, LdeKind::Output);
            const CVector xi_t = phi * n.xi.adjoint();
            const CVector eta_t = phis * n.eta.adjoint();
            worst = std::max(worst, (eval_S_t2(traj, n.w, t) * xi_t - eta_t).norm());
        }
    }
    return worst;
}

VesselTrajectory theta_trajectory(const ThetaFunction& theta, const VesselTrajectory& s_traj) {
    const VesselParams& sp = s_traj.params;
    if (!sp.constant_coefficients)
        throw Error(ErrorKind::InvalidArgument, "the Theta vessel is built for constant sigma1 only");
    const Eigen::Index p = sp.p;
    const auto shared = std::make_shared<const VesselTrajectory>(s_traj);
    VesselParams dp;
    dp.a = s_traj.t.front();
    dp.b = s_traj.t.back();
    dp.p = 2 * p;
    const CMatrix j = make_j(sp.sigma1(s_traj.t2_0));
    dp.sigma1 = [j](double) { return j; };
    dp.sigma2 = [sp, p](double t) {
        CMatrix m = CMatrix::Zero(2 * p, 2 * p);
        m.topLeftCorner(p, p) = -sp.sigma2(t);
        m.bottomRightCorner(p, p) = sp.sigma2(t);
        return m;
    };
    dp.gamma = [sp, shared, p](double t) {
        CMatrix m = CMatrix::Zero(2 * p, 2 * p);
        m.topLeftCorner(p, p) = -gamma_star_at(*shared, t);
        m.bottomRightCorner(p, p) = sp.gamma(t);
        return m;
    };
    const CMatrix zero = CMatrix::Zero(2 * p, 2 * p);
    dp.dsigma1 = [zero](double) { return zero; };
    ODEGrid g = s_traj.grid;
    g.t_start = s_traj.t.front();
    g.t_end = s_traj.t.back();
    g.steps = s_traj.size() - 1;
    return evolve_vessel(theta.realization, dp, s_traj.t2_0, g);
}

PositivePair::PositivePair(VesselTrajectory theta_traj, VesselTrajectory s_traj)
    : theta_(std::make_shared<const VesselTrajectory>(std::move(theta_traj))),
      s_(std::make_shared<const VesselTrajectory>(std::move(s_traj))) {
    if (theta_->params.p != 2 * s_->params.p)
        throw Error(ErrorKind::DimensionMismatch, "Theta must be 2p x 2p");
}

CMatrix PositivePair::eval_direct(cplx lambda, double t2) const {
    const Eigen::Index p = s_->params.p;
    const CMatrix th = eval_transfer(theta_->snapshot_at(t2), lambda);
    if (min_singular_ratio(th) <= 1e-8) throw Error(ErrorKind::SingularTheta, "Theta is singular", t2, lambda);
    CMatrix is(p, 2 * p);
    is << CMatrix::Identity(p, p), eval_S_t2(*s_, lambda, t2);
    return checked_solve(th.transpose(), is.transpose(), "Theta").transpose();
}

CMatrix PositivePair::eval(cplx lambda, double t2) const {
    try {
        return eval_direct(lambda, t2);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::SingularTheta) throw;
    }
    // zero of Theta at a node: W is analytic there, so take the mean over a small circle
    constexpr std::size_t m = 32;
    const double r = 1e-2 * (1.0 + std::abs(lambda));
    CMatrix acc;
    for (std::size_t k = 0; k < m; ++k) {
        const double a = 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(m);
        const CMatrix w = eval_direct(lambda + r * std::polar(1.0, a), t2);
        acc = k == 0 ? w : CMatrix(acc + w);
    }
    return acc / static_cast<double>(m);
}

double PositivePair::identity_residual(cplx lambda, double t2) const {
    const Eigen::Index p = s_->params.p;
    const CMatrix w = eval(lambda, t2);
    const CMatrix th = eval_transfer(theta_->snapshot_at(t2), lambda);
    const CMatrix wt = w * th;
    const double r1 = fro(wt.leftCols(p) - CMatrix::Identity(p, p));
    const double r2 = fro(wt.rightCols(p) - eval_S_t2(*s_, lambda, t2));
    return std::max(r1, r2);
}

CMatrix PositivePair::kernel(cplx lambda, cplx mu, double t2) const {
    const CMatrix j = theta_->params.sigma1(t2);
    return eval(lambda, t2) * (-j) * eval(mu, t2).adjoint() / (lambda + std::conj(mu));
}

double PositivePair::kernel_gram_min_eigenvalue(const std::vector<cplx>& points, double t2) const {
    const Eigen::Index p = s_->params.p;
    const Eigen::Index m = static_cast<Eigen::Index>(points.size());
    CMatrix g(m * p, m * p);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b) g.block(a * p, b * p, p, p) = kernel(points[a], points[b], t2);
    return min_eigenvalue_hermitian(hermitian_part(g));
}

PositivePair positive_pair(const VesselTrajectory& theta_traj, const VesselTrajectory& s_traj) {
    return PositivePair(theta_traj, s_traj);
}

MultiT2Report multi_t2_verify(const VesselParams& params, const ODEGrid& grid, const std::vector<InterpNode>& nodes,
                              const std::vector<Realization>& candidates) {
    if (nodes.size() != candidates.size())
        throw Error(ErrorKind::DimensionMismatch, "one candidate per node is required");
    MultiT2Report rep;
    std::vector<VesselTrajectory> trajs;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        const Realization& c = candidates[i];
        if (c.io_dim() != params.p) throw Error(ErrorKind::DimensionMismatch, "candidate has the wrong p");
        if (i > 0 && c.state_dim() != candidates[0].state_dim())
            throw Error(ErrorKind::DimensionMismatch, "candidates differ in state dimension");
        rep.realizations.push_back(schur_step_realization(c, {n.w, n.xi, n.eta}));
        trajs.push_back(evolve_vessel(rep.realizations.back(), params, grid.at(grid.index_of(n.t2)), grid));
        rep.invertible.push_back(!trajs.back().truncated);
    }
    rep.verdict = std::all_of(rep.invertible.begin(), rep.invertible.end(), [](bool b) { return b; });
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (i == j) continue;
            PairReport pr;
            pr.i = i;
            pr.j = j;
            const double tj = grid.at(grid.index_of(nodes[j].t2));
            try {
                const Realization at_j = trajs[i].snapshot_at(tj);
                const SimilarityReport sr = similarity_between(rep.realizations[j], at_j, 1e-6);
                pr.similarity_residual = std::max(sr.residual, sr.x_residual);
                pr.similar = sr.similar;
                const double ti = grid.at(grid.index_of(nodes[i].t2));
                ContourSpec spec = default_contour(rep.realizations[i].a1);
                spec.steps = std::max<std::size_t>(spec.steps, static_cast<std::size_t>(1.0 / grid.step()));
                const CMatrix bc = b_via_contour(rep.realizations[i], params, ti, tj, spec);
                const CMatrix vb = sr.v * rep.realizations[j].b;
                pr.contour_residual = fro(bc - vb) / std::max(1.0, fro(vb));
                pr.status = pr.similar ? "ok" : "NotSimilar";
            } catch (const Error& e) {
                pr.status = error_kind_name(e.kind());
                pr.similar = false;
            }
            if (!pr.similar || pr.contour_residual > 1e-5) rep.verdict = false;
            rep.pairs.push_back(pr);
        }
    return rep;
}

std::vector<Realization> same_t2_candidates(const NPProblem& prob) {
    const CMatrix sig = sigma_ref(prob);
    const auto raw = node_steps(prob);
    std::vector<Realization> out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        std::vector<SchurStepData> order{raw[i]};
        for (std::size_t j = 0; j < raw.size(); ++j)
            if (j != i) order.push_back(raw[j]);
        auto steps = interpolating_steps(order, sig);
        steps.pop_back(); // node i itself, applied last
        out.push_back(steps.empty() ? Realization::identity(sig) : iterate_from_identity(steps, sig));
    }
    return out;
}

} // namespace vesselkit
