#pragma once

#include <memory>
#include <string>
#include <vector>

#include "vesselkit/schur.hpp"
#include "vesselkit/vessel.hpp"

namespace vesselkit {

// Condition S(w, t2) xi* = eta* at the time t2.
struct InterpNode {
    cplx w;
    CRow xi;
    CRow eta;
    double t2 = 0.0;
};

struct NPProblem {
    VesselParams params;
    ODEGrid grid;
    std::vector<InterpNode> nodes;
    double t2_ref = 0.0;
};

struct FeasibilityReport {
    std::vector<double> xtilde;
    CMatrix gram;
    double lambda_min = 0.0;
    bool feasible = false;
};

FeasibilityReport feasibility_same_t2(const NPProblem& prob);

struct NPSolution {
    std::vector<SchurStepData> steps; // application order
    ThetaFunction theta;              // all nodes at once, T_Theta(I) = S at t2_ref
    VesselTrajectory trajectory;
};

// S0 = I_p at t2_ref through the Schur steps, then evolved over the grid. Throws Infeasible.
NPSolution solve_same_t2(const NPProblem& prob);

// max over nodes and t2 of || S(w, t2) xi(t2)* - eta(t2)* || with xi* carried by the input LDE and
// eta* by the output LDE from t2_ref.
double transported_condition_residual(const VesselTrajectory& traj, const std::vector<InterpNode>& nodes,
                                      const std::vector<double>& t2s);

// Theta evolved with sigma1 -> J, sigma2 -> diag(-sigma2, sigma2), gamma -> diag(-gamma*, gamma), gamma*
// taken from s_traj. Keeps T_Theta(I) = S along t2. Needs constant sigma1.
VesselTrajectory theta_trajectory(const ThetaFunction& theta, const VesselTrajectory& s_traj);

// W = [I S] Theta^{-1}
class PositivePair {
public:
    PositivePair(VesselTrajectory theta_traj, VesselTrajectory s_traj);

    // Near a zero of Theta (an interpolation node) W is continued analytically by a circle mean.
    CMatrix eval(cplx lambda, double t2) const;
    // max of || W Theta - [I S] || over the two blocks
    double identity_residual(cplx lambda, double t2) const;
    // W(lambda) (-J) W(mu)* / (lambda + conj(mu))
    CMatrix kernel(cplx lambda, cplx mu, double t2) const;
    double kernel_gram_min_eigenvalue(const std::vector<cplx>& points, double t2) const;

private:
    CMatrix eval_direct(cplx lambda, double t2) const;

    std::shared_ptr<const VesselTrajectory> theta_;
    std::shared_ptr<const VesselTrajectory> s_;
};

PositivePair positive_pair(const VesselTrajectory& theta_traj, const VesselTrajectory& s_traj);

struct PairReport {
    std::size_t i = 0, j = 0;
    double similarity_residual = 0.0; // A_i V = V A_j, V B_j = B_i(t_j), X_i(t_j) = V X_j V*
    double contour_residual = 0.0;    // contour transport of B_i against V B_j, relative
    bool similar = false;
    std::string status; // "ok", "NotSimilar", or an error kind name
};

struct MultiT2Report {
    std::vector<Realization> realizations; // S0 candidates after the node step
    std::vector<bool> invertible;          // X stays invertible on the grid
    std::vector<PairReport> pairs;
    bool verdict = false;
};

// candidates[i] realizes S0^i at nodes[i].t2 (sigma1 = sigma1(t2_i)).
MultiT2Report multi_t2_verify(const VesselParams& params, const ODEGrid& grid, const std::vector<InterpNode>& nodes,
                              const std::vector<Realization>& candidates);

// Candidates for nodes sharing one t2: S0^i with T_{Theta_i}(S0^i) = S of solve_same_t2.
std::vector<Realization> same_t2_candidates(const NPProblem& prob);

} // namespace vesselkit
