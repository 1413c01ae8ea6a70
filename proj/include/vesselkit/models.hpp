#pragma once

#include <memory>

#include "vesselkit/expr.hpp"
#include "vesselkit/vessel.hpp"

namespace vesselkit {

// Sturm-Liouville family: sigma1 = [[0,1],[1,0]], sigma2 = diag(1,0), gamma = diag(0,i),
// gamma* = [[-i pi11, -beta],[beta, i]] with pi11 = beta' - beta^2.
CMatrix sl_sigma1();
CMatrix sl_sigma2();
CMatrix sl_gamma();
VesselParams sl_vessel_params(double a, double b);

struct SLModel {
    ScalarFunction beta;

    static SLModel from_expr(const nlohmann::json& spec);
    static SLModel from_tau(ScalarFunction tau); // beta = -tau'/tau
    // beta = -gamma*_{12} of a trajectory evolved with sl_vessel_params
    static SLModel from_trajectory(std::shared_ptr<const VesselTrajectory> traj);

    cplx beta_at(double t) const;
    cplx dbeta(double t) const;
    Jet pi11_jet(double t, std::size_t order) const;
    cplx pi11(double t) const;
    // potential pi11 + beta' + beta^2 = 2 beta'
    cplx q(double t) const;
    CMatrix target_gamma_star(double t) const;
};

// max over stored nodes of || gamma* - target shape built from the trajectory's own beta ||
double sl_shape_residual(const VesselTrajectory& traj);

// y = S(lambda, t) Phi(lambda, t, t2_0) columnwise; checks y1'' = (q + i lambda) y1 with five-point
// central differences on the trajectory grid, scaled by max |y1|.
double sl_output_lde_check(const VesselTrajectory& traj, cplx lambda, const ScalarFunction& q);
double sl_output_lde_check(const VesselTrajectory& traj, cplx lambda);

// One-soliton fixture: A1 = [-i], B = [1, i], X = 1 at t2 = 0 gives tau = (1 + e^{2t})/2,
// beta = -1 - tanh, q = -2 sech^2.
Realization sl_soliton_realization();

// Non-linear Schroedinger family: sigma1 = I, sigma2 = diag(1,-1)/2, gamma = 0,
// gamma* = [[0, beta],[-conj(beta), 0]].
CMatrix nls_sigma2();
VesselParams nls_vessel_params(double a, double b);

struct NLSModel {
    ScalarFunction beta;

    static NLSModel from_expr(const nlohmann::json& spec);
    static NLSModel from_trajectory(std::shared_ptr<const VesselTrajectory> traj); // beta = gamma*_{12}

    cplx beta_at(double t) const;
    CMatrix target_gamma_star(double t) const;
};

double nls_shape_residual(const VesselTrajectory& traj);

} // namespace vesselkit
