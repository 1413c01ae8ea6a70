#pragma once

#include <vector>

#include "vesselkit/expr.hpp"
#include "vesselkit/vessel.hpp"

namespace vesselkit {

// h[k][i] = H_i at t[k]
struct MomentSequence {
    ODEGrid grid;
    std::vector<double> t;
    std::vector<std::vector<CMatrix>> h;

    std::size_t levels() const { return h.empty() ? 0 : h.front().size(); }
};

// H_0 ... H_K at a grid node
std::vector<CMatrix> moments_from_trajectory(const VesselTrajectory& traj, double t2, std::size_t k_max);
MomentSequence moments_along(const VesselTrajectory& traj, std::size_t k_max);
// max over grid nodes and levels of ||H_i - H_i(traj)|| / (1 + ||H_i(traj)||); grids must match
double max_relative_deviation(const MomentSequence& seq, const VesselTrajectory& traj);

// || (gamma* - gamma) - (sigma2 H0 - sigma1 H0 sigma1^{-1} sigma2) ||_F
double linkage_residual(const VesselTrajectory& traj, double t2);
double linkage_residual(const VesselParams& params, double t, const CMatrix& gamma_star, const CMatrix& h0);

// dH_i/dt2 at stored position k from the vessel right sides
CMatrix moment_derivative(const VesselTrajectory& traj, std::size_t k, std::size_t i);

// C H_{i+1} - H_{i+1} C = H_i' - sigma1^{-1} gamma* H_i + H_i sigma1^{-1} gamma,  C = sigma1^{-1} sigma2
double recursion_residual(const VesselTrajectory& traj, double t2, std::size_t i);

// max over i of || H_{i+1} s^{-1} + (-1)^i s^{-1} H_{i+1}* - sum_j (-1)^{j+1} H_{i-j} s^{-1} H_j* ||
double algebraic_residual(const std::vector<CMatrix>& moments, const CMatrix& sigma1);

// Cayley-Hamilton: sum_j c_j H_{k-j} = 0 for k >= n, relative to sum_j |c_j| ||H_{k-j}||
double hlin_residual(const std::vector<CMatrix>& moments, const CMatrix& a1);

struct CommutatorSolveReport {
    std::size_t n0 = 0;
    CMatrix particular;
    std::vector<CMatrix> nullspace_basis;
    double range_residual = 0.0;
};

// H -> C H - H C; throws NotInRange when rhs is not in the range.
CommutatorSolveReport solve_commutator_step(const CMatrix& c, const CMatrix& rhs);

// Sturm-Liouville moments: per level the trace and H^{21} are free data at t0.
struct SLLevelData {
    cplx trace;
    cplx h21;
};
std::vector<SLLevelData> sl_level_data(const std::vector<CMatrix>& moments);
MomentSequence generate_moments_sl(const ScalarFunction& beta, const ODEGrid& grid, double t0,
                                   const std::vector<SLLevelData>& init);

// Non-linear Schroedinger moments: per level the diagonal entries are free data at t0.
struct NLSLevelData {
    cplx h11;
    cplx h22;
};
std::vector<NLSLevelData> nls_level_data(const std::vector<CMatrix>& moments);
MomentSequence generate_moments_nls(const ScalarFunction& beta, const ODEGrid& grid, double t0,
                                    const std::vector<NLSLevelData>& init);

// Taylor coefficients of a matrix function at t
using MatrixJetProvider = std::function<std::vector<CMatrix>(double t, std::size_t order)>;

// Constant sigma1, sigma2, gamma with C = sigma1^{-1} sigma2 diagonal and distinct entries.
// init[i] holds the diagonal of H_i at t0.
MomentSequence generate_moments_diagonal(const CMatrix& sigma1, const CMatrix& sigma2, const CMatrix& gamma,
                                         const MatrixJetProvider& gamma_star, const ODEGrid& grid, double t0,
                                         const std::vector<CVector>& init);

MatrixJetProvider gamma_star_jets(const VesselTrajectory& traj);

// gamma* = gamma + sigma2 H0 - sigma1 H0 sigma1^{-1} sigma2; throws ConstraintViolated when
// gamma* + gamma*^* + sigma1' is not zero.
MatrixProvider gamma_star_from_h0(const VesselParams& params, MatrixProvider h0);

} // namespace vesselkit
