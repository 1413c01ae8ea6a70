#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vesselkit/realization.hpp"
#include "vesselkit/schur.hpp"

namespace vesselkit {

using MatrixProvider = std::function<CMatrix(double)>;

struct VesselParams {
    double a = 0.0;
    double b = 1.0;
    Eigen::Index p = 1;
    MatrixProvider sigma1;
    MatrixProvider sigma2;
    MatrixProvider gamma;
    MatrixProvider dsigma1;
    bool constant_coefficients = false; // set by constant(); enables trajectory_jet

    static VesselParams constant(double a, double b, const CMatrix& sigma1, const CMatrix& sigma2,
                                 const CMatrix& gamma);

    // max over samples of || gamma + gamma* + sigma1' ||
    double constraint_residual(std::size_t samples = 33) const;
    // Hermitian sigmas, invertible sigma1, constraint <= 1e-9.
    void validate(std::size_t samples = 33) const;
};

struct VesselTrajectory {
    VesselParams params;
    CMatrix a1;
    double t2_0 = 0.0;
    ODEGrid grid;
    std::size_t first = 0; // grid index of the first stored point
    std::vector<double> t;
    std::vector<CMatrix> b;
    std::vector<CMatrix> x;
    std::vector<CMatrix> gamma_star;
    bool truncated = false;
    std::string warning;

    std::size_t size() const { return t.size(); }
    std::size_t anchor() const; // position of t2_0 in the stored arrays
    // position in the stored arrays of the grid node nearest to t2
    std::size_t index_of(double t2) const;
    Realization snapshot(std::size_t k) const;
    Realization snapshot_at(double t2) const { return snapshot(index_of(t2)); }
};

CMatrix vessel_rhs_b(const VesselParams& params, const CMatrix& a1, const CMatrix& b, double t);
CMatrix vessel_rhs_x(const VesselParams& params, const CMatrix& b, double t);
CMatrix linkage_gamma_star(const VesselParams& params, const CMatrix& b, const CMatrix& x, double t);

// Integrates from t2_0 (a grid node) towards both ends of the grid.
VesselTrajectory evolve_vessel(const Realization& r0, const VesselParams& params, double t2_0,
                               const ODEGrid& grid);

// gamma* off the grid: one RK4 sub-step from the stored node just below t.
CMatrix gamma_star_at(const VesselTrajectory& traj, double t);

CMatrix eval_S_t2(const VesselTrajectory& traj, cplx lambda, double t2);

// Coefficients of u' = sigma1^{-1}(sigma2 lambda + gamma) u.
struct LdeCoefficients {
    MatrixProvider sigma1;
    MatrixProvider sigma2;
    MatrixProvider gamma;
};

LdeCoefficients input_lde(const VesselParams& params);
LdeCoefficients output_lde(const VesselTrajectory& traj);

// Phi(lambda, t_to, t_from) with |t_to - t_from| / h steps (rounded).
CMatrix transport(const LdeCoefficients& lde, cplx lambda, double t_from, double t_to, double h);
// Phi(lambda, t_k, t_{k0}) for grid indices k in [k_lo, k_hi].
std::vector<CMatrix> transport_path(const LdeCoefficients& lde, cplx lambda, const ODEGrid& grid,
                                     std::size_t k0, std::size_t k_lo, std::size_t k_hi);

enum class LdeKind { Input, Output };

CMatrix fundamental_solution(const VesselParams& params, cplx lambda, double t2_from, double t2_to,
                             const ODEGrid& grid);
CMatrix fundamental_solution(const VesselTrajectory& traj, cplx lambda, double t2_from, double t2_to,
                             LdeKind kind);
// Phi(lambda, t_k, t2_0) for every stored point of the trajectory.
std::vector<CMatrix> fundamental_path(const VesselTrajectory& traj, cplx lambda, LdeKind kind);

double intertwining_residual(const VesselTrajectory& traj, const std::vector<cplx>& lambdas,
                             const std::vector<double>& t2s);
double ds_residual(const VesselTrajectory& traj, cplx lambda, double t2);
// Exact t2-derivative of S(lambda, t2) from the vessel right sides.
CMatrix ds_exact(const VesselTrajectory& traj, cplx lambda, std::size_t k);
double symmetry_residual(const Realization& r, const std::vector<cplx>& lambdas);
double symmetry_residual(const VesselTrajectory& traj, const std::vector<cplx>& lambdas,
                         const std::vector<double>& t2s);
double tau_function(const VesselTrajectory& traj, double t2);

double detphi_residual(const VesselTrajectory& traj, const std::vector<cplx>& lambdas,
                       const std::vector<double>& t2s);
// Same check with explicit input and output coefficients (used for perturbation runs).
double detphi_residual(const LdeCoefficients& in, const LdeCoefficients& out, const ODEGrid& grid,
                       double t2_0, const std::vector<cplx>& lambdas, const std::vector<double>& t2s);

struct ContourSpec {
    cplx center = 0.0;
    double radius = 1.0;
    std::size_t nodes = 128;
    std::size_t steps = 1000; // integrator steps per unit of |t2 - t2_0|
};

// Circle centred on the mean eigenvalue enclosing the spectrum with margin.
ContourSpec default_contour(const CMatrix& a1);

CMatrix b_via_contour(const Realization& r0, const VesselParams& params, double t2_0, double t2,
                      const ContourSpec& spec);

VesselTrajectory generalized_schur_step(const VesselTrajectory& traj, const SchurStepData& step,
                                        double t2_0);

struct SimilarityReport {
    CMatrix v;
    double residual = 0.0;   // relative residual of A2 V - V A1 = 0, V B1 = B2
    double x_residual = 0.0; // relative || X2 - V X1 V* ||
    bool similar = false;
};

// Taylor coefficients in (s - t) of B, X, M = B* X^{-1} B and gamma* at t.
// Needs constant parameters; t may lie between grid nodes.
struct TrajectoryJet {
    std::vector<CMatrix> b, x, m, gamma_star;
};

TrajectoryJet trajectory_jet(const VesselTrajectory& traj, double t, std::size_t order);

SimilarityReport similarity_between(const Realization& r1, const Realization& r2, double tol = 1e-8);

} // namespace vesselkit
