#pragma once

#include <cstdint>
#include <vector>

#include "vesselkit/realization.hpp"

namespace vesselkit {

// One tangential datum: the constructed S satisfies S(w) xi* = eta*.
struct SchurStepData {
    cplx w;
    CRow xi;
    CRow eta;
};

CMatrix make_j(const CMatrix& sigma1); // diag(-sigma1, sigma1)

double xtilde(const SchurStepData& step, const CMatrix& sigma1);
double admissibility_floor(const SchurStepData& step, const CMatrix& sigma1);
bool is_admissible(const SchurStepData& step, const CMatrix& sigma1);

// Theta(lambda) = I_2p - B* X^{-1} (lambda - A)^{-1} B J, kept as a Realization with sigma1 = J.
struct ThetaFunction {
    Realization realization;
    CMatrix sigma1;

    Eigen::Index p() const { return sigma1.rows(); }
    CMatrix eval(cplx lambda) const;
    double j_inner_residual(const std::vector<double>& omegas) const;
};

ThetaFunction build_theta_single(const SchurStepData& step, const CMatrix& sigma1);
// Nodes with eta given explicitly.
ThetaFunction build_theta_multi(const std::vector<SchurStepData>& steps, const CMatrix& sigma1);
// eta_i = xi_i S(w_i)*.
ThetaFunction build_theta_multi(const std::vector<cplx>& ws, const std::vector<CRow>& xis,
                                const Realization& s);

// Entrywise (xi_i sigma1 xi_j* - eta_i sigma1 eta_j*) / (conj(w_i) + w_j).
CMatrix node_gram(const std::vector<SchurStepData>& steps, const CMatrix& sigma1);

CMatrix lft_apply(const ThetaFunction& theta, const CMatrix& w_value, cplx lambda);
CMatrix lft_apply(const ThetaFunction& theta, const Realization& w, cplx lambda);

Realization schur_step_realization(const Realization& s0, const SchurStepData& step);
Realization an_closed_form(const std::vector<SchurStepData>& steps, const CMatrix& sigma1);
// Applies the steps in order starting from I_p; the last step is the outermost factor.
Realization iterate_from_identity(const std::vector<SchurStepData>& steps, const CMatrix& sigma1);

// Rewrites raw node data into the sequence of steps whose iteration interpolates all nodes.
// The returned list is in application order (the first node comes last, unchanged).
std::vector<SchurStepData> interpolating_steps(const std::vector<SchurStepData>& nodes,
                                               const CMatrix& sigma1);

double interpolation_residual(const Realization& s, const SchurStepData& step);

struct SearchGrid {
    std::uint64_t seed = 12345;
    std::size_t random_rows = 8;
};

SchurStepData find_admissible_direction(const Realization& s, const SearchGrid& grid = {});

} // namespace vesselkit
