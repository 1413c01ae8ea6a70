#pragma once

#include <optional>
#include <vector>

#include "vesselkit/matcore.hpp"

namespace vesselkit {

// S(lambda) = I - B* X^{-1} (lambda I - A1)^{-1} B sigma1, with A1 X + X A1* + B sigma1 B* = 0.
struct Realization {
    CMatrix a1;
    CMatrix b;
    CMatrix x;
    CMatrix sigma1;

    Eigen::Index state_dim() const { return a1.rows(); }
    Eigen::Index io_dim() const { return sigma1.rows(); }

    // Zero-state realization of the constant I_p.
    static Realization identity(const CMatrix& sigma1);

    double lyapunov_residual() const;
    double lyapunov_scale() const;
    // Shapes, Hermitian X and sigma1, invertibility, Lyapunov residual.
    void validate(double rel_tol = 1e-10) const;
};

// Distance threshold used for PoleAt.
double pole_threshold(const CMatrix& a1);
void check_not_pole(const CMatrix& a1, cplx lambda);

CMatrix eval_transfer(const Realization& r, cplx lambda);

// (lambda I - A1)^{-1} B sigma1, with the pole check.
CMatrix resolvent_times_input(const Realization& r, cplx lambda);

struct KernelValue {
    CMatrix resolvent;               // sigma1 B* (conj(w) - A1*)^{-1} X^{-1} (lambda - A1)^{-1} B sigma1
    std::optional<CMatrix> quotient; // (sigma1 - S(w)* sigma1 S(lambda)) / (conj(w) + lambda)
    double mismatch = 0.0;
};

KernelValue kernel_ks(const Realization& r, cplx lambda, cplx w);

struct InnerResidual {
    double axis = 0.0; // max || S(i w)* sigma1 S(i w) - sigma1 ||
    double rhp = -std::numeric_limits<double>::infinity(); // max lambda_max(S* sigma1 S - sigma1)
};

InnerResidual sigma1_inner_residual(const Realization& r, const std::vector<double>& omegas,
                                    const std::vector<cplx>& rhp_points = {});

CMatrix markov_moment(const Realization& r, std::size_t i);
std::vector<CMatrix> markov_moments(const Realization& r, std::size_t count);

// Blocks B* (A1*)^i X^{-1} A1^j B for i, j = 0..depth.
CMatrix pick_matrix(const Realization& r, std::size_t depth);

} // namespace vesselkit
