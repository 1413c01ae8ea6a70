#include "vesselkit/realization.hpp"

#include <algorithm>
#include <cmath>

namespace vesselkit {

Realization Realization::identity(const CMatrix& sigma1) {
    Realization r;
    r.sigma1 = sigma1;
    r.a1 = CMatrix::Zero(0, 0);
    r.b = CMatrix::Zero(0, sigma1.rows());
    r.x = CMatrix::Zero(0, 0);
    return r;
}

double Realization::lyapunov_residual() const {
    if (state_dim() == 0) return 0.0;
    return fro(a1 * x + x * a1.adjoint() + b * sigma1 * b.adjoint());
}

double Realization::lyapunov_scale() const {
    return fro(a1) * fro(x) + fro(b) * fro(b) * fro(sigma1);
}

void Realization::validate(double rel_tol) const {
    require_square(a1, "A1");
    require_square(x, "X");
    require_square(sigma1, "sigma1");
    if (b.rows() != a1.rows() || x.rows() != a1.rows() || b.cols() != sigma1.rows())
        throw Error(ErrorKind::DimensionMismatch, "realization blocks have inconsistent sizes");
    require_finite(a1, "A1");
    require_finite(b, "B");
    require_finite(x, "X");
    require_finite(sigma1, "sigma1");
    if (hermitian_defect(sigma1) > 1e-10 * std::max(1.0, fro(sigma1)))
        throw Error(ErrorKind::NotHermitian, "sigma1 is not Hermitian");
    if (min_singular_ratio(sigma1) <= 1e-12)
        throw Error(ErrorKind::SingularOperator, "sigma1 is not invertible");
    if (state_dim() == 0) return;
    if (hermitian_defect(x) > 1e-10 * std::max(1.0, fro(x)))
        throw Error(ErrorKind::NotHermitian, "X is not Hermitian", hermitian_defect(x));
    if (min_singular_ratio(x) <= 1e-12)
        throw Error(ErrorKind::SingularOperator, "X is not invertible");
    const double res = lyapunov_residual();
    if (res > rel_tol * std::max(1.0, lyapunov_scale()))
        throw Error(ErrorKind::ConstraintViolated, "Lyapunov equation fails", res);
}

double pole_threshold(const CMatrix& a1) { return 1e-10 * (1.0 + fro(a1)); }

void check_not_pole(const CMatrix& a1, cplx lambda) {
    if (a1.rows() == 0) return;
    if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()))
        throw Error(ErrorKind::InvalidArgument, "lambda must be finite");
    if (distance_to_spectrum(eigenvalues(a1), lambda) <= pole_threshold(a1))
        throw Error(ErrorKind::PoleAt, "lambda lies on the spectrum of A1", 0.0, lambda);
}

CMatrix resolvent_times_input(const Realization& r, cplx lambda) {
    check_not_pole(r.a1, lambda);
    const Eigen::Index n = r.state_dim();
    CMatrix shifted = lambda * CMatrix::Identity(n, n) - r.a1;
    return checked_solve(shifted, r.b * r.sigma1, "lambda I - A1");
}

CMatrix eval_transfer(const Realization& r, cplx lambda) {
    const Eigen::Index p = r.io_dim();
    if (r.state_dim() == 0) return CMatrix::Identity(p, p);
    const CMatrix y = resolvent_times_input(r, lambda);
    const CMatrix z = checked_solve(r.x, y, "X");
    return CMatrix::Identity(p, p) - r.b.adjoint() * z;
}

KernelValue kernel_ks(const Realization& r, cplx lambda, cplx w) {
    const Eigen::Index p = r.io_dim();
    KernelValue kv;
    if (r.state_dim() == 0) {
        kv.resolvent = CMatrix::Zero(p, p);
    } else {
        const CMatrix rl = resolvent_times_input(r, lambda);
        const CMatrix rw = resolvent_times_input(r, w);
        kv.resolvent = rw.adjoint() * checked_solve(r.x, rl, "X");
    }
    const cplx denom = std::conj(w) + lambda;
    if (std::abs(denom) > 1e-12 * (1.0 + std::abs(lambda) + std::abs(w))) {
        const CMatrix sl = eval_transfer(r, lambda);
        const CMatrix sw = eval_transfer(r, w);
        kv.quotient = (r.sigma1 - sw.adjoint() * r.sigma1 * sl) / denom;
        kv.mismatch = fro(*kv.quotient - kv.resolvent);
    }
    return kv;
}

InnerResidual sigma1_inner_residual(const Realization& r, const std::vector<double>& omegas,
                                    const std::vector<cplx>& rhp_points) {
    InnerResidual out;
    for (double om : omegas) {
        const CMatrix s = eval_transfer(r, cplx(0.0, om));
        out.axis = std::max(out.axis, fro(s.adjoint() * r.sigma1 * s - r.sigma1));
    }
    for (cplx z : rhp_points) {
        const CMatrix s = eval_transfer(r, z);
        out.rhp = std::max(out.rhp, max_eigenvalue_hermitian(s.adjoint() * r.sigma1 * s - r.sigma1));
    }
    return out;
}

CMatrix markov_moment(const Realization& r, std::size_t i) {
    const Eigen::Index p = r.io_dim();
    if (r.state_dim() == 0) return CMatrix::Zero(p, p);
    CMatrix v = r.b * r.sigma1;
    for (std::size_t k = 0; k < i; ++k) v = r.a1 * v;
    return r.b.adjoint() * checked_solve(r.x, v, "X");
}

std::vector<CMatrix> markov_moments(const Realization& r, std::size_t count) {
    std::vector<CMatrix> out;
    const Eigen::Index p = r.io_dim();
    if (r.state_dim() == 0) {
        out.assign(count, CMatrix::Zero(p, p));
        return out;
    }
    const CMatrix left = checked_solve(r.x.adjoint(), r.b, "X").adjoint(); // B* X^{-1}
    CMatrix v = r.b * r.sigma1;
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(left * v);
        v = r.a1 * v;
    }
    return out;
}

CMatrix pick_matrix(const Realization& r, std::size_t depth) {
    const Eigen::Index p = r.io_dim();
    const Eigen::Index m = static_cast<Eigen::Index>(depth + 1);
    CMatrix out = CMatrix::Zero(m * p, m * p);
    if (r.state_dim() == 0) return out;
    std::vector<CMatrix> cols; // A1^j B
    CMatrix v = r.b;
    for (Eigen::Index j = 0; j < m; ++j) {
        cols.push_back(v);
        v = r.a1 * v;
    }
    const CMatrix xinv = checked_inverse(r.x, "X");
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            out.block(i * p, j * p, p, p) = cols[i].adjoint() * xinv * cols[j];
    return out;
}

} // namespace vesselkit
