#include "vesselkit/schur.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace vesselkit {

CMatrix make_j(const CMatrix& sigma1) {
    const Eigen::Index p = sigma1.rows();
    CMatrix j = CMatrix::Zero(2 * p, 2 * p);
    j.topLeftCorner(p, p) = -sigma1;
    j.bottomRightCorner(p, p) = sigma1;
    return j;
}

namespace {

void check_step_shape(const SchurStepData& step, const CMatrix& sigma1) {
    if (step.xi.size() != sigma1.rows() || step.eta.size() != sigma1.rows())
        throw Error(ErrorKind::DimensionMismatch, "xi and eta must be 1 x p rows");
    if (!(step.w.real() > 0.0))
        throw Error(ErrorKind::InvalidArgument, "interpolation node needs Re w > 0", 0.0, step.w);
}

cplx quad(const CRow& u, const CMatrix& s, const CRow& v) { return (u * s * v.adjoint())(0, 0); }

void require_admissible(const SchurStepData& step, const CMatrix& sigma1, std::size_t index) {
    const double xt = xtilde(step, sigma1);
    if (!(xt > admissibility_floor(step, sigma1)))
        throw Error(ErrorKind::InadmissibleDirection,
                    "step " + std::to_string(index) + " has Xtilde = " + std::to_string(xt),
                    static_cast<double>(index), step.w);
}

} // namespace

double xtilde(const SchurStepData& step, const CMatrix& sigma1) {
    check_step_shape(step, sigma1);
    const cplx num = quad(step.xi, sigma1, step.xi) - quad(step.eta, sigma1, step.eta);
    const double scale = (step.xi.squaredNorm() + step.eta.squaredNorm()) * fro(sigma1);
    if (std::abs(num.imag()) > 1e-12 * std::max(1.0, scale))
        throw Error(ErrorKind::NotReal, "Xtilde has an imaginary part", num.imag());
    return num.real() / (2.0 * step.w.real());
}

double admissibility_floor(const SchurStepData& step, const CMatrix& sigma1) {
    return 1e-8 * (step.xi.squaredNorm() + step.eta.squaredNorm()) * spectral_norm(sigma1);
}

bool is_admissible(const SchurStepData& step, const CMatrix& sigma1) {
    return xtilde(step, sigma1) > admissibility_floor(step, sigma1);
}

CMatrix ThetaFunction::eval(cplx lambda) const { return eval_transfer(realization, lambda); }

double ThetaFunction::j_inner_residual(const std::vector<double>& omegas) const {
    return sigma1_inner_residual(realization, omegas).axis;
}

ThetaFunction build_theta_single(const SchurStepData& step, const CMatrix& sigma1) {
    require_admissible(step, sigma1, 0);
    return build_theta_multi(std::vector<SchurStepData>{step}, sigma1);
}

CMatrix node_gram(const std::vector<SchurStepData>& steps, const CMatrix& sigma1) {
    const Eigen::Index n = static_cast<Eigen::Index>(steps.size());
    CMatrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        check_step_shape(steps[i], sigma1);
        for (Eigen::Index j = 0; j < n; ++j) {
            const cplx num = quad(steps[i].xi, sigma1, steps[j].xi) - quad(steps[i].eta, sigma1, steps[j].eta);
            g(i, j) = num / (std::conj(steps[i].w) + steps[j].w);
        }
    }
    return hermitian_part(g);
}

ThetaFunction build_theta_multi(const std::vector<SchurStepData>& steps, const CMatrix& sigma1) {
    const Eigen::Index n = static_cast<Eigen::Index>(steps.size());
    const Eigen::Index p = sigma1.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < i; ++j)
            if (std::abs(steps[i].w - steps[j].w) <= 1e-12 * (1.0 + std::abs(steps[i].w)))
                throw Error(ErrorKind::DuplicateNode, "two nodes share the same w", static_cast<double>(i),
                            steps[i].w);
    ThetaFunction th;
    th.sigma1 = sigma1;
    th.realization.sigma1 = make_j(sigma1);
    th.realization.a1 = CMatrix::Zero(n, n);
    th.realization.b = CMatrix::Zero(n, 2 * p);
    for (Eigen::Index i = 0; i < n; ++i) {
        th.realization.a1(i, i) = -std::conj(steps[i].w);
        th.realization.b.block(i, 0, 1, p) = -steps[i].eta;
        th.realization.b.block(i, p, 1, p) = steps[i].xi;
    }
    th.realization.x = node_gram(steps, sigma1);
    if (n > 0) {
        const double lmin = min_eigenvalue_hermitian(th.realization.x);
        if (!(lmin > 1e-12 * std::max(1.0, fro(th.realization.x))))
            throw Error(ErrorKind::GramNotPositive, "node Gram matrix is not positive definite", lmin);
    }
    return th;
}

ThetaFunction build_theta_multi(const std::vector<cplx>& ws, const std::vector<CRow>& xis,
                                const Realization& s) {
    if (ws.size() != xis.size()) throw Error(ErrorKind::DimensionMismatch, "ws and xis differ in length");
    std::vector<SchurStepData> steps;
    for (std::size_t i = 0; i < ws.size(); ++i) {
        const CMatrix sw = eval_transfer(s, ws[i]);
        steps.push_back({ws[i], xis[i], xis[i] * sw.adjoint()});
    }
    return build_theta_multi(steps, s.sigma1);
}

CMatrix lft_apply(const ThetaFunction& theta, const CMatrix& w_value, cplx lambda) {
    const Eigen::Index p = theta.p();
    if (w_value.rows() != p || w_value.cols() != p)
        throw Error(ErrorKind::DimensionMismatch, "LFT argument must be p x p");
    const CMatrix th = theta.eval(lambda);
    const CMatrix den = th.topLeftCorner(p, p) + w_value * th.bottomLeftCorner(p, p);
    const CMatrix num = th.topRightCorner(p, p) + w_value * th.bottomRightCorner(p, p);
    if (min_singular_ratio(den) <= 1e-13)
        throw Error(ErrorKind::SingularDenominator, "Theta11 + W Theta21 is singular", 0.0, lambda);
    return checked_solve(den, num, "LFT denominator");
}

CMatrix lft_apply(const ThetaFunction& theta, const Realization& w, cplx lambda) {
    return lft_apply(theta, eval_transfer(w, lambda), lambda);
}

Realization schur_step_realization(const Realization& s0, const SchurStepData& step) {
    const CMatrix& sig = s0.sigma1;
    check_step_shape(step, sig);
    require_admissible(step, sig, 0);
    const double xt = xtilde(step, sig);
    const Eigen::Index n = s0.state_dim();
    const Eigen::Index p = s0.io_dim();
    const CRow diff = step.eta - step.xi;

    Realization r;
    r.sigma1 = sig;
    r.b.resize(n + 1, p);
    r.b.topRows(n) = s0.b;
    r.b.row(n) = diff;

    r.x = CMatrix::Zero(n + 1, n + 1);
    r.x.topLeftCorner(n, n) = s0.x;
    r.x(n, n) = xt;

    r.a1 = CMatrix::Zero(n + 1, n + 1);
    r.a1.topLeftCorner(n, n) = s0.a1;
    if (n > 0) {
        r.a1.block(0, n, n, 1) = s0.b * sig * step.xi.adjoint() / xt;
        const CMatrix bx = checked_solve(s0.x.adjoint(), s0.b, "X0").adjoint(); // B0* X0^{-1}
        r.a1.block(n, 0, 1, n) = -step.eta * sig * bx;
    }
    r.a1(n, n) = -std::conj(step.w) - quad(step.eta, sig, diff) / xt;
    return r;
}

Realization an_closed_form(const std::vector<SchurStepData>& steps, const CMatrix& sigma1) {
    const Eigen::Index n = static_cast<Eigen::Index>(steps.size());
    const Eigen::Index p = sigma1.rows();
    std::vector<double> xt(steps.size());
    for (std::size_t i = 0; i < steps.size(); ++i) {
        check_step_shape(steps[i], sigma1);
        require_admissible(steps[i], sigma1, i);
        xt[i] = xtilde(steps[i], sigma1);
    }
    Realization r;
    r.sigma1 = sigma1;
    r.b.resize(n, p);
    r.x = CMatrix::Zero(n, n);
    r.a1 = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const CRow di = steps[i].eta - steps[i].xi;
        r.b.row(i) = di;
        r.x(i, i) = xt[i];
        for (Eigen::Index j = 0; j < n; ++j) {
            const CRow dj = steps[j].eta - steps[j].xi;
            if (i == j)
                r.a1(i, i) = -std::conj(steps[i].w) - quad(steps[i].eta, sigma1, dj) / xt[i];
            else if (j > i)
                r.a1(i, j) = quad(di, sigma1, steps[j].xi) / xt[j];
            else
                r.a1(i, j) = -quad(steps[i].eta, sigma1, dj) / xt[j];
        }
    }
    return r;
}

Realization iterate_from_identity(const std::vector<SchurStepData>& steps, const CMatrix& sigma1) {
    Realization r = Realization::identity(sigma1);
    for (std::size_t i = 0; i < steps.size(); ++i) {
        check_step_shape(steps[i], sigma1);
        require_admissible(steps[i], sigma1, i);
        r = schur_step_realization(r, steps[i]);
    }
    const Realization closed = an_closed_form(steps, sigma1);
    const double scale = 1.0 + fro(r.a1) + fro(r.b) + fro(r.x);
    const double gap = fro(closed.a1 - r.a1) + fro(closed.b - r.b) + fro(closed.x - r.x);
    if (gap > 1e-10 * scale)
        throw std::logic_error("iterated Schur steps disagree with the closed form");
    return r;
}

std::vector<SchurStepData> interpolating_steps(const std::vector<SchurStepData>& nodes,
                                               const CMatrix& sigma1) {
    const Eigen::Index p = sigma1.rows();
    std::vector<SchurStepData> transformed;
    std::vector<ThetaFunction> thetas;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        check_step_shape(nodes[k], sigma1);
        for (std::size_t j = 0; j < k; ++j)
            if (std::abs(nodes[k].w - nodes[j].w) <= 1e-12 * (1.0 + std::abs(nodes[k].w)))
                throw Error(ErrorKind::DuplicateNode, "two nodes share the same w", static_cast<double>(k),
                            nodes[k].w);
        CMatrix c(2 * p, 1);
        c.topRows(p) = -nodes[k].eta.adjoint();
        c.bottomRows(p) = nodes[k].xi.adjoint();
        for (const ThetaFunction& th : thetas) c = th.eval(nodes[k].w) * c;
        SchurStepData step{nodes[k].w, c.bottomRows(p).adjoint(), -c.topRows(p).adjoint()};
        require_admissible(step, sigma1, k);
        thetas.push_back(build_theta_single(step, sigma1));
        transformed.push_back(step);
    }
    std::reverse(transformed.begin(), transformed.end());
    return transformed;
}

double interpolation_residual(const Realization& s, const SchurStepData& step) {
    const CMatrix sw = eval_transfer(s, step.w);
    return fro(sw * step.xi.adjoint() - step.eta.adjoint());
}

SchurStepData find_admissible_direction(const Realization& s, const SearchGrid& grid) {
    const Eigen::Index p = s.io_dim();
    std::vector<double> re, im{0.0};
    for (int k = 0; k < 9; ++k) re.push_back(0.1 * std::pow(100.0, k / 8.0));
    for (int k = 0; k < 5; ++k) {
        const double v = 0.1 * std::pow(100.0, k / 4.0);
        im.push_back(v);
        im.push_back(-v);
    }
    std::vector<CRow> rows;
    for (Eigen::Index k = 0; k < p; ++k) rows.push_back(CRow::Unit(p, k));
    std::mt19937_64 rng(grid.seed);
    std::normal_distribution<double> gauss;
    for (std::size_t k = 0; k < grid.random_rows; ++k) {
        CRow v(p);
        for (Eigen::Index j = 0; j < p; ++j) v(j) = cplx(gauss(rng), gauss(rng));
        rows.push_back(v / v.norm());
    }
    for (double y : im)
        for (double x : re) {
            const cplx w(x, y);
            CMatrix sw;
            try {
                sw = eval_transfer(s, w);
            } catch (const Error& e) {
                if (e.kind() == ErrorKind::PoleAt) continue;
                throw;
            }
            for (const CRow& xi : rows) {
                SchurStepData step{w, xi, xi * sw.adjoint()};
                if (is_admissible(step, s.sigma1)) return step;
            }
        }
    throw Error(ErrorKind::NotFound, "no admissible direction on the search grid");
}

} // namespace vesselkit
