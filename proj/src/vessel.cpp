#include "vesselkit/vessel.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace vesselkit {

VesselParams VesselParams::constant(double a, double b, const CMatrix& sigma1, const CMatrix& sigma2,
                                    const CMatrix& gamma) {
    VesselParams vp;
    vp.a = a;
    vp.b = b;
    vp.p = sigma1.rows();
    vp.sigma1 = [sigma1](double) { return sigma1; };
    vp.sigma2 = [sigma2](double) { return sigma2; };
    vp.gamma = [gamma](double) { return gamma; };
    const CMatrix zero = CMatrix::Zero(sigma1.rows(), sigma1.cols());
    vp.dsigma1 = [zero](double) { return zero; };
    vp.constant_coefficients = true;
    return vp;
}

double VesselParams::constraint_residual(std::size_t samples) const {
    double worst = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = a + (b - a) * static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(1, samples - 1));
        const CMatrix g = gamma(t);
        worst = std::max(worst, fro(g + g.adjoint() + dsigma1(t)));
    }
    return worst;
}

void VesselParams::validate(std::size_t samples) const {
    if (!sigma1 || !sigma2 || !gamma || !dsigma1)
        throw Error(ErrorKind::InvalidArgument, "vessel parameters need all four providers");
    if (!(a < b)) throw Error(ErrorKind::InvalidArgument, "vessel interval must satisfy a < b");
    for (std::size_t k = 0; k < samples; ++k) {
        const double t = a + (b - a) * static_cast<double>(k) / static_cast<double>(std::max<std::size_t>(1, samples - 1));
        const CMatrix s1 = sigma1(t), s2 = sigma2(t);
        if (s1.rows() != p || s1.cols() != p || s2.rows() != p || s2.cols() != p || gamma(t).rows() != p ||
            dsigma1(t).rows() != p)
            throw Error(ErrorKind::DimensionMismatch, "vessel parameter sizes differ from p");
        if (hermitian_defect(s1) > 1e-10 * std::max(1.0, fro(s1)) || hermitian_defect(s2) > 1e-10 * std::max(1.0, fro(s2)))
            throw Error(ErrorKind::NotHermitian, "sigma1 and sigma2 must be Hermitian", t);
        if (min_singular_ratio(s1) <= 1e-12) throw Error(ErrorKind::SingularOperator, "sigma1 is singular", t);
    }
    const double res = constraint_residual(samples);
    if (res > 1e-9) throw Error(ErrorKind::ConstraintViolated, "gamma + gamma* + sigma1' != 0", res);
}

std::size_t VesselTrajectory::anchor() const { return grid.index_of(t2_0) - first; }

std::size_t VesselTrajectory::index_of(double t2) const {
    const std::size_t k = grid.index_of(t2);
    if (k < first || k >= first + size())
        throw Error(ErrorKind::OffGrid, "t2 lies outside the stored trajectory", t2);
    return k - first;
}

Realization VesselTrajectory::snapshot(std::size_t k) const {
    if (k >= size()) throw Error(ErrorKind::OffGrid, "trajectory index out of range", static_cast<double>(k));
    Realization r;
    r.a1 = a1;
    r.b = b[k];
    r.x = x[k];
    r.sigma1 = params.sigma1(t[k]);
    return r;
}

CMatrix vessel_rhs_b(const VesselParams& params, const CMatrix& a1, const CMatrix& b, double t) {
    const CMatrix s1inv = checked_inverse(params.sigma1(t), "sigma1");
    return (-a1 * b * params.sigma2(t) - b * params.gamma(t) - b * params.dsigma1(t)) * s1inv;
}

CMatrix vessel_rhs_x(const VesselParams& params, const CMatrix& b, double t) {
    return b * params.sigma2(t) * b.adjoint();
}

CMatrix linkage_gamma_star(const VesselParams& params, const CMatrix& b, const CMatrix& x, double t) {
    const CMatrix g = params.gamma(t);
    if (b.rows() == 0) return g;
    const CMatrix m = b.adjoint() * checked_solve(x, b, "X");
    const CMatrix s1 = params.sigma1(t), s2 = params.sigma2(t);
    return g + s2 * m * s1 - s1 * m * s2;
}

namespace {

struct Packed {
    StatePacker packer;
    OdeRhs rhs;
};

Packed vessel_system(const VesselParams& params, const CMatrix& a1) {
    Packed ps;
    const Eigen::Index n = a1.rows();
    ps.packer.add(n, params.p);
    ps.packer.add(n, n);
    const StatePacker pk = ps.packer;
    ps.rhs = [pk, params, a1](double t, const CMatrix& y) {
        const CMatrix b = pk.part(y, 0);
        return pk.pack({vessel_rhs_b(params, a1, b, t), vessel_rhs_x(params, b, t)});
    };
    return ps;
}

bool near_singular(const CMatrix& x) { return x.rows() > 0 && min_singular_ratio(x) < 1e-8; }

} // namespace

VesselTrajectory evolve_vessel(const Realization& r0, const VesselParams& params, double t2_0,
                               const ODEGrid& grid) {
    grid.validate();
    params.validate();
    r0.validate(1e-8);
    if (r0.io_dim() != params.p) throw Error(ErrorKind::DimensionMismatch, "realization and parameters differ in p");
    const std::size_t k0 = grid.index_of(t2_0);
    if (std::abs(grid.at(k0) - t2_0) > 1e-12 * (1.0 + std::abs(t2_0)))
        throw Error(ErrorKind::OffGrid, "t2_0 must be a grid node", t2_0);
    if (grid.t_start < params.a - 1e-12 || grid.t_end > params.b + 1e-12)
        throw Error(ErrorKind::InvalidArgument, "grid leaves the parameter interval");
    const CMatrix s1 = params.sigma1(t2_0);
    if (fro(s1 - r0.sigma1) > 1e-10 * std::max(1.0, fro(s1)))
        throw Error(ErrorKind::SigmaMismatch, "realization sigma1 differs from sigma1(t2_0)", fro(s1 - r0.sigma1));
    if (near_singular(r0.x)) throw Error(ErrorKind::GridExhausted, "X is singular at t2_0");

    VesselTrajectory traj;
    traj.params = params;
    traj.a1 = r0.a1;
    traj.t2_0 = grid.at(k0);
    traj.grid = grid;

    const Packed sys = vessel_system(params, r0.a1);
    auto march = [&](int dir, std::vector<CMatrix>& states) {
        CMatrix y = sys.packer.pack({r0.b, hermitian_part(r0.x)});
        double det_prev = r0.x.rows() > 0 ? hermitian_part(r0.x).determinant().real() : 1.0;
        std::size_t k = k0;
        while ((dir > 0 && k < grid.steps) || (dir < 0 && k > 0)) {
            const std::size_t next = dir > 0 ? k + 1 : k - 1;
            CMatrix ny = rk4_step(sys.rhs, grid.at(k), y, grid.at(next) - grid.at(k));
            require_finite(ny, "vessel state");
            const CMatrix b = sys.packer.part(ny, 0);
            const CMatrix x = hermitian_part(sys.packer.part(ny, 1));
            const double det = x.rows() > 0 ? x.determinant().real() : 1.0;
            // an eigenvalue can cross zero between nodes without the node values being small
            if (near_singular(x) || (det > 0) != (det_prev > 0)) {
                traj.truncated = true;
                traj.warning = "X loses invertibility near t2 = " + std::to_string(grid.at(next)) +
                               "; trajectory truncated";
                return;
            }
            det_prev = det;
            ny = sys.packer.pack({b, x});
            states.push_back(ny);
            y = ny;
            k = next;
        }
    };
    std::vector<CMatrix> fwd, bwd;
    march(+1, fwd);
    march(-1, bwd);

    traj.first = k0 - bwd.size();
    auto push = [&](const CMatrix& y, double t) {
        traj.t.push_back(t);
        traj.b.push_back(sys.packer.part(y, 0));
        traj.x.push_back(sys.packer.part(y, 1));
        traj.gamma_star.push_back(linkage_gamma_star(params, traj.b.back(), traj.x.back(), t));
    };
    for (std::size_t i = bwd.size(); i-- > 0;) push(bwd[i], grid.at(k0 - 1 - i));
    push(sys.packer.pack({r0.b, hermitian_part(r0.x)}), grid.at(k0));
    for (std::size_t i = 0; i < fwd.size(); ++i) push(fwd[i], grid.at(k0 + 1 + i));
    return traj;
}

CMatrix gamma_star_at(const VesselTrajectory& traj, double t) {
    const double h = traj.grid.step();
    const double rel = (t - traj.grid.t_start) / h;
    long k = static_cast<long>(std::floor(rel + 1e-9));
    const long lo = static_cast<long>(traj.first), hi = static_cast<long>(traj.first + traj.size()) - 1;
    k = std::clamp(k, lo, hi);
    const std::size_t pos = static_cast<std::size_t>(k - lo);
    const double dt = t - traj.t[pos];
    if (std::abs(dt) <= 1e-12 * h) return traj.gamma_star[pos];
    const Packed sys = vessel_system(traj.params, traj.a1);
    const CMatrix y = rk4_step(sys.rhs, traj.t[pos], sys.packer.pack({traj.b[pos], traj.x[pos]}), dt);
    return linkage_gamma_star(traj.params, sys.packer.part(y, 0), hermitian_part(sys.packer.part(y, 1)), t);
}

CMatrix eval_S_t2(const VesselTrajectory& traj, cplx lambda, double t2) {
    return eval_transfer(traj.snapshot_at(t2), lambda);
}

LdeCoefficients input_lde(const VesselParams& params) { return {params.sigma1, params.sigma2, params.gamma}; }

LdeCoefficients output_lde(const VesselTrajectory& traj) {
    auto shared = std::make_shared<VesselTrajectory>(traj);
    return {traj.params.sigma1, traj.params.sigma2, [shared](double t) { return gamma_star_at(*shared, t); }};
}

namespace {

OdeRhs lde_rhs(const LdeCoefficients& lde, cplx lambda) {
    return [lde, lambda](double t, const CMatrix& u) {
        return CMatrix(checked_solve(lde.sigma1(t), lde.sigma2(t) * lambda + lde.gamma(t), "sigma1") * u);
    };
}

} // namespace

CMatrix transport(const LdeCoefficients& lde, cplx lambda, double t_from, double t_to, double h) {
    const Eigen::Index p = lde.sigma1(t_from).rows();
    CMatrix u = CMatrix::Identity(p, p);
    if (t_to == t_from) return u;
    const std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(std::abs(t_to - t_from) / h)));
    const double hs = (t_to - t_from) / static_cast<double>(n);
    const OdeRhs rhs = lde_rhs(lde, lambda);
    for (std::size_t k = 0; k < n; ++k) u = rk4_step(rhs, t_from + hs * static_cast<double>(k), u, hs);
    return u;
}

std::vector<CMatrix> transport_path(const LdeCoefficients& lde, cplx lambda, const ODEGrid& grid,
                                     std::size_t k0, std::size_t k_lo, std::size_t k_hi) {
    if (k_lo > k0 || k0 > k_hi || k_hi > grid.steps)
        throw Error(ErrorKind::OffGrid, "transport range is not on the grid");
    const Eigen::Index p = lde.sigma1(grid.at(k0)).rows();
    std::vector<CMatrix> out(k_hi - k_lo + 1);
    const OdeRhs rhs = lde_rhs(lde, lambda);
    out[k0 - k_lo] = CMatrix::Identity(p, p);
    for (std::size_t k = k0; k < k_hi; ++k)
        out[k + 1 - k_lo] = rk4_step(rhs, grid.at(k), out[k - k_lo], grid.at(k + 1) - grid.at(k));
    for (std::size_t k = k0; k > k_lo; --k)
        out[k - 1 - k_lo] = rk4_step(rhs, grid.at(k), out[k - k_lo], grid.at(k - 1) - grid.at(k));
    return out;
}

CMatrix fundamental_solution(const VesselParams& params, cplx lambda, double t2_from, double t2_to,
                             const ODEGrid& grid) {
    const std::size_t a = grid.index_of(t2_from), b = grid.index_of(t2_to);
    return transport(input_lde(params), lambda, grid.at(a), grid.at(b), grid.step());
}

CMatrix fundamental_solution(const VesselTrajectory& traj, cplx lambda, double t2_from, double t2_to,
                             LdeKind kind) {
    const std::size_t a = traj.index_of(t2_from), b = traj.index_of(t2_to);
    const LdeCoefficients lde = kind == LdeKind::Input ? input_lde(traj.params) : output_lde(traj);
    return transport(lde, lambda, traj.t[a], traj.t[b], traj.grid.step());
}

std::vector<CMatrix> fundamental_path(const VesselTrajectory& traj, cplx lambda, LdeKind kind) {
    const LdeCoefficients lde = kind == LdeKind::Input ? input_lde(traj.params) : output_lde(traj);
    return transport_path(lde, lambda, traj.grid, traj.first + traj.anchor(), traj.first,
                          traj.first + traj.size() - 1);
}

double intertwining_residual(const VesselTrajectory& traj, const std::vector<cplx>& lambdas,
                             const std::vector<double>& t2s) {
    std::vector<std::size_t> idx;
    for (double t : t2s) idx.push_back(traj.index_of(t));
    const std::size_t k0 = traj.anchor();
    std::vector<double> worst(lambdas.size(), 0.0);
    const LdeCoefficients out_lde = output_lde(traj);
    parallel_for(lambdas.size(), [&](std::size_t li) {
        const cplx lam = lambdas[li];
        const auto phi = transport_path(input_lde(traj.params), lam, traj.grid, traj.first + k0, traj.first,
                                        traj.first + traj.size() - 1);
        const auto phis = transport_path(out_lde, lam, traj.grid, traj.first + k0, traj.first,
                                         traj.first + traj.size() - 1);
        const CMatrix s0 = eval_transfer(traj.snapshot(k0), lam);
        for (std::size_t k : idx) {
            const CMatrix s = eval_transfer(traj.snapshot(k), lam);
            worst[li] = std::max(worst[li], fro(s * phi[k] - phis[k] * s0) / fro(phi[k]));
        }
    });
    return worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
}

CMatrix ds_exact(const VesselTrajectory& traj, cplx lambda, std::size_t k) {
    const Realization r = traj.snapshot(k);
    const Eigen::Index p = r.io_dim();
    if (r.state_dim() == 0) return CMatrix::Zero(p, p);
    const double t = traj.t[k];
    const CMatrix db = vessel_rhs_b(traj.params, r.a1, r.b, t);
    const CMatrix dx = vessel_rhs_x(traj.params, r.b, t);
    const CMatrix ds1 = traj.params.dsigma1(t);
    check_not_pole(r.a1, lambda);
    const CMatrix shifted = lambda * CMatrix::Identity(r.state_dim(), r.state_dim()) - r.a1;
    const CMatrix xinv = checked_inverse(r.x, "X");
    const CMatrix rb = checked_solve(shifted, r.b, "lambda I - A1");
    const CMatrix rdb = checked_solve(shifted, db, "lambda I - A1");
    return -(db.adjoint() * xinv * rb * r.sigma1 - r.b.adjoint() * xinv * dx * xinv * rb * r.sigma1 +
             r.b.adjoint() * xinv * rdb * r.sigma1 + r.b.adjoint() * xinv * rb * ds1);
}

double ds_residual(const VesselTrajectory& traj, cplx lambda, double t2) {
    const std::size_t k = traj.index_of(t2);
    const double t = traj.t[k];
    const CMatrix s = eval_transfer(traj.snapshot(k), lambda);
    const CMatrix s1 = traj.params.sigma1(t), s2 = traj.params.sigma2(t);
    const CMatrix lhs = ds_exact(traj, lambda, k);
    const CMatrix rhs = checked_solve(s1, s2 * lambda + traj.gamma_star[k], "sigma1") * s -
                        s * checked_solve(s1, s2 * lambda + traj.params.gamma(t), "sigma1");
    return fro(lhs - rhs);
}

double symmetry_residual(const Realization& r, const std::vector<cplx>& lambdas) {
    double worst = 0.0;
    for (cplx lam : lambdas) {
        const CMatrix s = eval_transfer(r, lam);
        const CMatrix sm = eval_transfer(r, -std::conj(lam));
        if (min_singular_ratio(sm) <= 1e-12)
            throw Error(ErrorKind::SingularValue, "S(-conj(lambda)) is singular", 0.0, lam);
        const CMatrix rhs = checked_solve(r.sigma1, checked_inverse(sm, "S").adjoint() * r.sigma1, "sigma1");
        worst = std::max(worst, fro(s - rhs));
    }
    return worst;
}

double symmetry_residual(const VesselTrajectory& traj, const std::vector<cplx>& lambdas,
                         const std::vector<double>& t2s) {
    double worst = 0.0;
    for (double t : t2s) worst = std::max(worst, symmetry_residual(traj.snapshot_at(t), lambdas));
    return worst;
}

double tau_function(const VesselTrajectory& traj, double t2) {
    const std::size_t k = traj.index_of(t2);
    if (traj.x[k].rows() == 0) return 1.0;
    return traj.x[k].determinant().real();
}

double detphi_residual(const LdeCoefficients& in, const LdeCoefficients& out, const ODEGrid& grid,
                       double t2_0, const std::vector<cplx>& lambdas, const std::vector<double>& t2s) {
    const std::size_t k0 = grid.index_of(t2_0);
    std::size_t lo = k0, hi = k0;
    std::vector<std::size_t> idx;
    for (double t : t2s) {
        idx.push_back(grid.index_of(t));
        lo = std::min(lo, idx.back());
        hi = std::max(hi, idx.back());
    }
    std::vector<double> worst(lambdas.size(), 0.0);
    parallel_for(lambdas.size(), [&](std::size_t li) {
        const auto phi = transport_path(in, lambdas[li], grid, k0, lo, hi);
        const auto phis = transport_path(out, lambdas[li], grid, k0, lo, hi);
        for (std::size_t k : idx) {
            const cplx d = phi[k - lo].determinant(), ds = phis[k - lo].determinant();
            worst[li] = std::max(worst[li], std::abs(ds - d) / std::abs(d));
        }
    });
    return worst.empty() ? 0.0 : *std::max_element(worst.begin(), worst.end());
}

double detphi_residual(const VesselTrajectory& traj, const std::vector<cplx>& lambdas,
                       const std::vector<double>& t2s) {
    for (double t : t2s) traj.index_of(t);
    return detphi_residual(input_lde(traj.params), output_lde(traj), traj.grid, traj.t2_0, lambdas, t2s);
}

ContourSpec default_contour(const CMatrix& a1) {
    ContourSpec spec;
    const Eigen::VectorXcd ev = eigenvalues(a1);
    if (ev.size() == 0) return spec;
    spec.center = ev.mean();
    double spread = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) spread = std::max(spread, std::abs(ev(i) - spec.center));
    spec.radius = spread + 1.0;
    return spec;
}

CMatrix b_via_contour(const Realization& r0, const VesselParams& params, double t2_0, double t2,
                      const ContourSpec& spec) {
    const Eigen::Index n = r0.state_dim();
    if (n == 0) return CMatrix::Zero(0, r0.io_dim());
    if (spec.nodes < 16 || spec.nodes % 2 != 0)
        throw Error(ErrorKind::InvalidArgument, "contour needs an even node count >= 16");
    const Eigen::VectorXcd ev = eigenvalues(r0.a1);
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i) - spec.center) >= spec.radius)
            throw Error(ErrorKind::InvalidArgument, "contour does not enclose the spectrum of A1", 0.0, ev(i));
    const LdeCoefficients lde = input_lde(params);
    const double h = 1.0 / static_cast<double>(spec.steps);
    const CMatrix b0s = r0.b * params.sigma1(t2_0);
    const Eigen::Index p = r0.io_dim();
    std::vector<CMatrix> samples(spec.nodes);
    parallel_for(spec.nodes, [&](std::size_t k) {
        const double theta = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(spec.nodes);
        const cplx e = std::polar(1.0, theta);
        const cplx lam = spec.center + spec.radius * e;
        const CMatrix phi = transport(lde, lam, t2_0, t2, h);
        const CMatrix res = checked_solve(lam * CMatrix::Identity(n, n) - r0.a1, b0s, "lambda I - A1");
        samples[k] = (spec.radius * e) * (res * checked_inverse(phi, "Phi"));
    });
    CMatrix full = CMatrix::Zero(n, p), half = CMatrix::Zero(n, p);
    for (std::size_t k = 0; k < spec.nodes; ++k) {
        if (!all_finite(samples[k]))
            throw Error(ErrorKind::QuadratureDiverged, "non-finite contour sample", static_cast<double>(k));
        full += samples[k];
        if (k % 2 == 0) half += samples[k];
    }
    full /= static_cast<double>(spec.nodes);
    half /= static_cast<double>(spec.nodes / 2);
    if (fro(full - half) > 1e-3 * (1.0 + fro(full)))
        throw Error(ErrorKind::QuadratureDiverged, "contour quadrature has not converged", fro(full - half));
    return full * checked_inverse(params.sigma1(t2), "sigma1");
}

VesselTrajectory generalized_schur_step(const VesselTrajectory& traj, const SchurStepData& step, double t2_0) {
    const Realization snap = traj.snapshot_at(t2_0);
    return evolve_vessel(schur_step_realization(snap, step), traj.params, traj.t[traj.index_of(t2_0)], traj.grid);
}

namespace {

std::vector<CMatrix> cauchy(const std::vector<CMatrix>& f, const std::vector<CMatrix>& g, std::size_t order) {
    std::vector<CMatrix> out(order + 1);
    for (std::size_t m = 0; m <= order; ++m) {
        out[m] = CMatrix::Zero(f[0].rows(), g[0].cols());
        for (std::size_t j = 0; j <= m; ++j) out[m] += f[j] * g[m - j];
    }
    return out;
}

// coefficients about t + s from coefficients about t
std::vector<CMatrix> recenter(const std::vector<CMatrix>& c, double s, std::size_t order) {
    std::vector<CMatrix> out(order + 1);
    for (std::size_t m = 0; m <= order; ++m) {
        out[m] = CMatrix::Zero(c[0].rows(), c[0].cols());
        double binom = 1.0; // C(j, m) s^{j-m}
        for (std::size_t j = m; j < c.size(); ++j) {
            out[m] += binom * c[j];
            binom *= s * static_cast<double>(j + 1) / static_cast<double>(j + 1 - m);
        }
    }
    return out;
}

} // namespace

TrajectoryJet trajectory_jet(const VesselTrajectory& traj, double t, std::size_t order) {
    if (!traj.params.constant_coefficients)
        throw Error(ErrorKind::InvalidArgument, "trajectory jets need constant vessel parameters");
    const double lo = traj.t.front(), hi = traj.t.back();
    const double h = traj.grid.step();
    if (t < lo - 1e-12 * h || t > hi + 1e-12 * h) throw Error(ErrorKind::OffGrid, "t lies outside the trajectory", t);
    const std::size_t k = std::min(traj.size() - 1, static_cast<std::size_t>(std::llround((t - lo) / h)));
    const double s = t - traj.t[k];
    const CMatrix s1 = traj.params.sigma1(t), s2 = traj.params.sigma2(t), g = traj.params.gamma(t);
    const CMatrix s1inv = checked_inverse(s1, "sigma1");
    const std::size_t wide = order + 24; // B and X are entire; the extra terms absorb the recentring
    std::vector<CMatrix> b(wide + 1), x(wide + 1);
    b[0] = traj.b[k];
    for (std::size_t m = 0; m < wide; ++m)
        b[m + 1] = (-traj.a1 * b[m] * s2 - b[m] * g) * s1inv / static_cast<double>(m + 1);
    std::vector<CMatrix> bs(wide + 1), bstar(wide + 1);
    for (std::size_t m = 0; m <= wide; ++m) {
        bs[m] = b[m] * s2;
        bstar[m] = b[m].adjoint();
    }
    const std::vector<CMatrix> dx = cauchy(bs, bstar, wide);
    x[0] = traj.x[k];
    for (std::size_t m = 0; m < wide; ++m) x[m + 1] = dx[m] / static_cast<double>(m + 1);

    TrajectoryJet jet;
    jet.b = recenter(b, s, order);
    jet.x = recenter(x, s, order);
    const std::size_t n = static_cast<std::size_t>(traj.a1.rows());
    std::vector<CMatrix> y(order + 1);
    const Eigen::FullPivLU<CMatrix> lu(jet.x[0]);
    if (n > 0 && !lu.isInvertible()) throw Error(ErrorKind::SingularOperator, "X is singular", t);
    for (std::size_t m = 0; m <= order; ++m) {
        if (m == 0) {
            y[0] = n > 0 ? CMatrix(lu.inverse()) : CMatrix::Zero(0, 0);
            continue;
        }
        CMatrix acc = CMatrix::Zero(n, n);
        for (std::size_t j = 1; j <= m; ++j) acc += jet.x[j] * y[m - j];
        y[m] = -lu.solve(acc);
    }
    std::vector<CMatrix> bj_star(order + 1);
    for (std::size_t m = 0; m <= order; ++m) bj_star[m] = jet.b[m].adjoint();
    jet.m = cauchy(cauchy(bj_star, y, order), jet.b, order);
    for (std::size_t m = 0; m <= order; ++m) {
        CMatrix gs = s2 * jet.m[m] * s1 - s1 * jet.m[m] * s2;
        if (m == 0) gs += g;
        jet.gamma_star.push_back(gs);
    }
    return jet;
}

SimilarityReport similarity_between(const Realization& r1, const Realization& r2, double tol) {
    const Eigen::Index n = r1.state_dim();
    if (r2.state_dim() != n || r1.io_dim() != r2.io_dim())
        throw Error(ErrorKind::DimensionMismatch, "realizations differ in size");
    SimilarityReport rep;
    const Eigen::Index p = r1.io_dim();
    if (n == 0) {
        rep.v = CMatrix::Zero(0, 0);
        rep.similar = true;
        return rep;
    }
    // unknown vec(V), column-major
    CMatrix sys = CMatrix::Zero(n * n + n * p, n * n);
    for (Eigen::Index j = 0; j < n; ++j) {
        sys.block(j * n, j * n, n, n) += r2.a1;
        for (Eigen::Index k = 0; k < n; ++k)
            for (Eigen::Index i = 0; i < n; ++i) sys(j * n + i, k * n + i) -= r1.a1(k, j);
    }
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index k = 0; k < n; ++k)
            for (Eigen::Index i = 0; i < n; ++i) sys(n * n + j * n + i, k * n + i) += r1.b(k, j);
    CVector rhs = CVector::Zero(n * n + n * p);
    for (Eigen::Index j = 0; j < p; ++j) rhs.segment(n * n + j * n, n) = r2.b.col(j);
    const CVector v = sys.completeOrthogonalDecomposition().solve(rhs);
    rep.v = Eigen::Map<const CMatrix>(v.data(), n, n);
    rep.residual = (sys * v - rhs).norm() / std::max(1.0, fro(r2.b));
    rep.x_residual = fro(r2.x - rep.v * r1.x * rep.v.adjoint()) / std::max(1.0, fro(r2.x));
    rep.similar = rep.residual <= tol && min_singular_ratio(rep.v) > 1e-10 && rep.x_residual <= tol;
    return rep;
}

} // namespace vesselkit
