#include "vesselkit/models.hpp"

#include <algorithm>
#include <cmath>

namespace vesselkit {

CMatrix sl_sigma1() { return from_rows({{0.0, 1.0}, {1.0, 0.0}}); }
CMatrix sl_sigma2() { return from_rows({{1.0, 0.0}, {0.0, 0.0}}); }
CMatrix sl_gamma() { return from_rows({{0.0, 0.0}, {0.0, kI}}); }

VesselParams sl_vessel_params(double a, double b) {
    return VesselParams::constant(a, b, sl_sigma1(), sl_sigma2(), sl_gamma());
}

namespace {

ScalarFunction gamma_star_entry(std::shared_ptr<const VesselTrajectory> traj, Eigen::Index i, Eigen::Index j,
                                cplx scale) {
    if (!traj) throw Error(ErrorKind::InvalidArgument, "null trajectory");
    return [traj, i, j, scale](double t, std::size_t order) {
        const TrajectoryJet jet = trajectory_jet(*traj, t, order);
        std::vector<cplx> c(order + 1);
        for (std::size_t m = 0; m <= order; ++m) c[m] = scale * jet.gamma_star[m](i, j);
        return Jet(std::move(c));
    };
}

} // namespace

SLModel SLModel::from_expr(const nlohmann::json& spec) { return {parse_expr(spec)}; }

SLModel SLModel::from_tau(ScalarFunction tau) {
    return {[tau](double t, std::size_t order) {
        const Jet j = tau(t, order + 1);
        if (std::abs(j.value()) < 1e-300) throw Error(ErrorKind::SingularOperator, "tau vanishes", t);
        return (j.derivative() / j.truncate(order)) * cplx(-1.0);
    }};
}

SLModel SLModel::from_trajectory(std::shared_ptr<const VesselTrajectory> traj) {
    return {gamma_star_entry(std::move(traj), 0, 1, -1.0)};
}

cplx SLModel::beta_at(double t) const { return beta(t, 0).value(); }
cplx SLModel::dbeta(double t) const { return beta(t, 1).derivative_value(1); }

Jet SLModel::pi11_jet(double t, std::size_t order) const {
    const Jet b = beta(t, order + 1);
    return b.derivative() - b.truncate(order) * b.truncate(order);
}

cplx SLModel::pi11(double t) const { return pi11_jet(t, 0).value(); }

cplx SLModel::q(double t) const {
    const Jet b = beta(t, 1);
    return pi11(t) + b.derivative_value(1) + b.value() * b.value();
}

CMatrix SLModel::target_gamma_star(double t) const {
    const double b = beta_at(t).real(), p = pi11(t).real();
    return from_rows({{-kI * p, -b}, {b, kI}});
}

double sl_shape_residual(const VesselTrajectory& traj) {
    const auto shared = std::make_shared<const VesselTrajectory>(traj);
    const SLModel model = SLModel::from_trajectory(shared);
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k)
        worst = std::max(worst, fro(traj.gamma_star[k] - model.target_gamma_star(traj.t[k])));
    return worst;
}

double sl_output_lde_check(const VesselTrajectory& traj, cplx lambda, const ScalarFunction& q) {
    if (traj.size() < 5) throw Error(ErrorKind::InvalidArgument, "need at least five trajectory points");
    check_not_pole(traj.a1, lambda);
    const auto phi = fundamental_path(traj, lambda, LdeKind::Input);
    const Eigen::Index p = traj.params.p;
    std::vector<CRow> y1(traj.size());
    double scale = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        y1[k] = (eval_transfer(traj.snapshot(k), lambda) * phi[k]).row(0);
        scale = std::max(scale, y1[k].cwiseAbs().maxCoeff());
    }
    if (scale == 0.0) return 0.0;
    const double h = traj.grid.step();
    double worst = 0.0;
    for (std::size_t k = 2; k + 2 < traj.size(); ++k) {
        const cplx coef = q(traj.t[k], 0).value() + kI * lambda;
        const CRow d2 = (-y1[k + 2] + 16.0 * y1[k + 1] - 30.0 * y1[k] + 16.0 * y1[k - 1] - y1[k - 2]) / (12.0 * h * h);
        const CRow r = d2 - coef * y1[k];
        for (Eigen::Index j = 0; j < p; ++j) worst = std::max(worst, std::abs(r(j)));
    }
    return worst / scale;
}

double sl_output_lde_check(const VesselTrajectory& traj, cplx lambda) {
    const SLModel model = SLModel::from_trajectory(std::make_shared<const VesselTrajectory>(traj));
    return sl_output_lde_check(traj, lambda, [model](double t, std::size_t order) {
        return Jet::constant(model.q(t), order);
    });
}

Realization sl_soliton_realization() {
    Realization r;
    r.a1 = from_rows({{-kI}});
    r.b = from_rows({{1.0, kI}});
    r.x = from_rows({{1.0}});
    r.sigma1 = sl_sigma1();
    return r;
}

CMatrix nls_sigma2() { return from_rows({{0.5, 0.0}, {0.0, -0.5}}); }

VesselParams nls_vessel_params(double a, double b) {
    return VesselParams::constant(a, b, identity(2), nls_sigma2(), CMatrix::Zero(2, 2));
}

NLSModel NLSModel::from_expr(const nlohmann::json& spec) { return {parse_expr(spec)}; }

NLSModel NLSModel::from_trajectory(std::shared_ptr<const VesselTrajectory> traj) {
    return {gamma_star_entry(std::move(traj), 0, 1, 1.0)};
}

cplx NLSModel::beta_at(double t) const { return beta(t, 0).value(); }

CMatrix NLSModel::target_gamma_star(double t) const {
    const cplx b = beta_at(t);
    return from_rows({{0.0, b}, {-std::conj(b), 0.0}});
}

double nls_shape_residual(const VesselTrajectory& traj) {
    const NLSModel model = NLSModel::from_trajectory(std::make_shared<const VesselTrajectory>(traj));
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k)
        worst = std::max(worst, fro(traj.gamma_star[k] - model.target_gamma_star(traj.t[k])));
    return worst;
}

} // namespace vesselkit
