#include "vesselkit/cli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <set>

#include "vesselkit/expr.hpp"
#include "vesselkit/fixtures.hpp"
#include "vesselkit/models.hpp"
#include "vesselkit/moments.hpp"

namespace vesselkit::cli {

using io::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::ConfigInvalid, what); }

const std::set<std::string> common_keys = {"kind", "out", "seed", "thresholds", "grid", "params"};

struct Ctx {
    const json& cfg;
    std::string kind;
    fs::path out;
    std::uint64_t seed = 12345;
    std::optional<std::size_t> steps;
    std::map<std::string, double> thresholds;
    RunResult result;

    Ctx(const json& c, const RunOptions& opts) : cfg(c) {
        kind = cfg.at("kind").get<std::string>();
        out = opts.out_dir ? *opts.out_dir : fs::path(cfg.value("out", std::string("vesselkit_out")));
        if (cfg.contains("seed")) {
            if (!cfg["seed"].is_number_unsigned()) bad("seed: expected a non-negative integer");
            seed = cfg["seed"].get<std::uint64_t>();
        }
        if (opts.seed) seed = *opts.seed;
        steps = opts.steps;
        if (cfg.contains("thresholds")) {
            if (!cfg["thresholds"].is_object()) bad("thresholds: expected an object");
            for (auto it = cfg["thresholds"].begin(); it != cfg["thresholds"].end(); ++it) {
                if (!it->is_number()) bad("thresholds." + it.key() + ": expected a number");
                thresholds[it.key()] = it->get<double>();
            }
        }
    }

    void allow(std::initializer_list<const char*> extra) const {
        std::set<std::string> ok = common_keys;
        for (const char* k : extra) ok.insert(k);
        for (auto it = cfg.begin(); it != cfg.end(); ++it)
            if (!ok.count(it.key())) bad(kind + ": unknown field " + it.key());
    }

    ODEGrid grid(double a, double b) const {
        ODEGrid g = io::grid_from(cfg.contains("grid") ? cfg["grid"] : json(), ODEGrid{a, b, 1000});
        if (steps) {
            if (*steps == 0) bad("--steps must be positive");
            g.steps = *steps;
        }
        return g;
    }

    void check(const std::string& name, double value, double default_threshold) {
        const auto it = thresholds.find(name);
        const double thr = it == thresholds.end() ? default_threshold : it->second;
        result.checks.push_back({name, value, thr, std::isfinite(value) && value <= thr});
    }

    // lower bound check: value >= threshold
    void check_min(const std::string& name, double value, double default_threshold) {
        const auto it = thresholds.find(name);
        const double thr = it == thresholds.end() ? default_threshold : it->second;
        result.checks.push_back({name, value, thr, std::isfinite(value) && value >= thr});
    }

    void flag(const std::string& name, bool ok) { result.checks.push_back({name, ok ? 1.0 : 0.0, 1.0, ok}); }

    void write(const std::string& name, const std::string& text) {
        const fs::path p = out / name;
        io::write_text_file(p, text);
        result.artifacts.push_back(p);
    }
};

VesselParams params_of(const Ctx& c) {
    if (!c.cfg.contains("params")) bad(c.kind + ": missing params");
    return io::params_from(c.cfg["params"]);
}

Realization realization_of(const Ctx& c, const VesselParams& params, double t2_0) {
    if (c.cfg.contains("realization")) return io::realization_from(c.cfg["realization"]);
    if (c.cfg.contains("fixture")) {
        const std::string f = c.cfg["fixture"].get<std::string>();
        if (f == "fix_a") return fixtures::fix_a();
        if (f == "fix_c") return fixtures::fix_c_realization();
        if (f == "soliton") return sl_soliton_realization();
        bad("fixture: unknown realization fixture " + f);
    }
    if (c.cfg.contains("random_states")) {
        const json& n = c.cfg["random_states"];
        if (!n.is_number_unsigned() || n.get<std::size_t>() > 16) bad("random_states: expected an integer in [0, 16]");
        std::mt19937_64 rng(c.seed);
        return fixtures::random_realization(rng, n.get<Eigen::Index>(), params.sigma1(t2_0));
    }
    bad(c.kind + ": need realization, fixture or random_states");
}

std::vector<cplx> lambdas_of(const Ctx& c) {
    if (!c.cfg.contains("lambdas")) return {{1.5, 0.5}, {3.0, 0.0}, {0.7, -2.0}};
    const json& j = c.cfg["lambdas"];
    if (!j.is_array() || j.empty()) bad("lambdas: expected a non-empty array");
    std::vector<cplx> out;
    for (const json& z : j) out.push_back(io::complex_from(z, "lambdas"));
    return out;
}

double t2_0_of(const Ctx& c, const ODEGrid& g) {
    const double t = c.cfg.contains("t2_0") ? c.cfg["t2_0"].get<double>() : g.t_start;
    try {
        return g.at(g.index_of(t));
    } catch (const Error&) {
        bad("t2_0 lies off the grid");
    }
}

std::vector<double> sample_t2(const VesselTrajectory& traj, std::size_t count = 5) {
    std::vector<double> out;
    const std::size_t n = traj.size();
    for (std::size_t k = 0; k < count; ++k) out.push_back(traj.t[(n - 1) * k / (count - 1)]);
    return out;
}

std::string trajectory_csv(const VesselTrajectory& traj) {
    std::vector<std::string> header{"t2"};
    const Eigen::Index n = traj.a1.rows(), p = traj.params.p;
    io::CsvTable::matrix_columns(header, "B", n, p);
    io::CsvTable::matrix_columns(header, "X", n, n);
    io::CsvTable::matrix_columns(header, "gamma_star", p, p);
    header.push_back("tau");
    io::CsvTable tab(header);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        std::vector<double> row{traj.t[k]};
        io::CsvTable::append_matrix(row, traj.b[k]);
        io::CsvTable::append_matrix(row, traj.x[k]);
        io::CsvTable::append_matrix(row, traj.gamma_star[k]);
        row.push_back(n == 0 ? 1.0 : traj.x[k].determinant().real());
        tab.add_row(row);
    }
    return tab.str();
}

std::string axis_csv(const Realization& r) {
    std::vector<std::string> header{"omega"};
    io::CsvTable::matrix_columns(header, "S", r.io_dim(), r.io_dim());
    io::CsvTable tab(header);
    for (int k = -100; k <= 100; ++k) {
        const double w = 0.1 * k;
        std::vector<double> row{w};
        io::CsvTable::append_matrix(row, eval_transfer(r, cplx(0.0, w)));
        tab.add_row(row);
    }
    return tab.str();
}

double max_lyapunov(const VesselTrajectory& traj) {
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const Realization r = traj.snapshot(k);
        worst = std::max(worst, r.lyapunov_residual() / std::max(1.0, r.lyapunov_scale()));
    }
    return worst;
}

std::vector<double> axis_omegas() {
    std::vector<double> w;
    for (int k = 0; k < 20; ++k) w.push_back(-5.0 + 10.0 * k / 19.0);
    return w;
}

std::vector<cplx> rhp_points(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> re(0.1, 4.0), im(-4.0, 4.0);
    std::vector<cplx> pts;
    for (int k = 0; k < 20; ++k) {
        const double a = re(rng);
        pts.emplace_back(a, im(rng));
    }
    return pts;
}

void inner_checks(Ctx& c, const Realization& r, const std::string& prefix) {
    const InnerResidual ir = sigma1_inner_residual(r, axis_omegas(), rhp_points(c.seed));
    c.check(prefix + "inner_axis", ir.axis, 1e-9);
    c.check(prefix + "inner_rhp", std::max(0.0, ir.rhp), 1e-9);
}

// Residuals shared by vessel_evolve, residual_suite and np_solve.
void vessel_checks(Ctx& c, const VesselTrajectory& traj, const std::vector<cplx>& lams, double ode_tol) {
    const auto ts = sample_t2(traj);
    c.flag("x_invertible", !traj.truncated);
    c.check("lyapunov", max_lyapunov(traj), 1e-9);
    c.check("intertwining", intertwining_residual(traj, lams, ts), ode_tol);
    double ds = 0.0;
    for (cplx l : lams)
        for (double t : ts) ds = std::max(ds, ds_residual(traj, l, t));
    c.check("ds", ds, ode_tol);
    c.check("symmetry", symmetry_residual(traj, lams, ts), 1e-8);
    c.check("detphi", detphi_residual(traj, lams, ts), ode_tol);
    double link = 0.0;
    for (double t : ts) link = std::max(link, linkage_residual(traj, t));
    c.check("linkage", link, 1e-8);
}

json checks_json(const std::vector<Check>& checks) {
    json arr = json::array();
    for (const auto& ch : checks)
        arr.push_back({{"name", ch.name}, {"value", ch.value}, {"threshold", ch.threshold}, {"pass", ch.pass}});
    return arr;
}

json trajectory_summary(const VesselTrajectory& traj) {
    return {{"t2_0", traj.t2_0},
            {"first", traj.t.front()},
            {"last", traj.t.back()},
            {"points", traj.size()},
            {"truncated", traj.truncated},
            {"warning", traj.warning}};
}

// ---- scenarios ----

void run_schur_demo(Ctx& c) {
    c.allow({"sigma1", "nodes", "random_instances"});
    const CMatrix sig = c.cfg.contains("sigma1") ? io::matrix_from(c.cfg["sigma1"], "sigma1") : identity(1);
    json data;
    if (c.cfg.contains("nodes")) {
        std::vector<SchurStepData> raw;
        for (const auto& n : io::nodes_from(c.cfg["nodes"])) raw.push_back({n.w, n.xi, n.eta});
        const auto steps = interpolating_steps(raw, sig);
        const Realization s = iterate_from_identity(steps, sig);
        const ThetaFunction th = build_theta_multi(raw, sig);
        double cond = 0.0, lft = 0.0;
        for (const auto& st : raw) cond = std::max(cond, interpolation_residual(s, st));
        for (cplx l : rhp_points(c.seed)) lft = std::max(lft, fro(eval_transfer(s, l) - lft_apply(th, identity(sig.rows()), l)));
        c.check("interpolation", cond, 1e-9);
        c.check("lft_vs_realization", lft, 1e-9);
        inner_checks(c, s, "");
        c.check("theta_j_inner", th.j_inner_residual(axis_omegas()), 1e-9);
        data["realization"] = io::to_json(s);
        data["gram"] = io::to_json(node_gram(raw, sig));
        c.write("s_axis.csv", axis_csv(s));
    }
    if (c.cfg.contains("random_instances")) {
        const json& n = c.cfg["random_instances"];
        if (!n.is_number_unsigned()) bad("random_instances: expected a non-negative integer");
        std::mt19937_64 rng(c.seed);
        double worst = 0.0;
        std::uniform_real_distribution<double> shrink(0.1, 0.8), re(0.3, 2.5), im(-2.5, 2.5);
        std::normal_distribution<double> g;
        for (std::size_t k = 0; k < n.get<std::size_t>(); ++k) {
            const Realization s0 = fixtures::random_realization(rng, static_cast<Eigen::Index>(k % 5), sig);
            SchurStepData st;
            do {
                const double wr = re(rng);
                st.w = cplx(wr, im(rng));
                st.xi = CRow(sig.rows());
                st.eta = CRow(sig.rows());
                for (Eigen::Index i = 0; i < sig.rows(); ++i) {
                    const double a = g(rng), b = g(rng), c2 = g(rng), d = g(rng);
                    st.xi(i) = cplx(a, b);
                    st.eta(i) = cplx(c2, d);
                }
                st.eta *= shrink(rng) * st.xi.norm() / st.eta.norm();
            } while (!is_admissible(st, sig) || xtilde(st, sig) <= 1e-2);
            const Realization s = schur_step_realization(s0, st);
            const ThetaFunction th = build_theta_single(st, sig);
            for (cplx l : rhp_points(c.seed + k)) worst = std::max(worst, fro(eval_transfer(s, l) - lft_apply(th, s0, l)));
        }
        c.check("random_step_vs_lft", worst, 1e-9);
        data["random_instances"] = n;
    }
    if (!c.cfg.contains("nodes") && !c.cfg.contains("random_instances")) bad("schur_demo: need nodes or random_instances");
    c.result.report["data"] = data;
}

void run_vessel_evolve(Ctx& c) {
    c.allow({"realization", "fixture", "random_states", "t2_0", "lambdas"});
    const VesselParams params = params_of(c);
    const ODEGrid g = c.grid(params.a, params.b);
    const double t0 = t2_0_of(c, g);
    const VesselTrajectory traj = evolve_vessel(realization_of(c, params, t0), params, t0, g);
    vessel_checks(c, traj, lambdas_of(c), 1e-5);
    c.result.report["data"] = {{"trajectory", trajectory_summary(traj)}};
    c.write("trajectory.csv", trajectory_csv(traj));
}

void moment_checks(Ctx& c, const VesselTrajectory& traj, std::size_t k_max) {
    double alg = 0.0, rec = 0.0, hlin = 0.0;
    for (double t : sample_t2(traj)) {
        const auto h = moments_from_trajectory(traj, t, k_max);
        alg = std::max(alg, algebraic_residual(h, traj.params.sigma1(t)));
        if (traj.a1.rows() > 0 && k_max >= static_cast<std::size_t>(traj.a1.rows())) hlin = std::max(hlin, hlin_residual(h, traj.a1));
        for (std::size_t i = 0; i + 1 <= k_max && i <= 4; ++i) {
            const double scale = 1.0 + fro(h[std::min(i + 1, k_max)]);
            rec = std::max(rec, recursion_residual(traj, t, i) / scale);
        }
    }
    c.check("moments_algebraic", alg, 1e-9);
    c.check("moments_recursion", rec, 1e-6);
    c.check("moments_hlin", hlin, 1e-8);
}

void run_moments(Ctx& c) {
    c.allow({"realization", "fixture", "random_states", "t2_0", "k_max"});
    const VesselParams params = params_of(c);
    const ODEGrid g = c.grid(params.a, params.b);
    const double t0 = t2_0_of(c, g);
    const std::size_t k_max = c.cfg.value("k_max", std::size_t{8});
    if (k_max == 0 || k_max > 32) bad("k_max: expected 1..32");
    const VesselTrajectory traj = evolve_vessel(realization_of(c, params, t0), params, t0, g);
    moment_checks(c, traj, k_max);
    double link = 0.0;
    for (double t : sample_t2(traj)) link = std::max(link, linkage_residual(traj, t));
    c.check("linkage", link, 1e-8);
    const Eigen::Index p = params.p;
    std::vector<std::string> header{"t2", "level"};
    io::CsvTable::matrix_columns(header, "H", p, p);
    io::CsvTable tab(header);
    const MomentSequence seq = moments_along(traj, k_max);
    for (std::size_t k = 0; k < seq.t.size(); ++k)
        for (std::size_t i = 0; i < seq.h[k].size(); ++i) {
            std::vector<double> row{seq.t[k], static_cast<double>(i)};
            io::CsvTable::append_matrix(row, seq.h[k][i]);
            tab.add_row(row);
        }
    c.write("moments.csv", tab.str());
    c.result.report["data"] = {{"trajectory", trajectory_summary(traj)}, {"k_max", k_max}};
}

double max_diff(const VesselTrajectory& traj, const std::function<cplx(double)>& a,
                const std::function<cplx(double)>& b) {
    double worst = 0.0;
    for (double t : traj.t) worst = std::max(worst, std::abs(a(t) - b(t)));
    return worst;
}

void run_sl_model(Ctx& c) {
    c.allow({"realization", "fixture", "random_states", "t2_0", "beta", "q", "lambda", "k_max"});
    const VesselParams params = c.cfg.contains("params") ? params_of(c) : sl_vessel_params(0.0, 1.0);
    const ODEGrid g = c.grid(params.a, params.b);
    const double t0 = t2_0_of(c, g);
    const auto traj = std::make_shared<const VesselTrajectory>(evolve_vessel(realization_of(c, params, t0), params, t0, g));
    c.flag("x_invertible", !traj->truncated);
    const SLModel model = SLModel::from_trajectory(traj);
    c.check("sl_shape", sl_shape_residual(*traj), 1e-6);
    if (c.cfg.contains("beta")) {
        const SLModel ref = SLModel::from_expr(c.cfg["beta"]);
        c.check("beta_match", max_diff(*traj, [&](double t) { return model.beta_at(t); },
                                       [&](double t) { return ref.beta_at(t); }),
                1e-6);
    }
    const cplx lam = c.cfg.contains("lambda") ? io::complex_from(c.cfg["lambda"], "lambda") : cplx(1.5, 0.5);
    const double lde = c.cfg.contains("q") ? sl_output_lde_check(*traj, lam, parse_expr(c.cfg["q"]))
                                           : sl_output_lde_check(*traj, lam);
    c.check("output_lde", lde, 1e-4);
    const std::size_t k_max = c.cfg.value("k_max", std::size_t{4});
    const MomentSequence seq = generate_moments_sl(model.beta, traj->grid, t0,
                                                   sl_level_data(moments_from_trajectory(*traj, t0, k_max)));
    c.check("moment_roundtrip", max_relative_deviation(seq, *traj), 1e-5);
    io::CsvTable tab({"t2", "beta_re", "beta_im", "pi11_re", "pi11_im", "q_re", "q_im"});
    for (double t : traj->t) {
        const cplx b = model.beta_at(t), pi = model.pi11(t), q = model.q(t);
        tab.add_row({t, b.real(), b.imag(), pi.real(), pi.imag(), q.real(), q.imag()});
    }
    c.write("sl_curves.csv", tab.str());
    c.result.report["data"] = {{"trajectory", trajectory_summary(*traj)}, {"lambda", io::to_json(lam)}};
}

void run_nls_model(Ctx& c) {
    c.allow({"realization", "fixture", "random_states", "t2_0", "beta", "k_max"});
    const VesselParams params = c.cfg.contains("params") ? params_of(c) : nls_vessel_params(0.0, 1.0);
    const ODEGrid g = c.grid(params.a, params.b);
    const double t0 = t2_0_of(c, g);
    const auto traj = std::make_shared<const VesselTrajectory>(evolve_vessel(realization_of(c, params, t0), params, t0, g));
    c.flag("x_invertible", !traj->truncated);
    const NLSModel model = NLSModel::from_trajectory(traj);
    c.check("nls_shape", nls_shape_residual(*traj), 1e-6);
    if (c.cfg.contains("beta")) {
        const NLSModel ref = NLSModel::from_expr(c.cfg["beta"]);
        c.check("beta_match", max_diff(*traj, [&](double t) { return model.beta_at(t); },
                                       [&](double t) { return ref.beta_at(t); }),
                1e-6);
    }
    const std::size_t k_max = c.cfg.value("k_max", std::size_t{4});
    const MomentSequence seq = generate_moments_nls(model.beta, traj->grid, t0,
                                                    nls_level_data(moments_from_trajectory(*traj, t0, k_max)));
    c.check("moment_roundtrip", max_relative_deviation(seq, *traj), 1e-5);
    io::CsvTable tab({"t2", "beta_re", "beta_im"});
    for (double t : traj->t) {
        const cplx b = model.beta_at(t);
        tab.add_row({t, b.real(), b.imag()});
    }
    c.write("nls_curves.csv", tab.str());
    c.result.report["data"] = {{"trajectory", trajectory_summary(*traj)}};
}

NPProblem problem_of(const Ctx& c) {
    NPProblem pr;
    pr.params = c.cfg.contains("params") ? params_of(c)
                : c.cfg.contains("model") ? io::params_from(c.cfg["model"])
                                          : fixtures::fix_b_params();
    pr.grid = c.grid(pr.params.a, pr.params.b);
    if (!c.cfg.contains("nodes")) bad(c.kind + ": missing nodes");
    pr.nodes = io::nodes_from(c.cfg["nodes"]);
    pr.t2_ref = c.cfg.contains("t2_ref") ? c.cfg["t2_ref"].get<double>() : pr.grid.t_start;
    try {
        pr.t2_ref = pr.grid.at(pr.grid.index_of(pr.t2_ref));
    } catch (const Error&) {
        bad("t2_ref lies off the grid");
    }
    return pr;
}

void run_np_solve(Ctx& c) {
    c.allow({"model", "nodes", "t2_ref", "lambdas"});
    const NPProblem pr = problem_of(c);
    const FeasibilityReport f = feasibility_same_t2(pr);
    json data = {{"gram", io::to_json(f.gram)}, {"lambda_min", f.lambda_min}, {"feasible", f.feasible}};
    c.flag("feasible", f.feasible);
    if (!f.feasible) {
        c.result.report["data"] = data;
        return;
    }
    const NPSolution sol = solve_same_t2(pr);
    const Realization s = sol.trajectory.snapshot_at(pr.t2_ref);
    double cond = 0.0;
    for (const auto& n : pr.nodes) cond = std::max(cond, fro(eval_transfer(s, n.w) * n.xi.adjoint() - n.eta.adjoint()));
    c.check("node_conditions", cond, 1e-9);
    inner_checks(c, s, "");
    vessel_checks(c, sol.trajectory, lambdas_of(c), 1e-5);
    c.check("transported_conditions", transported_condition_residual(sol.trajectory, pr.nodes, sample_t2(sol.trajectory)),
            1e-5);
    if (pr.params.constant_coefficients) {
        const PositivePair w = positive_pair(theta_trajectory(sol.theta, sol.trajectory), sol.trajectory);
        double id = 0.0, gmin = std::numeric_limits<double>::infinity();
        for (double t : sample_t2(sol.trajectory)) {
            for (cplx l : {cplx(1.0, 0.0), cplx(1.0, 1.0), cplx(2.0, 0.0)}) id = std::max(id, w.identity_residual(l, t));
            gmin = std::min(gmin, w.kernel_gram_min_eigenvalue({1.0, {1.0, 1.0}, 2.0}, t));
        }
        c.check("positive_pair_identity", id, 1e-9);
        c.check_min("positive_pair_gram_min", gmin, -1e-8);
    }
    data["solution"] = io::to_json(s);
    data["trajectory"] = trajectory_summary(sol.trajectory);
    c.result.report["data"] = data;
    c.write("s_axis.csv", axis_csv(s));
    c.write("trajectory.csv", trajectory_csv(sol.trajectory));
}

void run_np_verify(Ctx& c) {
    c.allow({"model", "nodes", "t2_ref", "candidates"});
    const NPProblem pr = problem_of(c);
    std::vector<Realization> cands;
    const json cj = c.cfg.value("candidates", json("same_t2"));
    if (cj.is_string() && cj.get<std::string>() == "same_t2") {
        cands = same_t2_candidates(pr);
    } else if (cj.is_array()) {
        for (const json& r : cj) cands.push_back(io::realization_from(r));
    } else {
        bad("candidates: expected \"same_t2\" or an array of realizations");
    }
    const MultiT2Report rep = multi_t2_verify(pr.params, pr.grid, pr.nodes, cands);
    json pairs = json::array();
    double sim = 0.0, contour = 0.0;
    bool all_similar = true;
    for (const auto& p : rep.pairs) {
        pairs.push_back({{"i", p.i},
                         {"j", p.j},
                         {"similarity_residual", p.similarity_residual},
                         {"contour_residual", p.contour_residual},
                         {"similar", p.similar},
                         {"status", p.status}});
        sim = std::max(sim, p.similarity_residual);
        contour = std::max(contour, p.contour_residual);
        all_similar = all_similar && p.similar;
    }
    c.flag("x_invertible", std::all_of(rep.invertible.begin(), rep.invertible.end(), [](bool b) { return b; }));
    c.flag("similar", all_similar);
    c.check("similarity", sim, 1e-6);
    c.check("contour", contour, 1e-5);
    c.result.report["data"] = {{"pairs", pairs}, {"verdict", rep.verdict}};
}

void run_residual_suite(Ctx& c) {
    c.allow({"fixture", "realization", "random_states", "t2_0", "lambdas", "k_max"});
    const bool fix_b = c.cfg.value("fixture", std::string()) == "fix_b";
    const VesselParams params = fix_b ? fixtures::fix_b_params() : params_of(c);
    const ODEGrid g = c.grid(params.a, params.b);
    const double t0 = fix_b ? g.t_start : t2_0_of(c, g);
    const Realization r0 = fix_b ? fixtures::fix_a() : realization_of(c, params, t0);
    const VesselTrajectory traj = evolve_vessel(r0, params, t0, g);
    inner_checks(c, r0, "initial_");
    vessel_checks(c, traj, lambdas_of(c), 1e-8);
    moment_checks(c, traj, c.cfg.value("k_max", std::size_t{8}));
    if (fix_b) {
        const std::size_t last = traj.size() - 1;
        const double t = traj.t[last];
        c.check("fix_b_B", std::abs(traj.b[last](0, 0) - std::exp(t)), 1e-8);
        c.check("fix_b_X", std::abs(traj.x[last](0, 0) - 0.5 * std::exp(2.0 * t)), 1e-8);
        double gs = 0.0;
        for (const auto& m : traj.gamma_star) gs = std::max(gs, fro(m));
        c.check("fix_b_gamma_star", gs, 1e-12);
    }
    c.result.report["data"] = {{"trajectory", trajectory_summary(traj)}};
    c.write("trajectory.csv", trajectory_csv(traj));
}

} // namespace

bool RunResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const std::vector<std::string>& scenario_kinds() {
    static const std::vector<std::string> kinds = {"schur_demo", "vessel_evolve", "moments",   "sl_model",
                                                   "nls_model",  "np_solve",      "np_verify", "residual_suite"};
    return kinds;
}

RunResult run_scenario(const json& config, const RunOptions& opts) {
    if (!config.is_object() || !config.contains("kind") || !config["kind"].is_string())
        bad("config: expected an object with a string kind");
    Ctx c(config, opts);
    try {
        if (c.kind == "schur_demo") run_schur_demo(c);
        else if (c.kind == "vessel_evolve") run_vessel_evolve(c);
        else if (c.kind == "moments") run_moments(c);
        else if (c.kind == "sl_model") run_sl_model(c);
        else if (c.kind == "nls_model") run_nls_model(c);
        else if (c.kind == "np_solve") run_np_solve(c);
        else if (c.kind == "np_verify") run_np_verify(c);
        else if (c.kind == "residual_suite") run_residual_suite(c);
        else bad("kind: unknown scenario " + c.kind);
    } catch (const json::exception& e) {
        bad(c.kind + ": " + e.what());
    }
    c.result.report["kind"] = c.kind;
    c.result.report["seed"] = c.seed;
    c.result.report["checks"] = checks_json(c.result.checks);
    c.result.report["passed"] = c.result.passed();
    json arts = json::array();
    for (const auto& a : c.result.artifacts) arts.push_back(a.filename().string());
    arts.push_back("report.json");
    c.result.report["artifacts"] = arts;
    const fs::path rp = c.out / "report.json";
    io::write_text_file(rp, io::dump(c.result.report));
    c.result.artifacts.push_back(rp);
    return c.result;
}

int run_file(const fs::path& config_path, const RunOptions& opts, std::ostream& out, std::ostream& err) {
    try {
        const RunResult r = run_scenario(io::read_json_file(config_path), opts);
        for (const auto& ch : r.checks)
            out << (ch.pass ? "PASS " : "FAIL ") << ch.name << " " << io::format_double(ch.value) << " (threshold "
                << io::format_double(ch.threshold) << ")\n";
        return r.passed() ? 0 : 2;
    } catch (const Error& e) {
        err << "vesselkit: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "vesselkit: " << e.what() << "\n";
        return 1;
    }
}

json fixtures_json() {
    json arr = json::array();
    for (const auto& d : fixtures::catalog()) arr.push_back({{"name", d.name}, {"summary", d.summary}});
    json data;
    data["fixtures"] = arr;
    data["fix_a"] = io::to_json(fixtures::fix_a());
    data["fix_c"] = io::to_json(fixtures::fix_c_realization());
    data["soliton"] = io::to_json(sl_soliton_realization());
    json nodes = json::array();
    for (const auto& n : fixtures::fix_d().nodes)
        nodes.push_back({{"w", io::to_json(n.w)},
                         {"xi", io::to_json(CMatrix(n.xi)).at(0)},
                         {"eta", io::to_json(CMatrix(n.eta)).at(0)},
                         {"t2", n.t2}});
    data["fix_d"] = {{"nodes", nodes}, {"t2_ref", 0.0}};
    return data;
}

} // namespace vesselkit::cli
