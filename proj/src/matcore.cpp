#include "vesselkit/matcore.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace vesselkit {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SingularOperator: return "SingularOperator";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::NonFiniteSample: return "NonFiniteSample";
    case ErrorKind::PoleAt: return "PoleAt";
    case ErrorKind::DegenerateDenominator: return "DegenerateDenominator";
    case ErrorKind::NotReal: return "NotReal";
    case ErrorKind::InadmissibleDirection: return "InadmissibleDirection";
    case ErrorKind::GramNotPositive: return "GramNotPositive";
    case ErrorKind::DuplicateNode: return "DuplicateNode";
    case ErrorKind::SingularDenominator: return "SingularDenominator";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::SigmaMismatch: return "SigmaMismatch";
    case ErrorKind::GridExhausted: return "GridExhausted";
    case ErrorKind::OffGrid: return "OffGrid";
    case ErrorKind::SingularValue: return "SingularValue";
    case ErrorKind::QuadratureDiverged: return "QuadratureDiverged";
    case ErrorKind::NotSimilar: return "NotSimilar";
    case ErrorKind::NotInRange: return "NotInRange";
    case ErrorKind::ConstraintViolated: return "ConstraintViolated";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::SingularTheta: return "SingularTheta";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IOFailure: return "IOFailure";
    }
    return "Unknown";
}

double ODEGrid::at(std::size_t k) const {
    if (k == steps) return t_end;
    return t_start + step() * static_cast<double>(k);
}

std::size_t ODEGrid::index_of(double t) const {
    const double h = step();
    const double k = std::round((t - t_start) / h);
    if (k < 0.0 || k > static_cast<double>(steps) ||
        std::abs(t - at(static_cast<std::size_t>(k))) > 0.5 * h * (1.0 + 1e-9))
        throw Error(ErrorKind::OffGrid, "t2 = " + std::to_string(t) + " is not on the grid", t);
    return static_cast<std::size_t>(k);
}

void ODEGrid::validate() const {
    if (!(t_start < t_end) || steps < 1 || !std::isfinite(t_start) || !std::isfinite(t_end))
        throw Error(ErrorKind::InvalidArgument, "grid needs t_start < t_end and steps >= 1");
}

bool all_finite(const CMatrix& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const cplx z = m.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

void require_finite(const CMatrix& m, const char* what) {
    if (!all_finite(m))
        throw Error(ErrorKind::NonFiniteState, std::string(what) + " has non-finite entries");
}

void require_square(const CMatrix& m, const char* what) {
    if (m.rows() != m.cols())
        throw Error(ErrorKind::DimensionMismatch, std::string(what) + " must be square");
}

void require_same_shape(const CMatrix& a, const CMatrix& b, const char* what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(ErrorKind::DimensionMismatch, what);
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

double hermitian_defect(const CMatrix& m) { return (m - m.adjoint()).norm(); }

double fro(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.norm(); }

double spectral_norm(const CMatrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    return svd.singularValues()(0);
}

double min_singular_ratio(const CMatrix& m) {
    if (m.size() == 0) return 1.0;
    Eigen::JacobiSVD<CMatrix> svd(m);
    const auto& s = svd.singularValues();
    if (s(0) == 0.0) return 0.0;
    return s(s.size() - 1) / s(0);
}

CMatrix checked_inverse(const CMatrix& m, const char* what) {
    return checked_solve(m, CMatrix::Identity(m.rows(), m.cols()), what);
}

CMatrix checked_solve(const CMatrix& m, const CMatrix& rhs, const char* what) {
    require_square(m, what);
    if (m.rows() == 0) return CMatrix::Zero(0, rhs.cols());
    Eigen::FullPivLU<CMatrix> lu(m);
    lu.setThreshold(1e-14);
    if (!lu.isInvertible())
        throw Error(ErrorKind::SingularOperator, std::string(what) + " is singular");
    CMatrix x = lu.solve(rhs);
    require_finite(x, what);
    return x;
}

CMatrix identity(std::size_t n) {
    return CMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

CMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows) {
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = r == 0 ? 0 : static_cast<Eigen::Index>(rows.begin()->size());
    CMatrix m(r, c);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        if (static_cast<Eigen::Index>(row.size()) != c)
            throw Error(ErrorKind::DimensionMismatch, "ragged matrix literal");
        Eigen::Index j = 0;
        for (const cplx& z : row) m(i, j++) = z;
        ++i;
    }
    return m;
}

Eigen::VectorXcd eigenvalues(const CMatrix& m) {
    require_square(m, "eigenvalue argument");
    if (m.rows() == 0) return Eigen::VectorXcd(0);
    Eigen::ComplexEigenSolver<CMatrix> es(m, false);
    return es.eigenvalues();
}

double distance_to_spectrum(const Eigen::VectorXcd& spectrum, cplx z) {
    double d = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < spectrum.size(); ++i) d = std::min(d, std::abs(spectrum(i) - z));
    return d;
}

namespace {

CMatrix sylvester_operator(const CMatrix& a, const CMatrix& b) {
    const Eigen::Index n = a.rows(), m = b.rows();
    CMatrix op = CMatrix::Zero(n * m, n * m);
    // column-major vec: vec(AX) = (I kron A) vec X, vec(XB) = (B^T kron I) vec X
    for (Eigen::Index j = 0; j < m; ++j) {
        op.block(j * n, j * n, n, n) += a;
        for (Eigen::Index k = 0; k < m; ++k) {
            const cplx bkj = b(k, j);
            if (bkj == cplx(0.0)) continue;
            for (Eigen::Index i = 0; i < n; ++i) op(j * n + i, k * n + i) += bkj;
        }
    }
    return op;
}

void check_sylvester_shapes(const CMatrix& a, const CMatrix& b, const CMatrix& c) {
    require_square(a, "Sylvester A");
    require_square(b, "Sylvester B");
    if (c.rows() != a.rows() || c.cols() != b.rows())
        throw Error(ErrorKind::DimensionMismatch, "Sylvester C must be rows(A) x rows(B)");
    require_finite(a, "Sylvester A");
    require_finite(b, "Sylvester B");
    require_finite(c, "Sylvester C");
}

} // namespace

SylvesterReport analyze_sylvester(const CMatrix& a, const CMatrix& b, const CMatrix& c,
                                  double rank_threshold) {
    check_sylvester_shapes(a, b, c);
    const Eigen::Index n = a.rows(), m = b.rows();
    SylvesterReport rep;
    if (n * m == 0) {
        rep.solution = CMatrix::Zero(n, m);
        return rep;
    }
    const CMatrix op = sylvester_operator(a, b);
    const CVector rhs = Eigen::Map<const CVector>(c.data(), n * m);
    Eigen::JacobiSVD<CMatrix> svd(op, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    rep.sigma_max = s(0);
    const double cut = rank_threshold * rep.sigma_max;
    CVector x = CVector::Zero(n * m);
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) > cut && s(k) > 0.0) {
            ++rep.rank;
            const cplx coef = svd.matrixU().col(k).dot(rhs) / s(k);
            x += coef * svd.matrixV().col(k);
        } else {
            CVector v = svd.matrixV().col(k);
            rep.nullspace.push_back(Eigen::Map<CMatrix>(v.data(), n, m));
        }
    }
    rep.solution = Eigen::Map<CMatrix>(x.data(), n, m);
    rep.range_residual = (op * x - rhs).norm();
    const double scale = std::max(rhs.norm(), rep.sigma_max * x.norm());
    rep.in_range = rep.range_residual <= rank_threshold * scale;
    return rep;
}

CMatrix solve_sylvester(const CMatrix& a, const CMatrix& b, const CMatrix& c) {
    check_sylvester_shapes(a, b, c);
    const Eigen::Index n = a.rows(), m = b.rows();
    if (n * m == 0) return CMatrix::Zero(n, m);
    const CMatrix op = sylvester_operator(a, b);
    Eigen::FullPivLU<CMatrix> lu(op);
    lu.setThreshold(1e-12);
    if (lu.isInvertible()) {
        const CVector rhs = Eigen::Map<const CVector>(c.data(), n * m);
        CVector x = lu.solve(rhs);
        return Eigen::Map<CMatrix>(x.data(), n, m);
    }
    SylvesterReport rep = analyze_sylvester(a, b, c);
    if (!rep.in_range)
        throw Error(ErrorKind::SingularOperator,
                    "Sylvester operator is singular and C is outside its range", rep.range_residual);
    return rep.solution;
}

CMatrix solve_lyapunov(const CMatrix& a, const CMatrix& q) {
    return hermitian_part(solve_sylvester(a, a.adjoint(), -q));
}

double min_eigenvalue_hermitian(const CMatrix& m) {
    if (m.rows() == 0) return std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double max_eigenvalue_hermitian(const CMatrix& m) {
    if (m.rows() == 0) return -std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(m.rows() - 1);
}

PositivityResult is_positive_definite(const CMatrix& m, const Tolerance& tol) {
    require_square(m, "positivity argument");
    require_finite(m, "positivity argument");
    if (hermitian_defect(m) > tol.abs * fro(m))
        throw Error(ErrorKind::NotHermitian, "matrix is not Hermitian", hermitian_defect(m));
    PositivityResult r;
    r.min_eigenvalue = min_eigenvalue_hermitian(m);
    r.positive = r.min_eigenvalue > tol.abs;
    return r;
}

CMatrix rk4_step(const OdeRhs& rhs, double t, const CMatrix& y, double h) {
    const CMatrix k1 = rhs(t, y);
    require_finite(k1, "RK4 stage");
    const CMatrix k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1);
    require_finite(k2, "RK4 stage");
    const CMatrix k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2);
    require_finite(k3, "RK4 stage");
    const CMatrix k4 = rhs(t + h, y + h * k3);
    require_finite(k4, "RK4 stage");
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

std::vector<CMatrix> ode_integrate(const OdeRhs& rhs, const CMatrix& y0, const ODEGrid& grid,
                                   const PostStep& post) {
    grid.validate();
    require_finite(y0, "initial state");
    std::vector<CMatrix> out;
    out.reserve(grid.steps + 1);
    out.push_back(y0);
    const double h = grid.step();
    for (std::size_t k = 0; k < grid.steps; ++k) {
        CMatrix next = rk4_step(rhs, grid.at(k), out.back(), h);
        require_finite(next, "integrated state");
        if (post && !post(k + 1, grid.at(k + 1), next)) break;
        out.push_back(std::move(next));
    }
    return out;
}

CMatrix contour_integral(const std::function<CMatrix(cplx)>& f, cplx center, double radius,
                         std::size_t nodes) {
    if (nodes < 16) throw Error(ErrorKind::InvalidArgument, "contour quadrature needs >= 16 nodes");
    if (!(radius > 0.0)) throw Error(ErrorKind::InvalidArgument, "contour radius must be positive");
    CMatrix acc;
    for (std::size_t k = 0; k < nodes; ++k) {
        const double theta = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(nodes);
        const cplx e = std::polar(1.0, theta);
        CMatrix v = f(center + radius * e);
        if (!all_finite(v))
            throw Error(ErrorKind::NonFiniteSample, "contour integrand is not finite", theta,
                        center + radius * e);
        if (k == 0) acc = CMatrix::Zero(v.rows(), v.cols());
        acc += (radius * e) * v;
    }
    return acc / static_cast<double>(nodes);
}

void StatePacker::add(Eigen::Index rows, Eigen::Index cols) {
    slots_.push_back({rows, cols, total_});
    total_ += rows * cols;
}

CMatrix StatePacker::pack(const std::vector<CMatrix>& parts) const {
    if (parts.size() != slots_.size()) throw Error(ErrorKind::DimensionMismatch, "packer arity");
    CMatrix out(total_, 1);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const Slot& s = slots_[i];
        if (parts[i].rows() != s.rows || parts[i].cols() != s.cols)
            throw Error(ErrorKind::DimensionMismatch, "packer slot shape");
        for (Eigen::Index c = 0; c < s.cols; ++c)
            out.block(s.offset + c * s.rows, 0, s.rows, 1) = parts[i].col(c);
    }
    return out;
}

CMatrix StatePacker::part(const CMatrix& packed, std::size_t index) const {
    const Slot& s = slots_.at(index);
    CMatrix out(s.rows, s.cols);
    for (Eigen::Index c = 0; c < s.cols; ++c)
        out.col(c) = packed.block(s.offset + c * s.rows, 0, s.rows, 1);
    return out;
}

std::size_t thread_cap() {
    std::size_t cap = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("VESSELKIT_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) cap = static_cast<std::size_t>(v);
    }
    return cap;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min(thread_cap(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count || failed.load()) return;
                try {
                    body(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace vesselkit
