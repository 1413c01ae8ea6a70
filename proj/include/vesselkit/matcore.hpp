#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "vesselkit/error.hpp"

namespace vesselkit {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CRow = Eigen::RowVectorXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline const cplx kI{0.0, 1.0};

struct Tolerance {
    double abs = 1e-12;
    double rel = 0.0;

    double bound(double scale) const { return abs + rel * scale; }
};

struct ODEGrid {
    double t_start = 0.0;
    double t_end = 1.0;
    std::size_t steps = 1000;

    double step() const { return (t_end - t_start) / static_cast<double>(steps); }
    double at(std::size_t k) const;
    // nearest node, or OffGrid if further than half a step away
    std::size_t index_of(double t) const;
    void validate() const;
};

bool all_finite(const CMatrix& m);
void require_finite(const CMatrix& m, const char* what);
void require_square(const CMatrix& m, const char* what);
void require_same_shape(const CMatrix& a, const CMatrix& b, const char* what);

CMatrix hermitian_part(const CMatrix& m);
double hermitian_defect(const CMatrix& m);
double fro(const CMatrix& m);
double spectral_norm(const CMatrix& m);
double min_singular_ratio(const CMatrix& m);

// Inverse through a pivoted LU; throws SingularOperator when the matrix is numerically singular.
CMatrix checked_inverse(const CMatrix& m, const char* what);
CMatrix checked_solve(const CMatrix& m, const CMatrix& rhs, const char* what);

CMatrix identity(std::size_t n);
CMatrix from_rows(std::initializer_list<std::initializer_list<cplx>> rows);
Eigen::VectorXcd eigenvalues(const CMatrix& m);
double distance_to_spectrum(const Eigen::VectorXcd& spectrum, cplx z);

// Solves A X + X B = C.  When the operator is singular the minimum norm
// least-squares solution is returned if C lies in its range.
CMatrix solve_sylvester(const CMatrix& a, const CMatrix& b, const CMatrix& c);

struct SylvesterReport {
    CMatrix solution;               // minimum norm particular solution
    std::vector<CMatrix> nullspace; // orthonormal basis of the kernel, reshaped
    std::size_t rank = 0;
    double sigma_max = 0.0;
    double range_residual = 0.0;    // || L x - c || for the least-squares x
    bool in_range = true;
};

// Full SVD analysis of X -> A X + X B; never throws on singularity.
SylvesterReport analyze_sylvester(const CMatrix& a, const CMatrix& b, const CMatrix& c,
                                  double rank_threshold = 1e-9);

// A X + X A* + Q = 0, symmetrized.
CMatrix solve_lyapunov(const CMatrix& a, const CMatrix& q);

struct PositivityResult {
    bool positive = false;
    double min_eigenvalue = 0.0;
};

PositivityResult is_positive_definite(const CMatrix& m, const Tolerance& tol = {});
double min_eigenvalue_hermitian(const CMatrix& m);
double max_eigenvalue_hermitian(const CMatrix& m);

using OdeRhs = std::function<CMatrix(double, const CMatrix&)>;
// Called after each accepted step with (step index, t, state); may modify the state
// and returns false to stop the integration early.
using PostStep = std::function<bool(std::size_t, double, CMatrix&)>;

CMatrix rk4_step(const OdeRhs& rhs, double t, const CMatrix& y, double h);
std::vector<CMatrix> ode_integrate(const OdeRhs& rhs, const CMatrix& y0, const ODEGrid& grid,
                                   const PostStep& post = {});

// (1/2 pi i) times the closed contour integral over the circle, trapezoid rule.
CMatrix contour_integral(const std::function<CMatrix(cplx)>& f, cplx center, double radius,
                         std::size_t nodes);

// Packs several matrices into one column so they can share an integrator.
class StatePacker {
public:
    void add(Eigen::Index rows, Eigen::Index cols);
    Eigen::Index size() const { return total_; }
    CMatrix pack(const std::vector<CMatrix>& parts) const;
    CMatrix part(const CMatrix& packed, std::size_t index) const;

private:
    struct Slot { Eigen::Index rows, cols, offset; };
    std::vector<Slot> slots_;
    Eigen::Index total_ = 0;
};

// Runs body(i) for i in [0, count) on up to VESSELKIT_THREADS threads.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);
std::size_t thread_cap();

} // namespace vesselkit
