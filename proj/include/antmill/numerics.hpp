#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "antmill/grid.hpp"

namespace antmill {

// General dense complex carrier used by the stability and integral-operator
// analyses.
using DenseMatrix = Eigen::MatrixXcd;

// Solver failures (non-convergence, blow-up) are never silent.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Finite differences: second-order central stencils in the interior,
// second-order one-sided closures at the endpoints.
// ---------------------------------------------------------------------------

template <typename Derived>
auto ddr(const RadialGrid& grid, const Eigen::MatrixBase<Derived>& f) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = grid.size();
    if (f.size() != n) throw std::invalid_argument("ddr: field length does not match grid");
    const double h = grid.dr();
    RadialField<Scalar> d(n);
    d(0) = (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
    for (Eigen::Index i = 1; i + 1 < n; ++i) d(i) = (f(i + 1) - f(i - 1)) / (2.0 * h);
    d(n - 1) = (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h);
    return d;
}

template <typename Derived>
auto d2dr2(const RadialGrid& grid, const Eigen::MatrixBase<Derived>& f) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = grid.size();
    if (f.size() != n) throw std::invalid_argument("d2dr2: field length does not match grid");
    const double h2 = grid.dr() * grid.dr();
    RadialField<Scalar> d(n);
    for (Eigen::Index i = 1; i + 1 < n; ++i) d(i) = (f(i + 1) - 2.0 * f(i) + f(i - 1)) / h2;
    if (n >= 4) {
        d(0) = (2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - f(3)) / h2;
        d(n - 1) = (2.0 * f(n - 1) - 5.0 * f(n - 2) + 4.0 * f(n - 3) - f(n - 4)) / h2;
    } else {
        // three nodes: the centered stencil is the only choice at the ends
        d(0) = (f(0) - 2.0 * f(1) + f(2)) / h2;
        d(n - 1) = d(0);
    }
    return d;
}

// Matrix representations of the same stencils, for operator assembly.
inline Eigen::MatrixXd ddr_matrix(const RadialGrid& grid) {
    const Eigen::Index n = grid.size();
    const double h = grid.dr();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    m(0, 0) = -3.0 / (2.0 * h);
    m(0, 1) = 4.0 / (2.0 * h);
    m(0, 2) = -1.0 / (2.0 * h);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        m(i, i - 1) = -1.0 / (2.0 * h);
        m(i, i + 1) = 1.0 / (2.0 * h);
    }
    m(n - 1, n - 1) = 3.0 / (2.0 * h);
    m(n - 1, n - 2) = -4.0 / (2.0 * h);
    m(n - 1, n - 3) = 1.0 / (2.0 * h);
    return m;
}

inline Eigen::MatrixXd d2dr2_matrix(const RadialGrid& grid) {
    const Eigen::Index n = grid.size();
    const double h2 = grid.dr() * grid.dr();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 1; i + 1 < n; ++i) {
        m(i, i - 1) = 1.0 / h2;
        m(i, i) = -2.0 / h2;
        m(i, i + 1) = 1.0 / h2;
    }
    if (n >= 4) {
        m(0, 0) = 2.0 / h2;
        m(0, 1) = -5.0 / h2;
        m(0, 2) = 4.0 / h2;
        m(0, 3) = -1.0 / h2;
        m(n - 1, n - 1) = 2.0 / h2;
        m(n - 1, n - 2) = -5.0 / h2;
        m(n - 1, n - 3) = 4.0 / h2;
        m(n - 1, n - 4) = -1.0 / h2;
    } else {
        m(0, 0) = m(n - 1, 0) = 1.0 / h2;
        m(0, 1) = m(n - 1, 1) = -2.0 / h2;
        m(0, 2) = m(n - 1, 2) = 1.0 / h2;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Periodic quadrature over theta in [-pi, pi), samples at -pi + 2*pi*j/m.
// Exact for trigonometric polynomials of degree below m/2.
// ---------------------------------------------------------------------------

template <typename Derived>
auto trapezoid_theta(const Eigen::MatrixBase<Derived>& samples) {
    if (samples.size() < 2) throw std::invalid_argument("trapezoid_theta needs at least 2 samples");
    return samples.sum() * (2.0 * std::numbers::pi / static_cast<double>(samples.size()));
}

// ---------------------------------------------------------------------------
// Dense linear algebra.
// ---------------------------------------------------------------------------

inline Eigen::VectorXcd eigenvalues(const DenseMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eigenvalues: matrix must be square");
    if (m.rows() == 0) return Eigen::VectorXcd();
    Eigen::ComplexEigenSolver<DenseMatrix> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw NumericError("eigenvalue solver did not converge");
    return solver.eigenvalues();
}

inline Eigen::VectorXd singular_values(const DenseMatrix& m) {
    if (m.size() == 0) return Eigen::VectorXd();
    Eigen::BDCSVD<DenseMatrix> svd(m);
    if (svd.info() != Eigen::Success) throw NumericError("singular value decomposition did not converge");
    return svd.singularValues();
}

inline double min_singular_value(const DenseMatrix& m) {
    const Eigen::VectorXd sv = singular_values(m);
    return sv.size() == 0 ? 0.0 : sv.minCoeff();
}

enum class NormKind { two, inf, frobenius };

inline double op_norm(const DenseMatrix& m, NormKind kind) {
    if (m.size() == 0) return 0.0;
    switch (kind) {
        case NormKind::two: {
            const Eigen::VectorXd sv = singular_values(m);
            return sv.size() == 0 ? 0.0 : sv.maxCoeff();
        }
        case NormKind::inf:
            return m.cwiseAbs().rowwise().sum().maxCoeff();
        case NormKind::frobenius:
            return m.norm();
    }
    throw std::invalid_argument("op_norm: unknown norm kind");
}

}  // namespace antmill
