#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "antmill/numerics.hpp"
#include "antmill/parallel.hpp"

namespace antmill {

// Constants of the fixed-speed turning model's reorientation kernel.
struct KernelParams {
    double speed = 1.0;       // particle speed v
    double alpha_turn = 1.0;  // reorientation rate
    double bias = 0.0;        // gradient bias strength J, |J| < 1 keeps the kernel positive
};

namespace detail {
inline void check_kernel(const KernelParams& kp) {
    if (!(std::abs(kp.bias) < 1.0))
        throw std::invalid_argument("kernel bias magnitude must be below 1");
    if (!(kp.speed > 0.0)) throw std::invalid_argument("particle speed must be positive");
    if (!(kp.alpha_turn > 0.0)) throw std::invalid_argument("turn rate must be positive");
}
}  // namespace detail

// Reorientation kernel T(theta, theta_g) = (J cos(theta - theta_g) + 1) / (4 pi^2),
// strictly positive for |J| < 1 and shift invariant in theta - theta_g.
inline double kernel_T(double theta, double theta_g, const KernelParams& kp) {
    detail::check_kernel(kp);
    constexpr double four_pi_sq = 4.0 * std::numbers::pi * std::numbers::pi;
    return (kp.bias * std::cos(theta - theta_g) + 1.0) / four_pi_sq;
}

// Double periodic-trapezoid integral of the kernel over both angles in
// [-pi, pi)^2. The cosine harmonic integrates to zero exactly on the uniform
// grid, so the analytic value is 1.
inline double kernel_norm_check(const KernelParams& kp, int m) {
    detail::check_kernel(kp);
    if (m < 8) throw std::invalid_argument("kernel_norm_check needs m >= 8");
    const double w = 2.0 * std::numbers::pi / static_cast<double>(m);
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
        const double theta = -std::numbers::pi + w * static_cast<double>(j);
        for (int l = 0; l < m; ++l) {
            const double theta_g = -std::numbers::pi + w * static_cast<double>(l);
            total += kernel_T(theta, theta_g, kp);
        }
    }
    return total * w * w;
}

// Single-angle integral of T over theta at fixed gradient direction; equals
// 1/(2 pi), not 1, under the kernel's 1/(4 pi^2) normalization.
inline double kernel_single_integral(const KernelParams& kp, int m) {
    detail::check_kernel(kp);
    if (m < 8) throw std::invalid_argument("kernel_single_integral needs m >= 8");
    Eigen::VectorXd samples(m);
    const double w = 2.0 * std::numbers::pi / static_cast<double>(m);
    for (int j = 0; j < m; ++j)
        samples(j) = kernel_T(-std::numbers::pi + w * static_cast<double>(j), 0.0, kp);
    return trapezoid_theta(samples);
}

// Discretized turning operator in Fourier space at wavenumber k, gradient
// direction fixed at zero:
//   (A p)(theta_j) = (v*2*pi*i*k*cos(theta_j) + alpha) p(theta_j)
//                    - (alpha/4 pi^2)(J cos(theta_j) + 1) * sum_l w_l p(theta_l)
// with uniform nodes and periodic trapezoid weights w_l = 2 pi / m.
struct FredholmOperator {
    int m = 0;
    double k = 0.0;
    DenseMatrix matrix;
};

inline FredholmOperator assemble_fredholm(double k, const KernelParams& kp, int m) {
    detail::check_kernel(kp);
    if (m < 8) throw std::invalid_argument("assemble_fredholm needs m >= 8");
    constexpr double pi = std::numbers::pi;
    const double w = 2.0 * pi / static_cast<double>(m);

    FredholmOperator op;
    op.m = m;
    op.k = k;
    op.matrix = DenseMatrix::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        const double theta = -pi + w * static_cast<double>(j);
        const double cos_t = std::cos(theta);
        op.matrix(j, j) += std::complex<double>(kp.alpha_turn, kp.speed * 2.0 * pi * k * cos_t);
        const double shape = kp.alpha_turn / (4.0 * pi * pi) * (kp.bias * cos_t + 1.0);
        for (int l = 0; l < m; ++l) op.matrix(j, l) -= shape * w;
    }
    return op;
}

struct ScanCell {
    double k = 0.0;
    double sigma_min = std::numeric_limits<double>::quiet_NaN();
    std::string error;  // empty on success

    bool ok() const { return error.empty(); }
};

// Smallest singular value of the turning operator across wavenumbers. Values
// bounded away from zero mean the homogeneous equation admits only the
// trivial solution.
inline std::vector<ScanCell> nullspace_scan(const std::vector<double>& k_values,
                                            const KernelParams& kp, int m, int jobs = 1) {
    detail::check_kernel(kp);
    if (m < 8) throw std::invalid_argument("nullspace_scan needs m >= 8");
    std::vector<ScanCell> cells(k_values.size());
    for (std::size_t i = 0; i < k_values.size(); ++i) cells[i].k = k_values[i];
    detail::parallel_for(cells.size(), jobs, [&](std::size_t i) {
        try {
            cells[i].sigma_min = min_singular_value(assemble_fredholm(cells[i].k, kp, m).matrix);
        } catch (const std::exception& e) {
            cells[i].error = e.what();
        }
    });
    return cells;
}

}  // namespace antmill
