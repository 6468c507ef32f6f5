#pragma once

#include <algorithm>
#include <complex>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "antmill/numerics.hpp"
#include "antmill/parallel.hpp"
#include "antmill/params.hpp"
#include "antmill/steady_state.hpp"

namespace antmill {

using Complex = std::complex<double>;

// One azimuthal perturbation mode: growth rate s and the radial profiles of
// the four perturbed fields. Profiles populated from an eigenvector are
// normalized to unit L2 norm over the stacked vector.
struct PerturbationMode {
    int n = 0;
    Complex s{};
    ComplexField F;        // density profile
    ComplexField G;        // chemical profile
    ComplexField H_r;      // radial velocity profile
    ComplexField H_theta;  // azimuthal velocity profile
};

// Discretized generator of the linearized dynamics, d(w)/dt = M w, with w
// stacked as [rho(r_1..r_N), g(..), v_r(..), v_theta(..)]. Boundary rows are
// zeroed in every block: endpoint perturbations are pinned at their initial
// value (homogeneous Dirichlet for perturbations started at zero).
struct LinearOperator {
    DenseMatrix matrix;  // 4N x 4N
    int n = 0;           // azimuthal wavenumber
    Eigen::Index num_nodes = 0;
};

enum class Verdict { stable, unstable, marginal };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::stable: return "stable";
        case Verdict::unstable: return "unstable";
        case Verdict::marginal: return "marginal";
    }
    return "marginal";
}

inline constexpr double kVerdictTol = 1e-10;

inline Verdict verdict_from_max_re(double max_re) {
    if (max_re < -kVerdictTol) return Verdict::stable;
    if (max_re > kVerdictTol) return Verdict::unstable;
    return Verdict::marginal;
}

struct StabilityReport {
    int n = 0;
    double dt = 0.0;
    double norm_I_minus_dtM = 0.0;       // reported for comparison, not the verdict
    double spectral_radius_forward = 0.0;  // of I + dt*M
    double max_re_eig = 0.0;
    Verdict verdict = Verdict::marginal;
};

// Pointwise chemotaxis coefficients used throughout the linearization:
// beta/(alpha+beta*g0) and its square beta^2/(alpha+beta*g0)^2.
inline std::pair<RealField, RealField> linearize_chemo_coeff(const RealField& g0,
                                                             const ModelParams& mp) {
    const auto denom = (mp.alpha + mp.beta * g0.array()).eval();
    if (!(denom > 0.0).all())
        throw std::domain_error("linearize_chemo_coeff: alpha + beta*g0 must stay positive");
    RealField first = (mp.beta / denom).matrix();
    RealField second = (first.array().square()).matrix();
    return {std::move(first), std::move(second)};
}

// Chemical profile slaved to the density profile: G = lambda/(s+1) * F.
inline ComplexField g_from_rho(const ComplexField& F, Complex s, const ModelParams& mp) {
    if (std::abs(s + 1.0) < 1e-14)
        throw std::domain_error("g_from_rho: s = -1 is the chemical relaxation pole");
    return ((mp.lambda / (s + 1.0)) * F.array()).matrix();
}

// Modal reduction of the velocity profiles to the density profile, evaluated
// pointwise with finite-difference radial derivatives of F and v_theta.
inline std::pair<ComplexField, ComplexField> perturbation_velocities(
    const ComplexField& F, const AxisymState& steady, const ModelParams& mp, Complex s, int n) {
    if (std::abs(s + 1.0) < 1e-14)
        throw std::domain_error("perturbation_velocities: s = -1 is the chemical relaxation pole");
    const auto& grid = steady.grid;
    if (F.size() != grid.size())
        throw std::invalid_argument("perturbation_velocities: profile length does not match grid");

    const ComplexField dF = ddr(grid, F);
    const RealField dvt = ddr(grid, steady.v_theta);
    const Complex lam_s = mp.lambda / (s + 1.0);
    const Complex in(0.0, static_cast<double>(n));

    ComplexField H_r(grid.size());
    ComplexField H_theta(grid.size());
    for (Eigen::Index j = 0; j < grid.size(); ++j) {
        const double r = grid.node(j);
        const double omega = steady.v_theta(j) / r;       // v0_theta / r
        const double shear = dvt(j) + omega;              // v0_theta' + v0_theta/r
        const Complex s_in = s + in * omega;
        const Complex den = 2.0 * omega * (shear + s_in * s_in);
        if (std::abs(den) < 1e-300 ||
            std::abs(den) < 1e-14 * (std::abs(2.0 * omega * shear) +
                                     std::abs(2.0 * omega * s_in * s_in)))
            throw std::domain_error("perturbation_velocities: vanishing denominator at node " +
                                    std::to_string(j));
        H_r(j) = lam_s * (mp.b * s * dF(j) + (mp.b * in * omega) * (dF(j) + 2.0 * F(j) / r)) / den;
        H_theta(j) =
            lam_s * ((mp.b * in * F(j) / r) * s_in - (mp.b * dF(j)) * shear) / den;
    }
    return {std::move(H_r), std::move(H_theta)};
}

// Assembles the 4N x 4N generator for azimuthal mode n around the sampled
// steady state. Radial derivatives use the same stencils as the nonlinear
// right-hand side, and steady-profile derivative coefficients are the
// discrete ones, so at n = 0 the matrix is the exact Jacobian of the pinned
// nonlinear rates. Azimuthal derivatives of the perturbation enter as i*n
// and -n^2 factors.
inline LinearOperator assemble_operator(const ModelParams& mp, const AxisymState& steady,
                                        int n) {
    const auto& grid = steady.grid;
    const Eigen::Index N = grid.size();
    if (steady.rho.size() != N || steady.g.size() != N || steady.v_r.size() != N ||
        steady.v_theta.size() != N)
        throw std::invalid_argument("assemble_operator: state fields do not match the grid");

    const auto r = grid.nodes().array();
    const Eigen::MatrixXd D1 = ddr_matrix(grid);
    const RealField dg0 = D1 * steady.g;
    const RealField drho0 = D1 * steady.rho;
    const RealField dvt0 = D1 * steady.v_theta;
    const auto [chi, chi_sq] = linearize_chemo_coeff(steady.g, mp);

    const RealField rho_chi = (steady.rho.array() * chi.array()).matrix();
    const Eigen::MatrixXd div_r =
        r.inverse().matrix().asDiagonal() * D1 * r.matrix().asDiagonal();  // (1/r) d/dr (r .)

    // density row: conservative flux Jacobian plus modal advection/diffusion
    const Eigen::MatrixXd rho_rho_real =
        div_r * (mp.diffusion * D1 -
                 Eigen::MatrixXd((chi.array() * dg0.array()).matrix().asDiagonal()));
    const Eigen::MatrixXd rho_g_real =
        div_r *
        (Eigen::MatrixXd(
             (steady.rho.array() * chi_sq.array() * dg0.array()).matrix().asDiagonal()) -
         rho_chi.asDiagonal() * D1);

    const double nd = static_cast<double>(n);
    const Complex in(0.0, nd);
    const RealField omega = (steady.v_theta.array() / r).matrix();  // v0_theta / r

    LinearOperator op;
    op.n = n;
    op.num_nodes = N;
    op.matrix = DenseMatrix::Zero(4 * N, 4 * N);
    auto block = [&op, N](Eigen::Index i, Eigen::Index j) {
        return op.matrix.block(i * N, j * N, N, N);
    };

    block(0, 0) = rho_rho_real.cast<Complex>();
    block(0, 0) -= (in * omega.array()).matrix().asDiagonal();
    block(0, 0) -=
        (Complex(mp.diffusion * nd * nd, 0.0) * r.inverse().square()).matrix().asDiagonal();
    block(0, 1) = rho_g_real.cast<Complex>();
    block(0, 1) += (Complex(nd * nd, 0.0) * rho_chi.array() / r.square()).matrix().asDiagonal();
    block(0, 2) = (-drho0).cast<Complex>().asDiagonal();

    block(1, 0) = Complex(mp.lambda, 0.0) * DenseMatrix::Identity(N, N);
    block(1, 1) = -DenseMatrix::Identity(N, N);

    block(2, 1) = (mp.b * D1).cast<Complex>();
    block(2, 2) = (-in * omega.array()).matrix().asDiagonal();
    block(2, 3) = (2.0 * omega).cast<Complex>().asDiagonal();

    block(3, 1) = (in * mp.b * r.inverse()).matrix().asDiagonal();
    block(3, 2) = (-(dvt0.array() + omega.array())).matrix().cast<Complex>().asDiagonal();
    block(3, 3) = (-in * omega.array()).matrix().asDiagonal();

    // pin endpoint perturbations: zero rows, never identity rows
    for (Eigen::Index f = 0; f < 4; ++f) {
        op.matrix.row(f * N).setZero();
        op.matrix.row(f * N + N - 1).setZero();
    }
    return op;
}

namespace detail {

inline std::vector<Eigen::Index> nonzero_row_indices(const DenseMatrix& m) {
    std::vector<Eigen::Index> keep;
    keep.reserve(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (!m.row(i).isZero(0.0)) keep.push_back(i);
    return keep;
}

// An all-zero row contributes exactly one zero eigenvalue, and removing the
// row together with its column leaves every other eigenvalue unchanged
// (Laplace expansion of det(M - z I) along the zero row). Stripping them
// isolates the spectrum of the dynamically active nodes from the pinned
// ones.
inline DenseMatrix strip_zero_rows(const DenseMatrix& m, const std::vector<Eigen::Index>& keep) {
    DenseMatrix out(keep.size(), keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = 0; j < keep.size(); ++j) out(i, j) = m(keep[i], keep[j]);
    return out;
}

inline void sort_descending_re(Eigen::VectorXcd& v) {
    std::vector<Complex> tmp(v.data(), v.data() + v.size());
    std::sort(tmp.begin(), tmp.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() > b.imag();
    });
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = tmp[static_cast<std::size_t>(i)];
}

}  // namespace detail

// Growth rates of the dynamically active modes, sorted by descending real
// part. Structural zero modes of pinned rows are excluded.
inline Eigen::VectorXcd growth_spectrum(const LinearOperator& op) {
    const auto keep = detail::nonzero_row_indices(op.matrix);
    Eigen::VectorXcd ev = eigenvalues(detail::strip_zero_rows(op.matrix, keep));
    detail::sort_descending_re(ev);
    return ev;
}

// Eigenpairs embedded back onto the full grid (pinned nodes hold zeros),
// split into the four field profiles and normalized to unit overall L2 norm.
inline std::vector<PerturbationMode> growth_eigenmodes(const LinearOperator& op) {
    const Eigen::Index size = op.matrix.rows();
    const Eigen::Index N = op.num_nodes > 0 ? op.num_nodes : size / 4;
    if (4 * N != size) throw std::invalid_argument("growth_eigenmodes: size not divisible by 4");
    const auto keep = detail::nonzero_row_indices(op.matrix);
    const DenseMatrix compressed = detail::strip_zero_rows(op.matrix, keep);
    Eigen::ComplexEigenSolver<DenseMatrix> solver(compressed, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) throw NumericError("eigenvalue solver did not converge");

    std::vector<PerturbationMode> modes;
    modes.reserve(static_cast<std::size_t>(compressed.rows()));
    for (Eigen::Index k = 0; k < compressed.rows(); ++k) {
        Eigen::VectorXcd full = Eigen::VectorXcd::Zero(size);
        for (std::size_t i = 0; i < keep.size(); ++i)
            full(keep[i]) = solver.eigenvectors()(static_cast<Eigen::Index>(i), k);
        full /= full.norm();
        PerturbationMode m;
        m.n = op.n;
        m.s = solver.eigenvalues()(k);
        m.F = full.segment(0, N);
        m.G = full.segment(N, N);
        m.H_r = full.segment(2 * N, N);
        m.H_theta = full.segment(3 * N, N);
        modes.push_back(std::move(m));
    }
    std::sort(modes.begin(), modes.end(), [](const PerturbationMode& a, const PerturbationMode& b) {
        if (a.s.real() != b.s.real()) return a.s.real() > b.s.real();
        return a.s.imag() > b.s.imag();
    });
    return modes;
}

// Growth verdict from the eigenvalue signs, with the one-step quantities
// ||I - dt*M||_2 and the spectral radius of I + dt*M reported alongside.
inline StabilityReport amplification_report(const LinearOperator& op, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("amplification_report: dt must be positive");
    const auto keep = detail::nonzero_row_indices(op.matrix);
    const bool stripped = static_cast<Eigen::Index>(keep.size()) < op.matrix.rows();
    const Eigen::VectorXcd ev = eigenvalues(detail::strip_zero_rows(op.matrix, keep));

    StabilityReport rep;
    rep.n = op.n;
    rep.dt = dt;
    rep.max_re_eig = ev.size() == 0 ? 0.0 : ev.real().maxCoeff();
    double radius = stripped ? 1.0 : 0.0;  // pinned rows keep |1 + dt*0| = 1
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        radius = std::max(radius, std::abs(1.0 + dt * ev(i)));
    rep.spectral_radius_forward = radius;
    const DenseMatrix amp = DenseMatrix::Identity(op.matrix.rows(), op.matrix.cols()) -
                            dt * op.matrix;
    rep.norm_I_minus_dtM = op_norm(amp, NormKind::two);
    rep.verdict = verdict_from_max_re(rep.max_re_eig);
    return rep;
}

struct SweepCell {
    double b = 0.0;
    int n = 0;
    double max_re_eig = std::numeric_limits<double>::quiet_NaN();
    Verdict verdict = Verdict::marginal;
    std::string error;  // empty on success

    bool ok() const { return error.empty(); }
};

// Rebuilds the steady state and the mode operator for every (b, n) pair and
// records the leading growth rate. Rows come back sorted by (b, n);
// individual failures are recorded in the row and the sweep continues.
inline std::vector<SweepCell> sweep_b(const ModelParams& base, const SteadyStateConstants& sc,
                                      const RadialGrid& grid, std::vector<double> b_values,
                                      std::vector<int> n_values, int jobs = 1) {
    std::sort(b_values.begin(), b_values.end());
    std::sort(n_values.begin(), n_values.end());
    std::vector<SweepCell> cells(b_values.size() * n_values.size());
    for (std::size_t i = 0; i < b_values.size(); ++i)
        for (std::size_t j = 0; j < n_values.size(); ++j) {
            auto& cell = cells[i * n_values.size() + j];
            cell.b = b_values[i];
            cell.n = n_values[j];
        }

    detail::parallel_for(cells.size(), jobs, [&](std::size_t idx) {
        SweepCell& cell = cells[idx];
        try {
            ModelParams mp = base;
            mp.b = cell.b;
            const auto vp = validate_params(mp);
            if (!vp.ok()) throw std::invalid_argument(vp.summary());
            const auto vc = validate_constants(mp, sc);
            if (!vc.ok()) throw std::invalid_argument(vc.summary());
            const AxisymState steady = eval_steady(mp, sc, grid);
            const LinearOperator op = assemble_operator(mp, steady, cell.n);
            const Eigen::VectorXcd ev = growth_spectrum(op);
            cell.max_re_eig = ev.size() == 0 ? 0.0 : ev(0).real();
            cell.verdict = verdict_from_max_re(cell.max_re_eig);
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    });
    return cells;
}

}  // namespace antmill
