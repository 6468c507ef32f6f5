#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "antmill/evolve.hpp"
#include "antmill/linear_stability.hpp"

using namespace antmill;

namespace {

const ModelParams kUnit{1.0, 1.0, 1.0, 1.0, 1.0};
const SteadyStateConstants kConst{0.5, 2.0};

RadialGrid admissible_grid(Eigen::Index n) {
    const double r_star = admissible_outer_radius(kUnit, kConst);
    return RadialGrid(0.5, 0.9 * r_star, n);
}

Eigen::VectorXd flatten(const StateRates& k) {
    Eigen::VectorXd v(4 * k.rho.size());
    v << k.rho, k.g, k.v_r, k.v_theta;
    return v;
}

}  // namespace

TEST_CASE("chemotaxis coefficients at hand-checked points") {
    const auto [first0, second0] = linearize_chemo_coeff(RealField::Zero(4), kUnit);
    CHECK(first0.isApproxToConstant(kUnit.beta / kUnit.alpha, 1e-14));
    CHECK(second0.isApproxToConstant(std::pow(kUnit.beta / kUnit.alpha, 2), 1e-14));

    const auto [first1, second1] = linearize_chemo_coeff(RealField::Ones(4), kUnit);
    CHECK(first1.isApproxToConstant(0.5, 1e-14));
    CHECK(second1.isApproxToConstant(0.25, 1e-14));
    CHECK((second1 - first1.cwiseProduct(first1)).cwiseAbs().maxCoeff() < 1e-15);

    ModelParams bad = kUnit;
    bad.alpha = 1.0;
    CHECK_THROWS_AS(linearize_chemo_coeff(RealField::Constant(4, -2.0), bad), std::domain_error);
}

TEST_CASE("chemical profile slaved to the density profile") {
    ComplexField F = ComplexField::Ones(5);
    CHECK((g_from_rho(F, Complex(0.0, 0.0), kUnit) - kUnit.lambda * F).norm() < 1e-15);

    ModelParams mp = kUnit;
    mp.lambda = 2.0;
    CHECK((g_from_rho(F, Complex(1.0, 0.0), mp) - F).norm() < 1e-15);

    CHECK(g_from_rho(ComplexField::Zero(5), Complex(0.3, 0.1), kUnit).norm() == 0.0);
    CHECK_THROWS_AS(g_from_rho(F, Complex(-1.0, 0.0), kUnit), std::domain_error);
}

TEST_CASE("velocity reduction reproduces the hand-derived value") {
    // linear-in-r profiles make the difference stencils exact, so node 1 sees
    // v_theta = sqrt(3), dv_theta/dr = -0.75*sqrt(3), F = 0, dF/dr = 1
    const RadialGrid grid(0.5, 1.5, 3);
    const double root3 = std::sqrt(3.0);
    RealField vt(3), rho(3), g(3);
    ComplexField F(3);
    for (Eigen::Index i = 0; i < 3; ++i) {
        const double r = grid.node(i);
        vt(i) = root3 + (-0.75 * root3) * (r - 1.0);
        rho(i) = 1.0;
        g(i) = 1.0;
        F(i) = Complex(r - 1.0, 0.0);
    }
    const AxisymState steady{grid, rho, g, RealField::Zero(3), vt};
    const auto [H_r, H_theta] = perturbation_velocities(F, steady, kUnit, Complex(1.0, 0.0), 0);
    const double expected = 0.5 / (2.0 * root3 * (0.25 * root3 + 1.0));
    CHECK(H_r(1).real() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::abs(H_r(1).imag()) < 1e-15);
    CHECK(expected == doctest::Approx(0.1007).epsilon(1e-3));

    // homogeneous and linear in the density profile
    const auto [zr, zt] = perturbation_velocities(ComplexField::Zero(3), steady, kUnit,
                                                  Complex(1.0, 0.0), 0);
    CHECK(zr.norm() == 0.0);
    CHECK(zt.norm() == 0.0);
    const auto [dr2, dt2] = perturbation_velocities((2.0 * F).eval(), steady, kUnit,
                                                    Complex(1.0, 0.0), 0);
    CHECK((dr2 - 2.0 * H_r).norm() < 1e-15);
    CHECK((dt2 - 2.0 * H_theta).norm() < 1e-15);
}

TEST_CASE("velocity reduction reports a vanishing denominator with the node") {
    const AxisymState steady = eval_steady(kUnit, kConst, admissible_grid(9));
    const RealField dvt = ddr(steady.grid, steady.v_theta);
    // purely imaginary s with s^2 = -(dv_theta + v_theta/r) zeroes the
    // denominator at node 4
    const double shear = dvt(4) + steady.v_theta(4) / steady.grid.node(4);
    REQUIRE(shear > 0.0);
    const Complex s(0.0, std::sqrt(shear));
    ComplexField F = ComplexField::Ones(9);
    try {
        perturbation_velocities(F, steady, kUnit, s, 0);
        FAIL("expected a domain_error");
    } catch (const std::domain_error& e) {
        CHECK(std::string(e.what()).find("node 4") != std::string::npos);
    }
}

TEST_CASE("operator dimensions and linearity") {
    const AxisymState steady = eval_steady(kUnit, kConst, admissible_grid(8));
    const LinearOperator op = assemble_operator(kUnit, steady, 1);
    CHECK(op.matrix.rows() == 32);
    CHECK(op.matrix.cols() == 32);
    CHECK((op.matrix * Eigen::VectorXcd::Zero(32)).norm() == 0.0);
}

TEST_CASE("chemical block rows are assembled bit-exactly") {
    const AxisymState steady = eval_steady(kUnit, kConst, admissible_grid(16));
    const Eigen::Index N = 16;
    ModelParams mp = kUnit;
    mp.lambda = 1.75;
    const LinearOperator op = assemble_operator(mp, steady, 1);
    for (Eigen::Index i = 1; i + 1 < N; ++i) {
        for (Eigen::Index j = 0; j < 4 * N; ++j) {
            const Complex got = op.matrix(N + i, j);
            Complex want(0.0, 0.0);
            if (j == i) want = Complex(mp.lambda, 0.0);
            if (j == N + i) want = Complex(-1.0, 0.0);
            CHECK(got == want);
        }
    }
    CHECK(op.matrix.row(N).norm() == 0.0);
    CHECK(op.matrix.row(2 * N - 1).norm() == 0.0);
}

TEST_CASE("mode number enters only through the expected diagonal terms") {
    const Eigen::Index N = 24;
    const AxisymState steady = eval_steady(kUnit, kConst, admissible_grid(N));
    const LinearOperator op0 = assemble_operator(kUnit, steady, 0);
    const LinearOperator op1 = assemble_operator(kUnit, steady, 1);
    DenseMatrix diff = op1.matrix - op0.matrix;

    const auto r = steady.grid.nodes().array();
    const RealField omega = (steady.v_theta.array() / r).matrix();
    const auto [chi, chi_sq] = linearize_chemo_coeff(steady.g, kUnit);
    const RealField rho_chi_r2 = (steady.rho.array() * chi.array() / r.square()).matrix();

    DenseMatrix expected = DenseMatrix::Zero(4 * N, 4 * N);
    const Complex i1(0.0, 1.0);
    for (Eigen::Index j = 0; j < N; ++j) {
        expected(j, j) = -i1 * omega(j) - kUnit.diffusion / (r(j) * r(j));
        expected(j, N + j) = rho_chi_r2(j);
        expected(2 * N + j, 2 * N + j) = -i1 * omega(j);
        expected(3 * N + j, N + j) = i1 * kUnit.b / r(j);
        expected(3 * N + j, 3 * N + j) = -i1 * omega(j);
    }
    for (Eigen::Index f = 0; f < 4; ++f) {
        expected.row(f * N).setZero();
        expected.row(f * N + N - 1).setZero();
    }
    CHECK((diff - expected).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("n=0 operator matches the directional derivative of the pinned rates") {
    const Eigen::Index N = 48;
    const AxisymState steady = eval_steady(kUnit, kConst, admissible_grid(N));
    const LinearOperator op = assemble_operator(kUnit, steady, 0);

    std::mt19937 rng(20240812);
    std::normal_distribution<double> dist(0.0, 1.0);
    const double eps = 1e-6;
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd delta = Eigen::VectorXd::Zero(4 * N);
        for (Eigen::Index f = 0; f < 4; ++f)
            for (Eigen::Index i = 1; i + 1 < N; ++i) delta(f * N + i) = dist(rng);
        delta /= delta.norm();

        auto displaced = [&](double c) {
            AxisymState s = steady;
            s.rho += c * delta.segment(0, N);
            s.g += c * delta.segment(N, N);
            s.v_r += c * delta.segment(2 * N, N);
            s.v_theta += c * delta.segment(3 * N, N);
            return flatten(pinned_rhs(s, kUnit));
        };
        const Eigen::VectorXd fd = (displaced(eps) - displaced(-eps)) / (2.0 * eps);
        const Eigen::VectorXd Md = (op.matrix * delta.cast<Complex>()).real();
        CHECK((Md - fd).norm() / Md.norm() < 1e-4);
    }
}

TEST_CASE("spectra of opposite modes are complex conjugates") {
    const Eigen::Index N = 24;
    const AxisymState steady = eval_steady(kUnit, kConst, admissible_grid(N));
    for (int n : {1, 2}) {
        Eigen::VectorXcd plus = growth_spectrum(assemble_operator(kUnit, steady, n));
        Eigen::VectorXcd minus = growth_spectrum(assemble_operator(kUnit, steady, -n));
        REQUIRE(plus.size() == minus.size());
        // conjugation reverses the imaginary ordering within equal real parts
        std::vector<Complex> a(plus.data(), plus.data() + plus.size());
        std::vector<Complex> b(minus.data(), minus.data() + minus.size());
        for (auto& z : b) z = std::conj(z);
        auto lt = [](const Complex& x, const Complex& y) {
            if (x.real() != y.real()) return x.real() < y.real();
            return x.imag() < y.imag();
        };
        std::sort(a.begin(), a.end(), lt);
        std::sort(b.begin(), b.end(), lt);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-8);
    }
}

TEST_CASE("zeroing the density rows exposes the chemical relaxation eigenvalue") {
    const Eigen::Index N = 16;
    const AxisymState steady = eval_steady(kUnit, kConst, admissible_grid(N));
    LinearOperator op = assemble_operator(kUnit, steady, 0);
    op.matrix.block(0, 0, N, 4 * N).setZero();
    const Eigen::VectorXcd ev = growth_spectrum(op);
    Eigen::Index hits = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (std::abs(ev(i) - Complex(-1.0, 0.0)) < 1e-8) ++hits;
    CHECK(hits >= N - 2);
}

TEST_CASE("growth_spectrum strips pinned rows together with their columns") {
    DenseMatrix m = DenseMatrix::Zero(4, 4);
    m(1, 1) = -2.0;
    m(2, 2) = -3.0;
    m(3, 3) = -4.0;
    m(1, 0) = 5.0;  // dependence on the pinned entry must not alter the spectrum
    const Eigen::VectorXcd ev = growth_spectrum({m, 0, 1});
    REQUIRE(ev.size() == 3);
    CHECK(ev(0).real() == doctest::Approx(-2.0));
    CHECK(ev(2).real() == doctest::Approx(-4.0));
}

TEST_CASE("growth_spectrum orders a diagonal test operator") {
    DenseMatrix m = DenseMatrix::Zero(4, 4);
    m(0, 0) = -3.0;
    m(1, 1) = -1.0;
    m(2, 2) = -4.0;
    m(3, 3) = -2.0;
    const Eigen::VectorXcd ev = growth_spectrum({m, 0, 1});
    CHECK(ev(0).real() == doctest::Approx(-1.0));
    CHECK(ev(3).real() == doctest::Approx(-4.0));
}

TEST_CASE("amplification report on scalar operators") {
    DenseMatrix m(1, 1);
    m(0, 0) = -1.0;
    StabilityReport rep = amplification_report({m, 0, 1}, 0.1);
    CHECK(rep.norm_I_minus_dtM == doctest::Approx(1.1));
    CHECK(rep.spectral_radius_forward == doctest::Approx(0.9));
    CHECK(rep.max_re_eig == doctest::Approx(-1.0));
    CHECK(rep.verdict == Verdict::stable);

    m(0, 0) = 1.0;
    rep = amplification_report({m, 0, 1}, 0.1);
    CHECK(rep.max_re_eig == doctest::Approx(1.0));
    CHECK(rep.verdict == Verdict::unstable);

    m(0, 0) = 0.0;
    rep = amplification_report({m, 0, 1}, 0.5);
    CHECK(rep.verdict == Verdict::marginal);
    CHECK(rep.spectral_radius_forward == doctest::Approx(1.0));

    CHECK_THROWS_AS(amplification_report({m, 0, 1}, 0.0), std::invalid_argument);
}

TEST_CASE("eigenvectors satisfy the slaving and velocity-row relations") {
    const Eigen::Index N = 32;
    ModelParams mp = kUnit;
    mp.b = 0.1;
    const AxisymState steady = eval_steady(mp, kConst, admissible_grid(N));
    const LinearOperator op = assemble_operator(mp, steady, 1);
    const auto modes = growth_eigenmodes(op);
    REQUIRE(modes.size() >= 6);

    const auto r = steady.grid.nodes().array();
    const RealField omega = (steady.v_theta.array() / r).matrix();
    const RealField dvt = ddr(steady.grid, steady.v_theta);
    const Eigen::MatrixXd D1 = ddr_matrix(steady.grid);
    const Complex i1(0.0, 1.0);

    for (std::size_t k = 0; k < 6; ++k) {
        const PerturbationMode& m = modes[k];
        // residual of the eigenpair itself
        Eigen::VectorXcd w(4 * N);
        w << m.F, m.G, m.H_r, m.H_theta;
        CHECK((op.matrix * w - m.s * w).norm() < 1e-8);

        // chemical slaving G = lambda/(s+1) F at the active nodes
        const ComplexField G_pred = g_from_rho(m.F, m.s, mp);
        CHECK((m.G.segment(1, N - 2) - G_pred.segment(1, N - 2)).norm() < 1e-8);

        // the velocity rows solved pointwise reproduce the eigenvector
        const ComplexField dG = D1.cast<Complex>() * m.G;
        for (Eigen::Index j = 1; j + 1 < N; ++j) {
            const Complex s_in = m.s + i1 * double(op.n) * omega(j);
            const double shear = dvt(j) + omega(j);
            Eigen::Matrix2cd A;
            A << s_in, -2.0 * omega(j), shear, s_in;
            Eigen::Vector2cd rhs_v;
            rhs_v << mp.b * dG(j), i1 * double(op.n) * mp.b / r(j) * m.G(j);
            const Eigen::Vector2cd sol = A.colPivHouseholderQr().solve(rhs_v);
            CHECK(std::abs(sol(0) - m.H_r(j)) < 1e-7);
            CHECK(std::abs(sol(1) - m.H_theta(j)) < 1e-7);
        }
    }
}

TEST_CASE("sweep_b records cells, duplicates, and failures deterministically") {
    const RadialGrid grid = admissible_grid(24);

    auto single = sweep_b(kUnit, kConst, grid, {100.0}, {0});
    REQUIRE(single.size() == 1);
    CHECK(single[0].ok());
    CHECK(std::isfinite(single[0].max_re_eig));

    auto dup = sweep_b(kUnit, kConst, grid, {2.0, 2.0}, {0, 1}, 2);
    REQUIRE(dup.size() == 4);
    CHECK(dup[0].max_re_eig == dup[2].max_re_eig);
    CHECK(dup[1].max_re_eig == dup[3].max_re_eig);
    CHECK(dup[0].n == 0);
    CHECK(dup[1].n == 1);

    auto mixed = sweep_b(kUnit, kConst, grid, {-1.0, 1.0}, {0});
    REQUIRE(mixed.size() == 2);
    CHECK_FALSE(mixed[0].ok());  // b = -1 violates positivity, sweep continues
    CHECK(mixed[1].ok());

    auto serial = sweep_b(kUnit, kConst, grid, {0.5, 5.0}, {0, 1}, 1);
    auto parallel = sweep_b(kUnit, kConst, grid, {0.5, 5.0}, {0, 1}, 4);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].b == parallel[i].b);
        CHECK(serial[i].max_re_eig == parallel[i].max_re_eig);
    }
}
