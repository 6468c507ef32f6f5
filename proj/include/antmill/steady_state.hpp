#pragma once

#include <cmath>
#include <stdexcept>

#include "antmill/grid.hpp"
#include "antmill/numerics.hpp"
#include "antmill/params.hpp"

namespace antmill {

// Radial profiles of the axisymmetric system state: density, chemical
// concentration, radial velocity, azimuthal velocity, all on one grid.
struct AxisymState {
    RadialGrid grid;
    RealField rho;
    RealField g;
    RealField v_r;
    RealField v_theta;
};

// Pointwise closed-form ring profiles.
inline double steady_rho(const ModelParams& mp, const SteadyStateConstants& sc, double r) {
    const double p = decay_exponent(mp, sc);
    return mp.alpha / (mp.beta * mp.lambda) * (sc.c2 * std::pow(r, -p) - 1.0);
}

inline double steady_g(const ModelParams& mp, const SteadyStateConstants& sc, double r) {
    return mp.lambda * steady_rho(mp, sc, r);
}

inline double steady_vtheta(const ModelParams& mp, const SteadyStateConstants& sc, double r) {
    const double p = decay_exponent(mp, sc);
    return std::sqrt(mp.b * sc.c2 * p) * std::pow(r, -0.5 * p);
}

// Samples the closed-form steady state on a grid. The grid must end
// strictly inside the admissible radius so the density stays positive.
inline AxisymState eval_steady(const ModelParams& mp, const SteadyStateConstants& sc,
                               const RadialGrid& grid) {
    const auto vp = validate_params(mp);
    if (!vp.ok()) throw std::invalid_argument("eval_steady: " + vp.summary());
    const auto vc = validate_constants(mp, sc);
    if (!vc.ok()) throw std::invalid_argument("eval_steady: " + vc.summary());
    const double r_star = admissible_outer_radius(mp, sc);
    if (!(grid.outer() < r_star))
        throw std::domain_error("eval_steady: outer radius " + std::to_string(grid.outer()) +
                                " must lie below the admissible radius " + std::to_string(r_star) +
                                " (density would be nonpositive)");

    const double p = decay_exponent(mp, sc);
    const auto r = grid.nodes().array();
    AxisymState s{grid, RealField(grid.size()), RealField(grid.size()), RealField(grid.size()),
                  RealField(grid.size())};
    s.rho = (mp.alpha / (mp.beta * mp.lambda) * (sc.c2 * r.pow(-p) - 1.0)).matrix();
    s.g = mp.lambda * s.rho;
    s.v_theta = (std::sqrt(mp.b * sc.c2 * p) * r.pow(-0.5 * p)).matrix();
    s.v_r = RealField::Zero(grid.size());
    return s;
}

struct SteadyResidual {
    RealField mass;      // imbalance of the density equation
    RealField chemical;  // lambda*rho - g
    RealField momentum;  // v_theta^2 + b*r*dg/dr
};

// Evaluates the three time-independent balance equations on the state by
// finite differences. The mass balance is evaluated in expanded polar form
//   D(rho'' + rho'/r) - (rho*chi)'*g' - rho*chi*(g'' + g'/r),
// chi = beta/(alpha + beta*g): every derivative acts directly on a smooth
// grid function, keeping the truncation error second order at all interior
// nodes (differentiating an already-differenced flux loses an order next to
// the one-sided closures).
inline SteadyResidual steady_residual(const ModelParams& mp, const AxisymState& s) {
    const auto& grid = s.grid;
    const auto r = grid.nodes().array();
    const auto denom = (mp.alpha + mp.beta * s.g.array()).eval();
    if (!(denom > 0.0).all())
        throw std::domain_error("steady_residual: alpha + beta*g must stay positive");

    const auto chi = (mp.beta / denom).eval();
    const RealField rho_chi = (s.rho.array() * chi).matrix();

    const RealField drho = ddr(grid, s.rho);
    const RealField d2rho = d2dr2(grid, s.rho);
    const RealField dg = ddr(grid, s.g);
    const RealField d2g = d2dr2(grid, s.g);
    const RealField drho_chi = ddr(grid, rho_chi);

    SteadyResidual out;
    out.mass = (mp.diffusion * (d2rho.array() + drho.array() / r) -
                drho_chi.array() * dg.array() -
                rho_chi.array() * (d2g.array() + dg.array() / r))
                   .matrix();
    out.chemical = mp.lambda * s.rho - s.g;
    out.momentum = (s.v_theta.array().square() + mp.b * r * dg.array()).matrix();
    return out;
}

struct IdentityReport {
    RealField flux;             // r*(D*rho' - rho*chi*g'), constant at steady state
    double max_chemical_gap;    // max |g - lambda*rho| over all nodes
    double flux_mean;           // interior nodes
    double flux_stddev;         // interior nodes
    double flux_max_abs_dev;    // max |flux - mean| over interior nodes
    double max_momentum_gap;    // max |v_theta^2 + b*r*g'| over interior nodes
};

// Structural identities of the steady state: the chemical profile is a
// scalar multiple of the density, the radial flux is constant, and the
// azimuthal velocity balances the chemical gradient.
inline IdentityReport check_identities(const ModelParams& mp, const AxisymState& s) {
    const auto& grid = s.grid;
    const Eigen::Index n = grid.size();
    const auto r = grid.nodes().array();
    const auto denom = (mp.alpha + mp.beta * s.g.array()).eval();
    if (!(denom > 0.0).all())
        throw std::domain_error("check_identities: alpha + beta*g must stay positive");

    const auto chi = (mp.beta / denom).eval();
    const RealField drho = ddr(grid, s.rho);
    const RealField dg = ddr(grid, s.g);

    IdentityReport rep;
    rep.flux = (r * (mp.diffusion * drho.array() - s.rho.array() * chi * dg.array())).matrix();
    rep.max_chemical_gap = (s.g - mp.lambda * s.rho).cwiseAbs().maxCoeff();

    const auto interior = rep.flux.segment(1, n - 2);
    rep.flux_mean = interior.mean();
    rep.flux_stddev = std::sqrt((interior.array() - rep.flux_mean).square().sum() /
                                static_cast<double>(n - 2));
    rep.flux_max_abs_dev = (interior.array() - rep.flux_mean).abs().maxCoeff();

    const RealField momentum = (s.v_theta.array().square() + mp.b * r * dg.array()).matrix();
    rep.max_momentum_gap = momentum.segment(1, n - 2).cwiseAbs().maxCoeff();
    return rep;
}

}  // namespace antmill
