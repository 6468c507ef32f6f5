#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "antmill/numerics.hpp"
#include "antmill/steady_state.hpp"

namespace antmill {

enum class TimeScheme { euler, rk4 };

struct EvolveConfig {
    double dt = 1e-4;
    long n_steps = 1;
    TimeScheme scheme = TimeScheme::rk4;
    long record_every = 1;
    bool force_dt = false;  // bypass the explicit-step limit (expect trouble)
    bool record_snapshots = false;
};

// Time derivatives of the four state fields.
struct StateRates {
    RealField rho;
    RealField g;
    RealField v_r;
    RealField v_theta;
};

// Largest time step the explicit schemes tolerate on this grid.
inline double explicit_dt_limit(const RadialGrid& grid, const ModelParams& mp) {
    return grid.dr() * grid.dr() / (4.0 * mp.diffusion);
}

// Axisymmetric right-hand side:
//   d(rho)/dt     = (1/r) d/dr[ r (D rho' - rho*chi(g)*g') ] - v_r rho'
//   d(g)/dt       = lambda*rho - g
//   d(v_r)/dt     = -v_r v_r' + v_theta^2/r + b g'
//   d(v_theta)/dt = -v_r v_theta' - v_r v_theta / r
// with chi(g) = beta/(alpha + beta g). The density flux is differenced in
// conservative form, matching the flux the grid actually transports.
inline StateRates rhs(const AxisymState& s, const ModelParams& mp) {
    const auto& grid = s.grid;
    const auto r = grid.nodes().array();
    const auto denom = (mp.alpha + mp.beta * s.g.array()).eval();
    if (!(denom > 0.0).all()) throw std::domain_error("rhs: alpha + beta*g must stay positive");

    const auto chi = (mp.beta / denom).eval();
    const RealField drho = ddr(grid, s.rho);
    const RealField dg = ddr(grid, s.g);
    const RealField point_flux =
        (mp.diffusion * drho.array() - s.rho.array() * chi * dg.array()).matrix();

    StateRates k;
    k.rho = (ddr(grid, (r * point_flux.array()).matrix()).array() / r -
             s.v_r.array() * drho.array())
                .matrix();
    k.g = mp.lambda * s.rho - s.g;
    k.v_r = (-s.v_r.array() * ddr(grid, s.v_r).array() + s.v_theta.array().square() / r +
             mp.b * dg.array())
                .matrix();
    k.v_theta = (-s.v_r.array() * ddr(grid, s.v_theta).array() -
                 s.v_r.array() * s.v_theta.array() / r)
                    .matrix();
    return k;
}

// Same rates with the boundary entries zeroed: the generator the explicit
// steps integrate, holding both endpoints of every field fixed.
inline StateRates pinned_rhs(const AxisymState& s, const ModelParams& mp) {
    StateRates k = rhs(s, mp);
    const Eigen::Index n = s.grid.size();
    for (RealField* f : {&k.rho, &k.g, &k.v_r, &k.v_theta}) {
        (*f)(0) = 0.0;
        (*f)(n - 1) = 0.0;
    }
    return k;
}

inline bool all_finite(const AxisymState& s) {
    return s.rho.allFinite() && s.g.allFinite() && s.v_r.allFinite() && s.v_theta.allFinite();
}

namespace detail {

inline AxisymState apply_rates(const AxisymState& s, const StateRates& k, double c) {
    AxisymState out = s;
    out.rho += c * k.rho;
    out.g += c * k.g;
    out.v_r += c * k.v_r;
    out.v_theta += c * k.v_theta;
    return out;
}

inline AxisymState advance(const AxisymState& s, const ModelParams& mp, double dt,
                           TimeScheme scheme) {
    if (scheme == TimeScheme::euler) {
        return apply_rates(s, pinned_rhs(s, mp), dt);
    }
    const StateRates k1 = pinned_rhs(s, mp);
    const StateRates k2 = pinned_rhs(apply_rates(s, k1, 0.5 * dt), mp);
    const StateRates k3 = pinned_rhs(apply_rates(s, k2, 0.5 * dt), mp);
    const StateRates k4 = pinned_rhs(apply_rates(s, k3, dt), mp);
    AxisymState out = s;
    const double w = dt / 6.0;
    out.rho += w * (k1.rho + 2.0 * k2.rho + 2.0 * k3.rho + k4.rho);
    out.g += w * (k1.g + 2.0 * k2.g + 2.0 * k3.g + k4.g);
    out.v_r += w * (k1.v_r + 2.0 * k2.v_r + 2.0 * k3.v_r + k4.v_r);
    out.v_theta += w * (k1.v_theta + 2.0 * k2.v_theta + 2.0 * k3.v_theta + k4.v_theta);
    return out;
}

inline void check_step_size(const AxisymState& s, const ModelParams& mp,
                            const EvolveConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("time step must be positive");
    if (!cfg.force_dt && cfg.dt > explicit_dt_limit(s.grid, mp))
        throw std::invalid_argument(
            "time step exceeds the explicit stability limit dr^2/(4D); set force_dt to override");
}

}  // namespace detail

// One explicit step. Boundary nodes are bit-identical between input and
// output.
inline AxisymState step(const AxisymState& s, const ModelParams& mp, const EvolveConfig& cfg) {
    detail::check_step_size(s, mp, cfg);
    AxisymState out = detail::advance(s, mp, cfg.dt, cfg.scheme);
    if (!all_finite(out)) throw NumericError("time step produced non-finite values (blow-up)");
    return out;
}

enum class PerturbShape { bump, mode0_sine };

// Adds a compactly supported density perturbation that vanishes at both
// boundaries; peak value equals `amplitude` at the domain midpoint.
inline AxisymState add_perturbation(const AxisymState& s, double amplitude, PerturbShape shape) {
    const double min_rho = s.rho.minCoeff();
    if (!(std::abs(amplitude) < 0.1 * min_rho))
        throw std::invalid_argument(
            "perturbation amplitude too large: |amplitude| must stay below 0.1*min(rho)");
    const auto& grid = s.grid;
    AxisymState out = s;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double r = grid.node(i);
        double profile = 0.0;
        if (shape == PerturbShape::bump) {
            const double xi = (2.0 * r - (grid.inner() + grid.outer())) /
                              (grid.outer() - grid.inner());
            if (std::abs(xi) < 1.0) profile = std::exp(1.0 - 1.0 / (1.0 - xi * xi));
        } else {
            profile = std::sin(std::numbers::pi * (r - grid.inner()) /
                               (grid.outer() - grid.inner()));
        }
        out.rho(i) += amplitude * profile;
    }
    return out;
}

// L2 distance between two states over all four fields.
inline double deviation_norm(const AxisymState& a, const AxisymState& ref) {
    return std::sqrt((a.rho - ref.rho).squaredNorm() + (a.g - ref.g).squaredNorm() +
                     (a.v_r - ref.v_r).squaredNorm() + (a.v_theta - ref.v_theta).squaredNorm());
}

struct Trajectory {
    std::vector<double> times;
    std::vector<double> deviation_norms;
    bool blew_up = false;
    long blowup_step = -1;
    std::vector<AxisymState> snapshots;
};

// Repeated explicit steps, recording the distance from `reference` at step 0
// and every `record_every` steps. Stops early if the state leaves the finite
// range or exits the domain where the rates are defined; the trajectory is
// marked rather than an exception thrown.
inline Trajectory evolve(const AxisymState& start, const ModelParams& mp,
                         const EvolveConfig& cfg, const AxisymState& reference) {
    detail::check_step_size(start, mp, cfg);
    if (cfg.n_steps < 1) throw std::invalid_argument("n_steps must be at least 1");
    if (cfg.record_every < 1) throw std::invalid_argument("record_every must be at least 1");
    rhs(start, mp);  // invalid initial states still fail loudly

    Trajectory traj;
    auto record = [&](long step_index, const AxisymState& s) {
        traj.times.push_back(static_cast<double>(step_index) * cfg.dt);
        traj.deviation_norms.push_back(deviation_norm(s, reference));
        if (cfg.record_snapshots) traj.snapshots.push_back(s);
    };

    AxisymState s = start;
    record(0, s);
    for (long i = 1; i <= cfg.n_steps; ++i) {
        try {
            s = detail::advance(s, mp, cfg.dt, cfg.scheme);
        } catch (const std::domain_error&) {
            // the chemotaxis denominator collapsed mid-step
            traj.blew_up = true;
            traj.blowup_step = i;
            record(i, s);
            break;
        }
        if (!all_finite(s)) {
            traj.blew_up = true;
            traj.blowup_step = i;
            record(i, s);
            break;
        }
        if (i % cfg.record_every == 0) record(i, s);
    }
    return traj;
}

}  // namespace antmill
