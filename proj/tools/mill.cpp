// Command-line front end: reads a JSON experiment description and emits the
// steady-state, evolution, stability, and turning-operator tables as CSV.

#include <complex>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "antmill/config.hpp"
#include "antmill/csv.hpp"
#include "antmill/evolve.hpp"
#include "antmill/fredholm.hpp"
#include "antmill/linear_stability.hpp"
#include "antmill/parallel.hpp"
#include "antmill/steady_state.hpp"

namespace {

using namespace antmill;

// Constraint violations detected before any computation starts.
struct ValidationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_valid(const std::vector<std::string>& errs) {
    if (errs.empty()) return;
    std::string joined;
    for (const auto& e : errs) {
        if (!joined.empty()) joined += "; ";
        joined += e;
    }
    throw ValidationFailure(joined);
}

RadialGrid make_grid(const RunConfig& cfg) {
    return RadialGrid(cfg.grid.r_a, cfg.grid.r_b, cfg.grid.n);
}

std::filesystem::path out_path(const RunConfig& cfg, const char* name) {
    return std::filesystem::path(cfg.output_dir) / name;
}

void run_steady(const RunConfig& cfg) {
    require_valid(validate_config_base(cfg));
    const RadialGrid grid = make_grid(cfg);
    const AxisymState steady = eval_steady(cfg.model, cfg.constants, grid);

    CsvWriter csv(out_path(cfg, "steady.csv").string());
    csv.row("r", "rho0", "g0", "vtheta0");
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        csv.row(grid.node(i), steady.rho(i), steady.g(i), steady.v_theta(i));

    const IdentityReport rep = check_identities(cfg.model, steady);
    std::printf("steady identities: max|g - lambda*rho| = %s\n",
                format_number(rep.max_chemical_gap).c_str());
    std::printf("  radial flux mean = %s, stddev = %s, max deviation = %s\n",
                format_number(rep.flux_mean).c_str(), format_number(rep.flux_stddev).c_str(),
                format_number(rep.flux_max_abs_dev).c_str());
    std::printf("  max|v_theta^2 + b r g'| (interior) = %s\n",
                format_number(rep.max_momentum_gap).c_str());
}

void run_evolve(const RunConfig& cfg) {
    require_valid(validate_config_base(cfg));
    require_valid(validate_config_evolve(cfg));
    const RadialGrid grid = make_grid(cfg);
    const AxisymState steady = eval_steady(cfg.model, cfg.constants, grid);

    EvolveConfig ec;
    ec.dt = cfg.evolve.dt > 0.0 ? cfg.evolve.dt : explicit_dt_limit(grid, cfg.model);
    ec.n_steps = cfg.evolve.n_steps;
    ec.scheme = cfg.evolve.scheme == "euler" ? TimeScheme::euler : TimeScheme::rk4;
    ec.record_every = cfg.evolve.record_every;
    ec.force_dt = cfg.evolve.force_dt;
    if (ec.force_dt && ec.dt > explicit_dt_limit(grid, cfg.model))
        std::fprintf(stderr, "warning: dt %s exceeds the explicit limit %s\n",
                     format_number(ec.dt).c_str(),
                     format_number(explicit_dt_limit(grid, cfg.model)).c_str());

    const double amplitude = cfg.evolve.epsilon1 * steady.rho.minCoeff();
    const PerturbShape shape =
        cfg.evolve.shape == "bump" ? PerturbShape::bump : PerturbShape::mode0_sine;
    const AxisymState start = add_perturbation(steady, amplitude, shape);

    const Trajectory traj = evolve(start, cfg.model, ec, steady);

    CsvWriter csv(out_path(cfg, "trajectory.csv").string());
    csv.row("t", "deviation_norm", "blowup_flag");
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const bool last = i + 1 == traj.times.size();
        csv.row(traj.times[i], traj.deviation_norms[i], (traj.blew_up && last) ? 1 : 0);
    }
    if (traj.blew_up)
        throw NumericError("evolution blew up at step " + std::to_string(traj.blowup_step));
}

void run_stability(const RunConfig& cfg, int jobs) {
    require_valid(validate_config_base(cfg));
    require_valid(validate_config_stability(cfg));
    const RadialGrid grid = make_grid(cfg);

    std::vector<double> bs = cfg.stability.b_sweep;
    std::vector<int> ns = cfg.stability.n_modes;
    std::sort(bs.begin(), bs.end());
    std::sort(ns.begin(), ns.end());

    struct Cell {
        double b;
        int n;
        Eigen::VectorXcd spectrum;
        StabilityReport report;
        std::string error;
    };
    std::vector<Cell> cells;
    for (double b : bs)
        for (int n : ns) cells.push_back({b, n, {}, {}, {}});

    detail::parallel_for(cells.size(), jobs, [&](std::size_t i) {
        Cell& cell = cells[i];
        try {
            ModelParams mp = cfg.model;
            mp.b = cell.b;
            const AxisymState steady = eval_steady(mp, cfg.constants, grid);
            const LinearOperator op = assemble_operator(mp, steady, cell.n);
            cell.spectrum = growth_spectrum(op);
            cell.report = amplification_report(op, cfg.stability.dt_report);
        } catch (const std::exception& e) {
            cell.error = e.what();
        }
    });
    for (const Cell& cell : cells)
        if (!cell.error.empty())
            throw NumericError("stability cell (b=" + format_number(cell.b) +
                               ", n=" + std::to_string(cell.n) + ") failed: " + cell.error);

    CsvWriter spec_csv(out_path(cfg, "spectrum.csv").string());
    spec_csv.row("n", "b", "eig_index", "re", "im");
    for (const Cell& cell : cells)
        for (Eigen::Index k = 0; k < cell.spectrum.size(); ++k)
            spec_csv.row(cell.n, cell.b, static_cast<long>(k), cell.spectrum(k).real(),
                         cell.spectrum(k).imag());

    CsvWriter rep_csv(out_path(cfg, "report.csv").string());
    rep_csv.row("n", "b", "dt", "norm_I_minus_dtM", "spectral_radius", "max_re_eig", "verdict");
    for (const Cell& cell : cells)
        rep_csv.row(cell.n, cell.b, cell.report.dt, cell.report.norm_I_minus_dtM,
                    cell.report.spectral_radius_forward, cell.report.max_re_eig,
                    to_string(cell.report.verdict));
}

void run_fredholm(const RunConfig& cfg, int jobs) {
    require_valid(validate_config_fredholm(cfg));
    KernelParams kp;
    kp.speed = cfg.fredholm.v;
    kp.alpha_turn = cfg.fredholm.alpha_turn;
    kp.bias = cfg.fredholm.J;

    const auto cells = nullspace_scan(cfg.fredholm.k_values, kp, cfg.fredholm.m, jobs);

    CsvWriter csv(out_path(cfg, "fredholm.csv").string());
    csv.row("k", "J", "m", "sigma_min");
    for (const auto& cell : cells) csv.row(cell.k, cfg.fredholm.J, cfg.fredholm.m, cell.sigma_min);
    for (const auto& cell : cells)
        if (!cell.ok())
            throw NumericError("scan cell k=" + format_number(cell.k) + " failed: " + cell.error);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ant-mill chemotaxis model: steady states, evolution, stability, turning kernel"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    unsigned long long seed = 0;
    int jobs = 1;

    std::vector<CLI::App*> subs;
    for (const char* name : {"steady", "evolve", "stability", "fredholm", "all"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON experiment description")->required();
        sub->add_option("--out", out_override, "output directory override");
        sub->add_option("--seed", seed, "seed reserved for randomized diagnostics");
        sub->add_option("--jobs", jobs, "sweep-cell parallelism")->check(CLI::PositiveNumber);
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);
    const std::string cmd = app.get_subcommands().front()->get_name();

    try {
        RunConfig cfg = load_config(config_path);
        if (!out_override.empty()) cfg.output_dir = out_override;
        cfg.seed = seed;
        std::filesystem::create_directories(cfg.output_dir);

        if (cmd == "steady" || cmd == "all") run_steady(cfg);
        if (cmd == "evolve" || cmd == "all") run_evolve(cfg);
        if (cmd == "stability" || cmd == "all") run_stability(cfg, jobs);
        if (cmd == "fredholm" || cmd == "all") run_fredholm(cfg, jobs);
        return 0;
    } catch (const antmill::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ValidationFailure& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 3;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 4;
    }
}
