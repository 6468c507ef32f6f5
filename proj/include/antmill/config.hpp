#pragma once

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "antmill/evolve.hpp"
#include "antmill/fredholm.hpp"
#include "antmill/params.hpp"

namespace antmill {

// Malformed configuration (unreadable file, bad JSON, wrong shapes).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridSection {
    double r_a = 0.5;
    double r_b = 1.0;
    long n = 129;
};

struct EvolveSection {
    double dt = 0.0;  // 0 means "use the explicit limit"
    long n_steps = 1000;
    std::string scheme = "rk4";
    double epsilon1 = 1e-3;  // perturbation amplitude relative to min(rho0)
    std::string shape = "bump";
    long record_every = 10;
    bool force_dt = false;
};

struct StabilitySection {
    std::vector<int> n_modes{0, 1, 2};
    std::vector<double> b_sweep{0.1, 1.0, 10.0, 100.0};
    double dt_report = 1e-3;
};

struct FredholmSection {
    std::vector<double> k_values{0.0, 0.25, -0.25, 0.5, -0.5, 1.0, -1.0, 2.0, -2.0};
    double J = 0.0;
    int m = 128;
    double v = 1.0;
    double alpha_turn = 1.0;
};

struct RunConfig {
    ModelParams model;
    SteadyStateConstants constants;
    GridSection grid;
    EvolveSection evolve;
    StabilitySection stability;
    FredholmSection fredholm;
    std::string output_dir = "out";
    unsigned long long seed = 0;
};

namespace detail {

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
    using nlohmann::json;
    RunConfig cfg;
    try {
        for (const char* key : {"model", "constants", "grid"})
            if (!j.contains(key))
                throw ConfigError(std::string("config is missing required section \"") + key +
                                  "\"");

        const json& model = j.at("model");
        cfg.model.alpha = detail::get_or(model, "alpha", cfg.model.alpha);
        cfg.model.beta = detail::get_or(model, "beta", cfg.model.beta);
        cfg.model.lambda = detail::get_or(model, "lambda", cfg.model.lambda);
        cfg.model.b = detail::get_or(model, "b", cfg.model.b);
        cfg.model.diffusion = detail::get_or(model, "diffusion", cfg.model.diffusion);

        const json& constants = j.at("constants");
        cfg.constants.c1 = constants.at("c1").get<double>();
        cfg.constants.c2 = constants.at("c2").get<double>();

        const json& grid = j.at("grid");
        cfg.grid.r_a = grid.at("r_a").get<double>();
        cfg.grid.r_b = grid.at("r_b").get<double>();
        cfg.grid.n = grid.at("n").get<long>();

        if (j.contains("evolve")) {
            const json& ev = j.at("evolve");
            cfg.evolve.dt = detail::get_or(ev, "dt", cfg.evolve.dt);
            cfg.evolve.n_steps = detail::get_or(ev, "n_steps", cfg.evolve.n_steps);
            cfg.evolve.scheme = detail::get_or<std::string>(ev, "scheme", cfg.evolve.scheme);
            cfg.evolve.epsilon1 = detail::get_or(ev, "epsilon1", cfg.evolve.epsilon1);
            cfg.evolve.shape = detail::get_or<std::string>(ev, "shape", cfg.evolve.shape);
            cfg.evolve.record_every = detail::get_or(ev, "record_every", cfg.evolve.record_every);
            cfg.evolve.force_dt = detail::get_or(ev, "force_dt", cfg.evolve.force_dt);
        }
        if (j.contains("stability")) {
            const json& st = j.at("stability");
            cfg.stability.n_modes =
                detail::get_or<std::vector<int>>(st, "n_modes", cfg.stability.n_modes);
            cfg.stability.b_sweep =
                detail::get_or<std::vector<double>>(st, "b_sweep", cfg.stability.b_sweep);
            cfg.stability.dt_report = detail::get_or(st, "dt_report", cfg.stability.dt_report);
        }
        if (j.contains("fredholm")) {
            const json& fr = j.at("fredholm");
            cfg.fredholm.k_values =
                detail::get_or<std::vector<double>>(fr, "k_values", cfg.fredholm.k_values);
            cfg.fredholm.J = detail::get_or(fr, "J", cfg.fredholm.J);
            cfg.fredholm.m = detail::get_or(fr, "m", cfg.fredholm.m);
            cfg.fredholm.v = detail::get_or(fr, "v", cfg.fredholm.v);
            cfg.fredholm.alpha_turn = detail::get_or(fr, "alpha_turn", cfg.fredholm.alpha_turn);
        }
        cfg.output_dir = detail::get_or<std::string>(j, "output_dir", cfg.output_dir);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid JSON in ") + path + ": " + e.what());
    }
    return parse_config(j);
}

// Constraint checks shared by the subcommands; messages name the offending
// field. Validation failures are distinct from malformed configs.
inline std::vector<std::string> validate_config_base(const RunConfig& cfg) {
    std::vector<std::string> errs;
    for (const auto& v : validate_params(cfg.model).violations) errs.push_back(v.message);
    if (errs.empty())
        for (const auto& v : validate_constants(cfg.model, cfg.constants).violations)
            errs.push_back(v.message);
    if (!(cfg.grid.r_a > 0.0)) errs.push_back("grid r_a must be positive");
    if (!(cfg.grid.r_b > cfg.grid.r_a)) errs.push_back("grid r_b must exceed r_a");
    if (cfg.grid.n < 3) errs.push_back("grid n must be at least 3");
    if (errs.empty()) {
        const double r_star = admissible_outer_radius(cfg.model, cfg.constants);
        if (!(cfg.grid.r_b < r_star))
            errs.push_back("grid r_b must lie below the admissible radius " +
                           std::to_string(r_star));
    }
    return errs;
}

inline std::vector<std::string> validate_config_evolve(const RunConfig& cfg) {
    std::vector<std::string> errs;
    if (cfg.evolve.dt < 0.0) errs.push_back("evolve dt must be nonnegative");
    if (cfg.evolve.n_steps < 1) errs.push_back("evolve n_steps must be at least 1");
    if (cfg.evolve.record_every < 1) errs.push_back("evolve record_every must be at least 1");
    if (cfg.evolve.scheme != "euler" && cfg.evolve.scheme != "rk4")
        errs.push_back("evolve scheme must be \"euler\" or \"rk4\"");
    if (cfg.evolve.shape != "bump" && cfg.evolve.shape != "mode0_sine")
        errs.push_back("evolve shape must be \"bump\" or \"mode0_sine\"");
    if (!(cfg.evolve.epsilon1 < 0.1) || !(cfg.evolve.epsilon1 > -0.1))
        errs.push_back("evolve epsilon1 must stay below 0.1 in magnitude");
    return errs;
}

inline std::vector<std::string> validate_config_stability(const RunConfig& cfg) {
    std::vector<std::string> errs;
    if (cfg.stability.b_sweep.empty()) errs.push_back("stability b_sweep must not be empty");
    if (cfg.stability.n_modes.empty()) errs.push_back("stability n_modes must not be empty");
    for (double b : cfg.stability.b_sweep)
        if (!(b > 0.0)) {
            errs.push_back("stability b_sweep entries must be positive");
            break;
        }
    if (!(cfg.stability.dt_report > 0.0)) errs.push_back("stability dt_report must be positive");
    return errs;
}

inline std::vector<std::string> validate_config_fredholm(const RunConfig& cfg) {
    std::vector<std::string> errs;
    if (cfg.fredholm.k_values.empty()) errs.push_back("fredholm k_values must not be empty");
    if (!(std::abs(cfg.fredholm.J) < 1.0)) errs.push_back("fredholm J magnitude must be below 1");
    if (cfg.fredholm.m < 8) errs.push_back("fredholm m must be at least 8");
    if (!(cfg.fredholm.v > 0.0)) errs.push_back("fredholm v must be positive");
    if (!(cfg.fredholm.alpha_turn > 0.0)) errs.push_back("fredholm alpha_turn must be positive");
    return errs;
}

}  // namespace antmill
