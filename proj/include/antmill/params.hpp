#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace antmill {

// Continuum constants of the mixed memory-reinforcement model. All
// quantities are nondimensional; `diffusion` multiplies the density
// Laplacian and defaults to the unit-diffusion form in which the
// closed-form ring profiles were derived.
struct ModelParams {
    double alpha = 1.0;      // chemotaxis saturation constant
    double beta = 1.0;       // chemotaxis sensitivity
    double lambda = 1.0;     // chemical deposition rate
    double b = 1.0;          // gradient coupling in the velocity equation
    double diffusion = 1.0;  // density diffusion constant
};

// Integration constants of the closed-form ring profiles. c2 scales the
// r^(-p) envelope; c1 shifts the decay exponent.
struct SteadyStateConstants {
    double c1 = 0.0;
    double c2 = 1.0;
};

// Exponent p of the radial decay r^(-p) shared by all steady profiles.
inline double decay_exponent(const ModelParams& mp, const SteadyStateConstants& sc) {
    return sc.c1 + mp.alpha / (mp.beta * mp.lambda);
}

struct Violation {
    std::string field;
    std::string message;
};

// Violations are data, not failures: an empty list means the inputs are
// admissible. All constraints are strict inequalities; equality fails.
struct ValidationResult {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }

    std::string summary() const {
        if (ok()) return "ok";
        std::string s;
        for (const auto& v : violations) {
            if (!s.empty()) s += "; ";
            s += v.message;
        }
        return s;
    }
};

inline ValidationResult validate_params(const ModelParams& mp) {
    ValidationResult r;
    auto require_positive = [&r](double value, const char* field) {
        if (!(value > 0.0))
            r.violations.push_back({field, std::string(field) + " must be positive"});
    };
    require_positive(mp.alpha, "alpha");
    require_positive(mp.beta, "beta");
    require_positive(mp.lambda, "lambda");
    require_positive(mp.b, "b");
    require_positive(mp.diffusion, "diffusion");
    return r;
}

// c2 > 0 keeps the density and chemical profiles positive; p > 0 keeps the
// azimuthal velocity real.
inline ValidationResult validate_constants(const ModelParams& mp, const SteadyStateConstants& sc) {
    ValidationResult r;
    if (!(sc.c2 > 0.0)) r.violations.push_back({"c2", "C2 must be positive"});
    if (!(decay_exponent(mp, sc) > 0.0)) r.violations.push_back({"p", "p must be positive"});
    return r;
}

// Radius r* at which the steady density crosses zero: c2 * r^(-p) = 1.
// Any grid with outer radius below r* keeps the density positive.
inline double admissible_outer_radius(const ModelParams& mp, const SteadyStateConstants& sc) {
    const auto vp = validate_params(mp);
    if (!vp.ok()) throw std::invalid_argument("admissible_outer_radius: " + vp.summary());
    const auto vc = validate_constants(mp, sc);
    if (!vc.ok()) throw std::invalid_argument("admissible_outer_radius: " + vc.summary());
    return std::pow(sc.c2, 1.0 / decay_exponent(mp, sc));
}

}  // namespace antmill
