#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "rotator/system.hpp"

namespace rotator {

struct BadConfig : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Everything a command run depends on. A run is reproducible from the
/// serialized form alone; unknown keys are rejected on load.
struct ExperimentConfig {
    std::string command;
    std::string preset = "caseI"; // caseI | caseII | sinusoidal | harmonic
    presets::SinusoidalParams params{1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0};
    double harmonicP = 0.0; // f(phi) = omega - cos(phi) - p cos(n phi)
    int harmonicN = 2;
    double harmonicR = 0.0; // g(phi) = kappa (sin(phi) + r sin(m phi))
    int harmonicM = 1;
    std::string modelCase = "I"; // bifdiag: I | II
    std::string plane = "kw";    // bifdiag: kw | ka
    int grid = 64;
    double tMax = 200.0;
    double rtol = 1e-10;
    double atol = 1e-12;
    double epsLo = 0.005, epsHi = 0.1; // burst-scan window
    int nSteps = 100;
    std::string out = "out";
    std::string svg; // empty: no render
    unsigned seed = 0;

    bool operator==(const ExperimentConfig& o) const {
        return command == o.command && preset == o.preset &&
               params.omega1 == o.params.omega1 && params.omega2 == o.params.omega2 &&
               params.a1 == o.params.a1 && params.a2 == o.params.a2 &&
               params.kappa1 == o.params.kappa1 && params.kappa2 == o.params.kappa2 &&
               params.alpha == o.params.alpha && harmonicP == o.harmonicP &&
               harmonicN == o.harmonicN && harmonicR == o.harmonicR && harmonicM == o.harmonicM &&
               modelCase == o.modelCase && plane == o.plane && grid == o.grid && tMax == o.tMax &&
               rtol == o.rtol && atol == o.atol && epsLo == o.epsLo && epsHi == o.epsHi &&
               nSteps == o.nSteps && out == o.out && svg == o.svg && seed == o.seed;
    }
};

inline nlohmann::json toJson(const ExperimentConfig& c) {
    return {{"command", c.command},
            {"preset", c.preset},
            {"omega1", c.params.omega1},
            {"omega2", c.params.omega2},
            {"a1", c.params.a1},
            {"a2", c.params.a2},
            {"kappa1", c.params.kappa1},
            {"kappa2", c.params.kappa2},
            {"alpha", c.params.alpha},
            {"p", c.harmonicP},
            {"n", c.harmonicN},
            {"r", c.harmonicR},
            {"m", c.harmonicM},
            {"case", c.modelCase},
            {"plane", c.plane},
            {"grid", c.grid},
            {"tmax", c.tMax},
            {"rtol", c.rtol},
            {"atol", c.atol},
            {"eps_lo", c.epsLo},
            {"eps_hi", c.epsHi},
            {"n_steps", c.nSteps},
            {"out", c.out},
            {"svg", c.svg},
            {"seed", c.seed}};
}

inline ExperimentConfig configFromJson(const nlohmann::json& j) {
    static const char* known[] = {"command", "preset", "omega1", "omega2", "a1", "a2",
                                  "kappa1",  "kappa2", "alpha",  "p",      "n",  "r",
                                  "m",       "case",   "plane",  "grid",   "tmax", "rtol",
                                  "atol",    "eps_lo", "eps_hi", "n_steps", "out", "svg", "seed"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw BadConfig("unknown config key: " + it.key());
    }
    ExperimentConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) j.at(key).get_to(field);
    };
    get("command", c.command);
    get("preset", c.preset);
    get("omega1", c.params.omega1);
    get("omega2", c.params.omega2);
    get("a1", c.params.a1);
    get("a2", c.params.a2);
    get("kappa1", c.params.kappa1);
    get("kappa2", c.params.kappa2);
    get("alpha", c.params.alpha);
    get("p", c.harmonicP);
    get("n", c.harmonicN);
    get("r", c.harmonicR);
    get("m", c.harmonicM);
    get("case", c.modelCase);
    get("plane", c.plane);
    get("grid", c.grid);
    get("tmax", c.tMax);
    get("rtol", c.rtol);
    get("atol", c.atol);
    get("eps_lo", c.epsLo);
    get("eps_hi", c.epsHi);
    get("n_steps", c.nSteps);
    get("out", c.out);
    get("svg", c.svg);
    get("seed", c.seed);
    return c;
}

/// Instantiate the system a config describes. Presets with a single
/// (omega, a, kappa) triple read the oscillator-1 slots.
inline RotatorSystem buildSystem(const ExperimentConfig& c) {
    const auto& p = c.params;
    if (c.preset == "caseI") return presets::caseI(p.omega1, p.a1, p.kappa1);
    if (c.preset == "caseII") return presets::caseII(p.omega1, p.a1, p.kappa1);
    if (c.preset == "sinusoidal") return presets::sinusoidal(p);
    if (c.preset == "harmonic")
        return presets::higherHarmonic(p.omega1, c.harmonicP, c.harmonicN, p.kappa1, c.harmonicR,
                                       c.harmonicM);
    throw BadConfig("unknown preset: " + c.preset);
}

} // namespace rotator
