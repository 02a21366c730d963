// rotatorlab: command-line driver for the coupled active rotator toolkit.
// Every command writes CSV/JSON data files; SVG rendering is optional.
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rotator/bifurcation.hpp"
#include "rotator/config.hpp"
#include "rotator/io.hpp"
#include "rotator/orbits.hpp"
#include "rotator/svg.hpp"

using namespace rotator;

namespace {

struct CmdOpts {
    ExperimentConfig cfg;
    double omega = 1.0, a = 1.0, kappa = 1.0;
    const CLI::App* active = nullptr; // the parsed subcommand

    bool given(const std::string& flag) const { return active && active->count(flag) > 0; }
};

void addCommonFlags(CLI::App* sub, CmdOpts& o) {
    sub->add_option("--preset", o.cfg.preset, "caseI | caseII | sinusoidal | harmonic")
        ->check(CLI::IsMember({"caseI", "caseII", "sinusoidal", "harmonic"}));
    sub->add_option("--omega", o.omega, "sets both natural frequencies");
    sub->add_option("--omega1", o.cfg.params.omega1);
    sub->add_option("--omega2", o.cfg.params.omega2);
    sub->add_option("--a", o.a, "sets both excitability amplitudes");
    sub->add_option("--a1", o.cfg.params.a1);
    sub->add_option("--a2", o.cfg.params.a2);
    sub->add_option("--kappa", o.kappa, "sets both coupling strengths");
    sub->add_option("--kappa1", o.cfg.params.kappa1);
    sub->add_option("--kappa2", o.cfg.params.kappa2);
    sub->add_option("--alpha", o.cfg.params.alpha, "coupling phase shift");
    sub->add_option("--p", o.cfg.harmonicP, "second-harmonic amplitude of the local field");
    sub->add_option("--n", o.cfg.harmonicN, "harmonic index of the local field term");
    sub->add_option("--r", o.cfg.harmonicR, "relative amplitude of the coupling harmonic");
    sub->add_option("--m", o.cfg.harmonicM, "harmonic index of the coupling term");
    sub->add_option("--grid", o.cfg.grid, "grid resolution");
    sub->add_option("--tmax", o.cfg.tMax, "integration horizon");
    sub->add_option("--rtol", o.cfg.rtol, "relative tolerance");
    sub->add_option("--atol", o.cfg.atol, "absolute tolerance");
    sub->add_option("--svg", o.cfg.svg, "render an SVG to this path");
    sub->add_option("--out", o.cfg.out, "output file stem");
    sub->add_option("--seed", o.cfg.seed, "seed for randomized sampling");
}

void foldPairedFlags(CmdOpts& o) {
    if (o.given("--omega")) o.cfg.params.omega1 = o.cfg.params.omega2 = o.omega;
    if (o.given("--a")) o.cfg.params.a1 = o.cfg.params.a2 = o.a;
    if (o.given("--kappa")) o.cfg.params.kappa1 = o.cfg.params.kappa2 = o.kappa;
}

void writeConfigEcho(const ExperimentConfig& cfg) {
    writeFile(cfg.out + ".config.json", toJson(cfg).dump(2) + "\n");
}

void maybeRenderSvg(const ExperimentConfig& cfg, const SvgScene& scene) {
    if (!cfg.svg.empty()) writeFile(cfg.svg, renderSvg(scene));
}

std::vector<SvgPolyline> separatrixLayer(const RotatorSystem& sys,
                                         const std::vector<Equilibrium>& eqs, double tMax) {
    std::vector<SvgPolyline> lines;
    for (const auto& e : eqs) {
        if (e.cls != EqClass::saddle) continue;
        for (const auto& sep : computeSeparatrices(sys, e, eqs, tMax)) {
            SvgPolyline pl;
            pl.color = "#555555";
            SvgPolyline cur = pl;
            // break the polyline at torus wrap jumps
            for (const auto& s : sep.path.samples) {
                Vec2 pt{wrap2pi(s.state.x1), wrap2pi(s.state.x2)};
                if (!cur.points.empty() &&
                    (std::fabs(pt.x - cur.points.back().x) > kPi ||
                     std::fabs(pt.y - cur.points.back().y) > kPi)) {
                    if (cur.points.size() >= 2) lines.push_back(cur);
                    cur.points.clear();
                }
                cur.points.push_back(pt);
            }
            if (cur.points.size() >= 2) lines.push_back(cur);
        }
    }
    return lines;
}

int cmdSymmetryCheck(const ExperimentConfig& cfg) {
    auto sys = buildSystem(cfg);
    std::mt19937 rng(cfg.seed);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    std::vector<TorusPoint> pts(1000);
    for (auto& p : pts) p = {u(rng), u(rng)};

    nlohmann::json report;
    report["reversible"] = sys.isReversible();
    double resR = reversibilityResidual(sys, reversalR(), pts);
    report["residual_R"] = resR;
    std::printf("R residual over %zu points: %.3e\n", pts.size(), resR);
    if (sys.isCaseI() && cfg.params.omega1 == 0.0 && cfg.params.omega2 == 0.0) {
        double resR2 = reversibilityResidual(sys, reversalR2(), pts);
        report["residual_R2"] = resR2;
        std::printf("R2 residual: %.3e\n", resR2);
    }
    writeFile(cfg.out + ".json", report.dump(2) + "\n");
    writeConfigEcho(cfg);
    return 0;
}

int cmdEquilibria(const ExperimentConfig& cfg) {
    auto sys = buildSystem(cfg);
    auto eqs = findEquilibria(sys);
    writeFile(cfg.out + ".csv", equilibriaCsv(eqs));
    writeConfigEcho(cfg);
    std::printf("%zu equilibria\n", eqs.size());
    SvgScene scene;
    addEquilibriumGlyphs(scene, eqs);
    maybeRenderSvg(cfg, scene);
    return 0;
}

int cmdPortrait(const ExperimentConfig& cfg) {
    auto sys = buildSystem(cfg);
    auto eqs = findEquilibria(sys);
    std::mt19937 rng(cfg.seed);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    LiftedPoint ic{u(rng), u(rng)};

    IntegrateOptions opts;
    opts.relTol = cfg.rtol;
    opts.absTol = cfg.atol;
    auto res = integrate(sys, ic, cfg.tMax, opts);
    writeFile(cfg.out + ".csv", trajectoryCsv(res.trajectory));
    writeConfigEcho(cfg);
    std::printf("trajectory: %zu samples\n", res.trajectory.samples.size());

    SvgScene scene;
    scene.separatrices = separatrixLayer(sys, eqs, cfg.tMax);
    SvgPolyline orbit;
    orbit.color = "#222288";
    SvgPolyline cur = orbit;
    for (const auto& s : res.trajectory.samples) {
        Vec2 pt{wrap2pi(s.state.x1), wrap2pi(s.state.x2)};
        if (!cur.points.empty() && (std::fabs(pt.x - cur.points.back().x) > kPi ||
                                    std::fabs(pt.y - cur.points.back().y) > kPi)) {
            if (cur.points.size() >= 2) scene.curves.push_back(cur);
            cur.points.clear();
        }
        cur.points.push_back(pt);
    }
    if (cur.points.size() >= 2) scene.curves.push_back(cur);
    addEquilibriumGlyphs(scene, eqs);
    maybeRenderSvg(cfg, scene);
    return 0;
}

int cmdRegions(const ExperimentConfig& cfg) {
    auto sys = buildSystem(cfg);
    auto eqs = findEquilibria(sys);
    ClassifyOptions copts;
    copts.equilibria = eqs;
    auto map = regionMap(sys, cfg.grid, copts);
    writeFile(cfg.out + ".csv", regionMapCsv(map));
    writeConfigEcho(cfg);

    SvgScene scene;
    scene.raster = rasterFromRegionMap(map);
    addEquilibriumGlyphs(scene, eqs);
    scene.legend = {{"dissipative", svgcolor::dissipative},
                    {"rotation", svgcolor::rotationBlue},
                    {"rotation (swapped)", svgcolor::rotationCyan},
                    {"libration ccw", svgcolor::librationYellow},
                    {"libration cw", svgcolor::librationOrange}};
    maybeRenderSvg(cfg, scene);
    return 0;
}

ModelCase parseCase(const std::string& s) {
    if (s == "I") return ModelCase::antiReciprocal;
    if (s == "II") return ModelCase::reciprocal;
    throw BadConfig("unknown case: " + s);
}

ParamPlane parsePlane(const std::string& s) {
    if (s == "kw") return ParamPlane::kappaOmega;
    if (s == "ka") return ParamPlane::kappaA;
    throw BadConfig("unknown plane: " + s);
}

BifCurve mirrorKappa(const BifCurve& c) {
    BifCurve m = c;
    for (auto& p : m.points) p[0] = -p[0];
    std::reverse(m.points.begin(), m.points.end());
    return m;
}

int cmdBifdiag(const ExperimentConfig& cfg) {
    ModelCase mc = parseCase(cfg.modelCase);
    ParamPlane plane = parsePlane(cfg.plane);
    auto curves = traceAnalyticCurves(mc, plane, -3.0, 3.0, 241);
    if (mc == ModelCase::antiReciprocal && plane == ParamPlane::kappaOmega) {
        // saddle-saddle connection curve: continued by shooting over a fixed
        // window, then mirrored through the kappa -> -kappa diagram symmetry
        ConnectionTraceOptions topt;
        topt.step = 0.02;
        topt.abscLo = 1.85;
        topt.abscHi = 2.25;
        // the seed window must stay below the no-approach fringe above the root
        auto het = traceConnectionCurve(caseIConnectionMiss, plane, 2.0, 0.10, 0.17, topt);
        curves.push_back(mirrorKappa(het));
        curves.push_back(std::move(het));
    }
    writeFile(cfg.out + ".json", diagramJson(curves).dump(2) + "\n");
    writeConfigEcho(cfg);
    std::printf("%zu curves\n", curves.size());

    SvgScene scene;
    scene.x0 = -3.0;
    scene.x1 = 3.0;
    scene.y0 = -3.0;
    scene.y1 = 3.0;
    for (const auto& c : curves) {
        SvgPolyline pl;
        switch (c.kind) {
        case CurveKind::saddleCenterI:
        case CurveKind::saddleCenterII: pl.color = "#cc0000"; break;
        case CurveKind::pitchforkI:
        case CurveKind::sinkSourceII: pl.color = "#0000cc"; break;
        case CurveKind::heteroclinicSS: pl.color = "#ff8800"; break;
        default: pl.color = "#888888"; break;
        }
        for (const auto& p : c.points) {
            if (std::fabs(p[0]) <= 3.0 && std::fabs(p[1]) <= 3.0) pl.points.push_back({p[0], p[1]});
        }
        if (pl.points.size() >= 2) scene.curves.push_back(pl);
    }
    maybeRenderSvg(cfg, scene);
    return 0;
}

int cmdConnect(const ExperimentConfig& cfg) {
    ConnectionTraceOptions topt;
    topt.abscLo = 1.81;
    topt.abscHi = 2.26;
    auto het = traceConnectionCurve(caseIConnectionMiss, ParamPlane::kappaOmega, 2.0, 0.10, 0.17,
                                    topt);
    std::printf("%zu connection points\n", het.points.size());
    std::vector<BifCurve> curves{het};
    writeFile(cfg.out + ".json", diagramJson(curves).dump(2) + "\n");
    writeConfigEcho(cfg);
    return 0;
}

int cmdBurstScan(const ExperimentConfig& cfg, const CmdOpts& o) {
    ScanOptions so;
    so.epsLo = cfg.epsLo;
    so.epsHi = cfg.epsHi;
    so.nSteps = cfg.nSteps;
    if (o.given("--omega") || o.given("--omega1")) so.omegaCenter = cfg.params.omega1;
    if (o.given("--a")) so.a = cfg.params.a1;
    if (o.given("--kappa1")) so.kappa1 = cfg.params.kappa1;
    if (o.given("--kappa2")) so.kappa2 = cfg.params.kappa2;
    if (o.given("--alpha")) so.alpha = cfg.params.alpha;
    auto pts = scanEpsilon(so);
    writeFile(cfg.out + ".csv", scanCsv(pts));
    writeConfigEcho(cfg);
    int conv = 0;
    for (const auto& p : pts) conv += p.converged;
    std::printf("%d/%zu scan points converged\n", conv, pts.size());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupled active rotator toolkit"};
    app.require_subcommand(1);

    CmdOpts o;
    std::function<int()> runner;

    auto* symCmd = app.add_subcommand("symmetry-check", "report time-reversal residuals");
    auto* eqCmd = app.add_subcommand("equilibria", "equilibrium census with classification");
    auto* portraitCmd = app.add_subcommand("portrait", "sample trajectory and separatrices");
    auto* regionsCmd = app.add_subcommand("regions", "grid classification of torus cells");
    auto* bifdiagCmd = app.add_subcommand("bifdiag", "bifurcation diagram curves");
    auto* connectCmd = app.add_subcommand("connect", "saddle-saddle connection curve");
    auto* burstCmd = app.add_subcommand("burst-scan", "detuning sweep of the bursting cycle");
    for (auto* sub : {symCmd, eqCmd, portraitCmd, regionsCmd, bifdiagCmd, connectCmd, burstCmd})
        addCommonFlags(sub, o);
    bifdiagCmd->add_option("--case", o.cfg.modelCase, "I | II")
        ->check(CLI::IsMember({"I", "II"}));
    bifdiagCmd->add_option("--plane", o.cfg.plane, "kw | ka")
        ->check(CLI::IsMember({"kw", "ka"}));
    burstCmd->add_option("--eps-lo", o.cfg.epsLo, "smallest detuning");
    burstCmd->add_option("--eps-hi", o.cfg.epsHi, "largest detuning");
    burstCmd->add_option("--steps", o.cfg.nSteps, "scan points");

    symCmd->callback([&] { o.cfg.command = "symmetry-check"; runner = [&] { return cmdSymmetryCheck(o.cfg); }; });
    eqCmd->callback([&] { o.cfg.command = "equilibria"; runner = [&] { return cmdEquilibria(o.cfg); }; });
    portraitCmd->callback([&] { o.cfg.command = "portrait"; runner = [&] { return cmdPortrait(o.cfg); }; });
    regionsCmd->callback([&] { o.cfg.command = "regions"; runner = [&] { return cmdRegions(o.cfg); }; });
    bifdiagCmd->callback([&] { o.cfg.command = "bifdiag"; runner = [&] { return cmdBifdiag(o.cfg); }; });
    connectCmd->callback([&] { o.cfg.command = "connect"; runner = [&] { return cmdConnect(o.cfg); }; });
    burstCmd->callback([&] { o.cfg.command = "burst-scan"; runner = [&] { return cmdBurstScan(o.cfg, o); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    o.active = app.get_subcommands().front();
    foldPairedFlags(o);

    try {
        return runner();
    } catch (const BadConfig& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    }
}
