#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotator/equilibria.hpp"
#include "rotator/regions.hpp"
#include "rotator/system.hpp"

namespace rotator {

struct SeedNotBracketing : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ModelCase { antiReciprocal, reciprocal };

enum class CurveKind {
    saddleCenterI,
    saddleCenterII,
    pitchforkI,
    sinkSourceII,
    heteroclinicSS,
    secondReversalLine,
    rotationalSymLine
};

inline const char* curveKindName(CurveKind k) {
    switch (k) {
    case CurveKind::saddleCenterI: return "saddle-center-I";
    case CurveKind::saddleCenterII: return "saddle-center-II";
    case CurveKind::pitchforkI: return "pitchfork-I";
    case CurveKind::sinkSourceII: return "sink-source-II";
    case CurveKind::heteroclinicSS: return "heteroclinic-ss";
    case CurveKind::secondReversalLine: return "second-reversal-line";
    case CurveKind::rotationalSymLine: return "rotational-sym-line";
    }
    return "?";
}

/// Parameter planes: abscissa is kappa in both; the ordinate is omega at
/// fixed a = 1, or a at fixed omega = 1.
enum class ParamPlane { kappaOmega, kappaA };

inline const char* planeName(ParamPlane p) {
    return p == ParamPlane::kappaOmega ? "kappa-omega" : "kappa-a";
}

struct BifCurve {
    CurveKind kind;
    ParamPlane plane;
    std::vector<std::array<double, 2>> points;
};

/// (kappa, omega) -> (kappa/omega, 1/omega), the map between the two planes.
inline std::array<double, 2> transformPlane(const std::array<double, 2>& pt) {
    if (pt[1] == 0.0)
        throw std::invalid_argument("transformPlane: the omega = 0 line maps to infinity");
    return {pt[0] / pt[1], 1.0 / pt[1]};
}

namespace detail {

/// Samples a partially defined graph absc -> ord over [lo, hi], emitting one
/// polyline per maximal defined run. `specials` adds exact domain-boundary
/// abscissae to the uniform grid.
inline void sampleGraph(CurveKind kind, ParamPlane plane, double lo, double hi, int resolution,
                        const std::vector<double>& specials,
                        const std::function<std::optional<double>(double)>& f,
                        std::vector<BifCurve>& out) {
    std::vector<double> grid;
    grid.reserve(resolution + specials.size());
    for (int i = 0; i < resolution; ++i)
        grid.push_back(lo + (hi - lo) * i / (resolution - 1));
    for (double s : specials)
        if (s >= lo && s <= hi) grid.push_back(s);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    BifCurve cur{kind, plane, {}};
    auto flush = [&] {
        if (cur.points.size() >= 2) out.push_back(cur);
        cur.points.clear();
    };
    for (double x : grid) {
        auto y = f(x);
        if (y)
            cur.points.push_back({x, *y});
        else
            flush();
    }
    flush();
}

/// Ordinates of the anti-reciprocal saddle-center locus split into its four
/// branches: 0/1 outer positive/negative (all kappa != 0), 2/3 inner
/// positive/negative (|kappa| >= 1/2).
inline std::optional<double> saddleCenterIBranch(double kappa, int branch) {
    auto res = analyticLocus(LocusId::caseISaddleCenter, kappa);
    if (res.values.empty()) return std::nullopt;
    const bool inner = branch >= 2;
    if (inner && res.values.size() < 4) return std::nullopt;
    switch (branch) {
    case 0: return res.values.back();
    case 1: return res.values.front();
    case 2: return res.values[2];
    default: return res.values[1];
    }
}

} // namespace detail

/// All closed-form bifurcation curves of the requested case inside the
/// abscissa window [lo, hi], sampled at `resolution` points per branch.
/// Symmetry lines (the omega = 0 second reversal, the a = 0 rotational
/// symmetry segments) are included where they live in the requested plane.
inline std::vector<BifCurve> traceAnalyticCurves(ModelCase mc, ParamPlane plane, double lo,
                                                 double hi, int resolution = 241) {
    if (resolution < 2) throw std::invalid_argument("traceAnalyticCurves: resolution must be >= 2");
    if (!(lo < hi)) throw std::invalid_argument("traceAnalyticCurves: empty abscissa window");
    std::vector<BifCurve> out;
    const ParamPlane pl = plane;

    auto line = [&](CurveKind kind, double ord) {
        detail::sampleGraph(kind, pl, lo, hi, resolution, {},
                            [&](double) -> std::optional<double> { return ord; }, out);
    };

    if (mc == ModelCase::antiReciprocal) {
        if (plane == ParamPlane::kappaOmega) {
            for (int branch = 0; branch < 4; ++branch) {
                detail::sampleGraph(
                    CurveKind::saddleCenterI, pl, lo, hi, resolution, {-0.5, 0.0, 0.5},
                    [&](double k) { return detail::saddleCenterIBranch(k, branch); }, out);
            }
            line(CurveKind::pitchforkI, 1.0);
            line(CurveKind::pitchforkI, -1.0);
            line(CurveKind::secondReversalLine, 0.0);
        } else {
            // parametric trace over the fold angle: h = h' = 0 with omega = 1
            // is linear in (a, kappa) for each phi
            BifCurve cur{CurveKind::saddleCenterI, pl, {}};
            auto flush = [&] {
                if (cur.points.size() >= 2) out.push_back(cur);
                cur.points.clear();
            };
            const int n = std::max(resolution, 721);
            for (int i = 0; i <= n; ++i) {
                double phi = kTwoPi * i / n;
                double det = -2.0 * std::cos(phi) * std::cos(2.0 * phi) -
                             std::sin(phi) * std::sin(2.0 * phi);
                if (std::fabs(det) < 1e-8) {
                    flush();
                    continue;
                }
                double a = 2.0 * std::cos(2.0 * phi) / det;
                double kappa = -std::sin(phi) / det;
                if (kappa < lo || kappa > hi || std::fabs(a) > 1e3) {
                    flush();
                    continue;
                }
                cur.points.push_back({kappa, a});
            }
            flush();
            line(CurveKind::pitchforkI, 1.0);
            line(CurveKind::pitchforkI, -1.0);
            for (int sign : {-1, 1}) {
                detail::sampleGraph(CurveKind::rotationalSymLine, pl, lo, hi, resolution,
                                    {-1.0, 1.0},
                                    [&](double k) -> std::optional<double> {
                                        if (sign * k < 1.0) return std::nullopt;
                                        return 0.0;
                                    },
                                    out);
            }
        }
    } else {
        if (plane == ParamPlane::kappaOmega) {
            detail::sampleGraph(CurveKind::saddleCenterII, pl, lo, hi, resolution, {-0.25, 0.25},
                                [&](double k) -> std::optional<double> {
                                    auto res = analyticLocus(LocusId::caseIISaddleCenter, k);
                                    if (res.values.empty()) return std::nullopt;
                                    return res.values[0];
                                },
                                out);
            detail::sampleGraph(CurveKind::sinkSourceII, pl, lo, hi, resolution, {},
                                [&](double k) -> std::optional<double> { return k - 1.0; }, out);
            detail::sampleGraph(CurveKind::sinkSourceII, pl, lo, hi, resolution, {},
                                [&](double k) -> std::optional<double> { return k + 1.0; }, out);
        } else {
            // omega = 1 = -a^2/(8 kappa) - kappa, real and a genuine circle
            // fold (|kappa| > |a|/4) only for kappa in (-1, -1/3)
            for (int sign : {-1, 1}) {
                detail::sampleGraph(CurveKind::saddleCenterII, pl, lo, hi, resolution,
                                    {-1.0, -1.0 / 3.0},
                                    [&](double k) -> std::optional<double> {
                                        if (k <= -1.0 || k >= -1.0 / 3.0) return std::nullopt;
                                        return sign * std::sqrt(-8.0 * k * (1.0 + k));
                                    },
                                    out);
            }
            detail::sampleGraph(CurveKind::sinkSourceII, pl, lo, hi, resolution, {},
                                [&](double k) -> std::optional<double> { return k - 1.0; }, out);
            detail::sampleGraph(CurveKind::sinkSourceII, pl, lo, hi, resolution, {},
                                [&](double k) -> std::optional<double> { return 1.0 - k; }, out);
        }
    }
    return out;
}

/// Signed splitting of the saddle-saddle connection between the two outermost
/// saddles of the anti-reciprocal system at (omega, a = 1, kappa). The swap
/// conjugacy between kappa and -kappa flips the relevant eigenbranch.
inline double caseIConnectionMiss(double kappa, double omega) {
    auto sys = presets::caseI(omega, 1.0, kappa);
    auto eqs = findEquilibria(sys);
    const Equilibrium *from = nullptr, *to = nullptr;
    for (const auto& e : eqs) {
        if (e.cls != EqClass::saddle) continue;
        if (!from || e.position.phi1 > from->position.phi1) from = &e;
        if (!to || e.position.phi1 < to->position.phi1) to = &e;
    }
    if (!from || !to || from == to)
        throw NoApproach("caseIConnectionMiss: saddle pair unavailable");
    // generous horizon: the excursion before the approach lengthens with kappa
    return connectionMiss(sys, *from, *to,
                          kappa > 0.0 ? BranchId::unstablePlus : BranchId::unstableMinus, 2000.0);
}

struct ConnectionTraceOptions {
    double step = 1e-2;             // abscissa step of the sweep
    double bracketHalfWidth = 0.025; // ordinate re-bracket radius around the previous root
    double paramTol = 1e-9;         // bisection tolerance per point
    int maxPoints = 400;
    double abscLo = -1e9, abscHi = 1e9; // sweep window
};

/// Continuation of a shooting-zero curve: fixed abscissa steps, with the
/// ordinate re-bracketed around the previous root and bisected. Stops at the
/// sweep window, at maxPoints, or when the bracket collapses (sign change
/// lost or the shooting target disappears, the codim-2 endpoint signal).
inline BifCurve traceConnectionCurve(const std::function<double(double, double)>& miss,
                                     ParamPlane plane, double seedAbsc, double ordLo, double ordHi,
                                     const ConnectionTraceOptions& opt = {}) {
    // scan-based bracketing: individual shooting failures inside the window
    // (NoApproach at an endpoint) must not end the sweep, so sign changes are
    // located on a short ordinate grid before bisecting
    auto solveAt = [&](double absc, double center,
                       double halfWidth) -> std::optional<ConnectionRoot> {
        auto g = [&](double ord) { return miss(absc, ord); };
        for (int attempt = 0; attempt < 3; ++attempt) {
            const int m = 8;
            double prevOrd = 0.0, prevVal = 0.0;
            bool havePrev = false;
            for (int i = 0; i <= m; ++i) {
                double ord = center - halfWidth + 2.0 * halfWidth * i / m;
                double val;
                try {
                    val = g(ord);
                } catch (const NoApproach&) {
                    havePrev = false;
                    continue;
                }
                if (havePrev && (prevVal < 0.0) != (val < 0.0)) {
                    try {
                        auto root = findConnection(g, prevOrd, ord, opt.paramTol);
                        if (root.degenerateFamily) return std::nullopt;
                        return root;
                    } catch (const NoApproach&) {
                        // refinement wandered into the fringe; keep scanning
                    }
                }
                prevOrd = ord;
                prevVal = val;
                havePrev = true;
            }
            halfWidth *= 2.0;
        }
        return std::nullopt;
    };

    auto seed = solveAt(seedAbsc, 0.5 * (ordLo + ordHi), 0.5 * (ordHi - ordLo));
    if (!seed) throw SeedNotBracketing("traceConnectionCurve: seed interval brackets no root");

    std::vector<std::array<double, 2>> pts{{seedAbsc, seed->param}};
    for (int dir : {+1, -1}) {
        double prevOrd = seed->param;
        double slope = 0.0; // secant prediction keeps the bracket on the curve
        for (int i = 1; static_cast<int>(pts.size()) < opt.maxPoints; ++i) {
            double absc = seedAbsc + dir * i * opt.step;
            if (absc < opt.abscLo || absc > opt.abscHi) break;
            auto root = solveAt(absc, prevOrd + slope * dir * opt.step, opt.bracketHalfWidth);
            if (!root) break;
            slope = (root->param - prevOrd) / (dir * opt.step);
            pts.push_back({absc, root->param});
            prevOrd = root->param;
        }
    }
    std::sort(pts.begin(), pts.end(),
              [](const auto& a, const auto& b) { return a[0] < b[0]; });
    return {CurveKind::heteroclinicSS, plane, std::move(pts)};
}

} // namespace rotator
