#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotator/equilibria.hpp"
#include "rotator/integrate.hpp"
#include "rotator/system.hpp"

namespace rotator {

struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EscapedToSink : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoSpikes : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LimitCycle {
    LiftedPoint anchor;   // on the section
    double period = 0.0;
    int p = 0, q = 0;     // winding of the closed orbit
    double floquet = 1.0; // nontrivial multiplier of the return map
    bool stable = false;
    bool isolated = true; // false when the multiplier is indistinguishable from 1
    SectionSpec section;
    double residual = 0.0; // fixed-point closure of the section map
};

struct CycleSearchOptions {
    int maxReturns = 300;
    double closureTol = 1e-9;   // section-coordinate fixed-point residual
    double coarseTol = 1e-5;    // recurrence detection before refinement
    double fdStep = 1e-6;       // multiplier finite difference
    double returnBudget = 500.0;
    int maxMapPeriod = 40;      // largest crossing count per cycle considered
    double neutralTol = 1e-5;   // |floquet - 1| below this reports not-isolated
    std::optional<std::vector<TorusPoint>> sinks; // capture targets; computed when absent
    IntegrateOptions integrate{};
};

namespace detail {

/// One directed return of the section map from a point on the section.
/// Distinguishes sink capture from a missing crossing.
inline EventRecord sectionMapStep(const RotatorSystem& sys, const SectionSpec& section,
                                  const LiftedPoint& from, double tBudget,
                                  const IntegrateOptions& optsIn) {
    IntegrateOptions opts = optsIn;
    opts.storeSamples = false;
    LiftedPoint y = from;
    double tBase = 0.0;
    while (tBase < tBudget) {
        auto r = integrate(sys, y, tBudget - tBase, opts, {section}, true);
        if (r.trajectory.reason == Termination::sinkCapture)
            throw EscapedToSink("sectionMapStep: orbit captured by a sink");
        if (r.trajectory.reason != Termination::sectionEvent) break;
        if (r.tEnd < 1e-8) { // re-trigger at the departure point
            auto nudge = integrate(sys, y, 1e-6, opts);
            y = nudge.stateEnd;
            tBase += 1e-6;
            continue;
        }
        return {tBase + r.tEnd, r.stateEnd, 0};
    }
    throw NoConvergence("sectionMapStep: no section return within the time budget");
}

struct MapIterate {
    double u = 0.0;       // section coordinate of the image, wrapped
    double time = 0.0;    // return time
    double dx1 = 0.0, dx2 = 0.0; // lifted phase advance
};

} // namespace detail

/// Locate a limit cycle by iterating the 1-D section return map: recurrence
/// with any crossing count k up to maxMapPeriod is detected first, then the
/// fixed point of the k-th iterate is refined by secant steps. The section
/// coordinate is the other oscillator's phase at the crossing.
inline LimitCycle findLimitCycle(const RotatorSystem& sys, const TorusPoint& icGuess,
                                 const SectionSpec& section = SectionSpec::phase(0, kPi, +1),
                                 const CycleSearchOptions& optsIn = {}) {
    if (section.kind != SectionSpec::Kind::phaseCrossing || section.direction == 0)
        throw std::invalid_argument("findLimitCycle: a directed phase section is required");

    CycleSearchOptions opts = optsIn;
    if (!opts.sinks) {
        std::vector<TorusPoint> sinks;
        for (const auto& e : findEquilibria(sys))
            if (e.cls == EqClass::sink) sinks.push_back(e.position);
        opts.sinks = std::move(sinks);
    }
    IntegrateOptions iopts = opts.integrate;
    iopts.sinks = *opts.sinks;
    iopts.storeSamples = false;

    const int osc = section.oscillator;
    auto coordOf = [&](const LiftedPoint& s) { return wrap2pi(osc == 0 ? s.x2 : s.x1); };
    auto pointAt = [&](double u) {
        return osc == 0 ? LiftedPoint{section.level, u} : LiftedPoint{u, section.level};
    };

    // k-th iterate of the section map from coordinate u
    auto mapK = [&](double u, int k) {
        detail::MapIterate it;
        LiftedPoint y = pointAt(u);
        LiftedPoint start = y;
        for (int i = 0; i < k; ++i) {
            auto ev = detail::sectionMapStep(sys, section, y, opts.returnBudget, iopts);
            it.time += ev.t;
            y = ev.state;
        }
        it.u = coordOf(y);
        it.dx1 = y.x1 - start.x1;
        it.dx2 = y.x2 - start.x2;
        return it;
    };

    // reach the section
    LiftedPoint first;
    {
        auto r = integrate(sys, {icGuess.phi1, icGuess.phi2}, opts.returnBudget, iopts,
                           {section}, true);
        if (r.trajectory.reason == Termination::sinkCapture)
            throw EscapedToSink("findLimitCycle: guess captured by a sink");
        if (r.trajectory.reason != Termination::sectionEvent)
            throw NoConvergence("findLimitCycle: guess never reaches the section");
        first = r.stateEnd;
    }
    // iterate the 1-return map looking for recurrence
    std::vector<double> us{coordOf(first)};
    int k = 0;
    for (int n = 0; n < opts.maxReturns && k == 0; ++n) {
        us.push_back(mapK(us.back(), 1).u);
        int last = static_cast<int>(us.size()) - 1;
        for (int kk = 1; kk <= std::min(last, opts.maxMapPeriod); ++kk) {
            if (circleDist(us[last], us[last - kk]) < opts.coarseTol) {
                k = kk;
                break;
            }
        }
    }
    if (k == 0) throw NoConvergence("findLimitCycle: no recurrence within maxReturns");

    // secant refinement of the fixed point of the k-th iterate
    auto residualAt = [&](double u) { return wrapPi(mapK(u, k).u - u); };
    double u0 = us.back();
    double f0 = residualAt(u0);
    double u1 = u0 + (std::fabs(f0) > 1e-12 ? f0 : 1e-9);
    double f1 = residualAt(u1);
    for (int it = 0; it < 50 && std::fabs(f1) >= opts.closureTol; ++it) {
        if (f1 == f0) break;
        double next = u1 - f1 * (u1 - u0) / (f1 - f0);
        u0 = u1;
        f0 = f1;
        u1 = next;
        f1 = residualAt(u1);
    }
    if (std::fabs(f1) >= opts.closureTol)
        throw NoConvergence("findLimitCycle: secant refinement stalled");

    LimitCycle cyc;
    cyc.section = section;
    cyc.anchor = pointAt(wrap2pi(u1));
    cyc.residual = std::fabs(f1);

    auto closed = mapK(u1, k);
    cyc.period = closed.time;
    cyc.p = static_cast<int>(std::lround(closed.dx1 / kTwoPi));
    cyc.q = static_cast<int>(std::lround(closed.dx2 / kTwoPi));
    if (osc == 1) std::swap(cyc.p, cyc.q);

    double h = opts.fdStep;
    cyc.floquet = wrapPi(mapK(u1 + h, k).u - mapK(u1 - h, k).u) / (2.0 * h);
    cyc.stable = std::fabs(cyc.floquet) < 1.0;
    cyc.isolated = std::fabs(cyc.floquet - 1.0) >= opts.neutralTol;
    return cyc;
}

/// Independent multiplier estimate: for a planar cycle the product of the
/// multipliers is exp of the integrated divergence, and the trivial one is 1.
inline double floquetFromDivergence(const RotatorSystem& sys, const LimitCycle& cycle,
                                    const IntegrateOptions& optsIn = {}) {
    IntegrateOptions opts = optsIn;
    opts.storeSamples = true;
    opts.storeStride = 1;
    auto res = integrate(sys, cycle.anchor, cycle.period, opts);
    const auto& s = res.trajectory.samples;
    double acc = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        double d0 = sys.jacobian(s[i - 1].state).trace();
        double d1 = sys.jacobian(s[i].state).trace();
        acc += 0.5 * (d0 + d1) * (s[i].t - s[i - 1].t);
    }
    return std::exp(acc);
}

/// Spike gaps of one cycle period: times between consecutive upward crossings
/// of oscillator 1 through the level, including the wrap-around gap.
inline std::vector<double> interSpikeIntervals(const RotatorSystem& sys, const LimitCycle& cycle,
                                               double spikeLevel = kPi) {
    IntegrateOptions opts;
    opts.storeSamples = false;
    auto res = integrate(sys, cycle.anchor, cycle.period, opts,
                         {SectionSpec::phase(0, spikeLevel, +1)});
    if (res.events.empty()) throw NoSpikes("interSpikeIntervals: cycle never crosses the level");
    std::vector<double> gaps;
    const auto& ev = res.events;
    for (std::size_t i = 1; i < ev.size(); ++i) gaps.push_back(ev[i].t - ev[i - 1].t);
    gaps.push_back(ev.front().t + cycle.period - ev.back().t);
    return gaps;
}

inline double maxIsi(const RotatorSystem& sys, const LimitCycle& cycle, double spikeLevel = kPi) {
    double mx = 0.0;
    for (double g : interSpikeIntervals(sys, cycle, spikeLevel)) mx = std::max(mx, g);
    return mx;
}

struct ScanPoint {
    double eps = 0.0;
    double maxIsi = 0.0;
    int p = 0, q = 0;
    double period = 0.0;
    double floquet = 0.0;
    bool converged = false;
};

struct ScanOptions {
    double epsLo = 0.005, epsHi = 0.1;
    int nSteps = 100;
    bool continuation = true;   // warm-start each point from the previous cycle
    double omegaCenter = 1.1;   // omega_{1,2} = center -+ eps
    double a = 1.0;
    double kappa1 = 1.0, kappa2 = -1.0;
    double alpha = 0.0;
    double spikeLevel = kPi;
    CycleSearchOptions cycle{};
};

/// Detuning sweep from epsHi down toward the reversible limit at eps = 0.
/// Failed points are recorded unconverged and the previous seed is kept.
inline std::vector<ScanPoint> scanEpsilon(const ScanOptions& opts) {
    if (opts.nSteps < 2) throw std::invalid_argument("scanEpsilon: nSteps must be >= 2");
    if (opts.epsLo <= 0.0 || opts.epsHi <= opts.epsLo)
        throw std::invalid_argument("scanEpsilon: range must satisfy 0 < epsLo < epsHi");

    std::vector<ScanPoint> out;
    out.reserve(opts.nSteps);
    TorusPoint seed{0.5, 0.5};
    for (int i = 0; i < opts.nSteps; ++i) {
        double eps = opts.epsHi + (opts.epsLo - opts.epsHi) * i / (opts.nSteps - 1);
        auto sys = presets::sinusoidal({opts.omegaCenter - eps, opts.omegaCenter + eps, opts.a,
                                        opts.a, opts.kappa1, opts.kappa2, opts.alpha});
        ScanPoint pt;
        pt.eps = eps;
        try {
            auto cyc = findLimitCycle(sys, seed, SectionSpec::phase(0, kPi, +1), opts.cycle);
            pt.maxIsi = maxIsi(sys, cyc, opts.spikeLevel);
            pt.p = cyc.p;
            pt.q = cyc.q;
            pt.period = cyc.period;
            pt.floquet = cyc.floquet;
            pt.converged = true;
            if (opts.continuation)
                seed = {wrap2pi(cyc.anchor.x1), wrap2pi(cyc.anchor.x2)};
        } catch (const NoConvergence&) {
        } catch (const EscapedToSink&) {
        } catch (const NoSpikes&) {
        }
        out.push_back(pt);
    }
    return out;
}

} // namespace rotator
