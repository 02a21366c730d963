#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rotator/geometry.hpp"
#include "rotator/system.hpp"

namespace rotator {

enum class Termination { timeLimit, sinkCapture, sectionEvent, stepFailure };

struct StepFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrajectorySample {
    double t = 0.0;
    LiftedPoint state;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    double relTol = 0.0, absTol = 0.0;
    Termination reason = Termination::timeLimit;
};

/// Poincare section on the universal cover. Section functions are evaluated
/// through wrapPi, so steps are capped below pi in phase advance to keep
/// crossings unambiguous.
struct SectionSpec {
    enum class Kind { phaseCrossing, fixRCrossing, lineCrossing, anchoredLine };

    Kind kind = Kind::phaseCrossing;
    int oscillator = 0;   // phaseCrossing: which phase crosses
    double level = kPi;   // phaseCrossing: level in [0, 2*pi)
    int direction = +1;   // +1 upward, -1 downward, 0 both
    Vec2 normal{1.0, 1.0};// lineCrossing: crossing of normal . x = offset (mod 2*pi)
    double offset = 0.0;
    TorusPoint anchor;    // anchoredLine: normal . wrapPi(x - anchor) = offset

    static SectionSpec phase(int oscillator, double level, int direction) {
        SectionSpec s;
        s.kind = Kind::phaseCrossing;
        s.oscillator = oscillator;
        s.level = wrap2pi(level);
        s.direction = direction;
        return s;
    }
    static SectionSpec fixR() {
        SectionSpec s;
        s.kind = Kind::fixRCrossing;
        s.direction = 0;
        return s;
    }
    static SectionSpec line(Vec2 normal, double offset, int direction = 0) {
        SectionSpec s;
        s.kind = Kind::lineCrossing;
        s.normal = normal;
        s.offset = offset;
        s.direction = direction;
        return s;
    }
    /// Line through the neighborhood of an anchor point; the displacement is
    /// wrapped componentwise, so the section is local to the anchor and does
    /// not recur across the cover for non-axis normals.
    static SectionSpec anchoredLine(Vec2 normal, TorusPoint anchor, double offset,
                                    int direction = 0) {
        SectionSpec s;
        s.kind = Kind::anchoredLine;
        s.normal = normal;
        s.anchor = anchor;
        s.offset = offset;
        s.direction = direction;
        return s;
    }

    double value(const LiftedPoint& p) const {
        switch (kind) {
        case Kind::phaseCrossing:
            return wrapPi((oscillator == 0 ? p.x1 : p.x2) - level);
        case Kind::fixRCrossing:
            return wrapPi(p.x1 + p.x2);
        case Kind::lineCrossing:
            return wrapPi(normal.x * p.x1 + normal.y * p.x2 - offset);
        case Kind::anchoredLine:
            return normal.x * wrapPi(p.x1 - anchor.phi1) + normal.y * wrapPi(p.x2 - anchor.phi2) -
                   offset;
        }
        return 0.0;
    }

    double valueRate(const Vec2& f) const {
        switch (kind) {
        case Kind::phaseCrossing:
            return oscillator == 0 ? f.x : f.y;
        case Kind::fixRCrossing:
            return f.x + f.y;
        case Kind::lineCrossing:
        case Kind::anchoredLine:
            return normal.x * f.x + normal.y * f.y;
        }
        return 0.0;
    }
};

struct EventRecord {
    double t = 0.0;
    LiftedPoint state;
    int sectionIndex = 0;
};

struct IntegrateOptions {
    double relTol = 1e-10;
    double absTol = 1e-12;
    double hMax = 1.0;
    double hInit = 1e-3;
    int timeDirection = +1;          // -1 integrates the reversed field
    bool storeSamples = true;
    int storeStride = 1;             // keep every n-th accepted step
    std::vector<TorusPoint> sinks;   // sink-capture targets
    double sinkSpeedTol = 1e-9;
    double sinkDistTol = 1e-4;
    double eventValueTol = 1e-10;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // b - bhat (error weights), including the 7th (FSAL) stage
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

struct RhsField {
    const RotatorSystem* sys;
    double sign;
    Vec2 operator()(const LiftedPoint& p) const {
        Vec2 f = sys->rhs(p);
        return {sign * f.x, sign * f.y};
    }
};

/// One Dopri5 step of fixed size h from (y, k1 = f(y)). Returns the new state,
/// the error estimate and k7 = f(ynew) for FSAL reuse.
inline void dopriStep(const RhsField& f, const LiftedPoint& y, const Vec2& k1, double h,
                      LiftedPoint& ynew, Vec2& k7, double& errX, double& errY) {
    using T = Dopri5;
    auto at = [&](double c1, const Vec2& v1, double c2_, const Vec2& v2, double c3_ = 0,
                  const Vec2& v3 = {}, double c4_ = 0, const Vec2& v4 = {}, double c5_ = 0,
                  const Vec2& v5 = {}, double c6_ = 0, const Vec2& v6 = {}) {
        return LiftedPoint{y.x1 + h * (c1 * v1.x + c2_ * v2.x + c3_ * v3.x + c4_ * v4.x + c5_ * v5.x + c6_ * v6.x),
                           y.x2 + h * (c1 * v1.y + c2_ * v2.y + c3_ * v3.y + c4_ * v4.y + c5_ * v5.y + c6_ * v6.y)};
    };
    Vec2 k2 = f(at(T::a21, k1, 0, k1));
    Vec2 k3 = f(at(T::a31, k1, T::a32, k2));
    Vec2 k4 = f(at(T::a41, k1, T::a42, k2, T::a43, k3));
    Vec2 k5 = f(at(T::a51, k1, T::a52, k2, T::a53, k3, T::a54, k4));
    Vec2 k6 = f(at(T::a61, k1, T::a62, k2, T::a63, k3, T::a64, k4, T::a65, k5));
    ynew = at(T::b1, k1, 0, k2, T::b3, k3, T::b4, k4, T::b5, k5, T::b6, k6);
    k7 = f(ynew);
    errX = h * (T::e1 * k1.x + T::e3 * k3.x + T::e4 * k4.x + T::e5 * k5.x + T::e6 * k6.x + T::e7 * k7.x);
    errY = h * (T::e1 * k1.y + T::e3 * k3.y + T::e4 * k4.y + T::e5 * k5.y + T::e6 * k6.y + T::e7 * k7.y);
}

/// Integrate a fixed interval tau <= previously accepted step from y without
/// error control; used for event refinement inside an accepted step.
inline LiftedPoint substep(const RhsField& f, const LiftedPoint& y, const Vec2& k1, double tau) {
    LiftedPoint out;
    Vec2 k7;
    double ex, ey;
    dopriStep(f, y, k1, tau, out, k7, ex, ey);
    return out;
}

} // namespace detail

struct IntegrationResult {
    Trajectory trajectory;
    std::vector<EventRecord> events;
    double tEnd = 0.0;
    LiftedPoint stateEnd;
};

/// Called after every accepted step with the new (t, state).
/// Return false to stop the integration.
using StepObserver = std::function<bool(double, const LiftedPoint&)>;

/// Adaptive Dormand-Prince 5(4) on the universal cover. Steps are capped so
/// the phase advance stays below pi, which keeps lifts unambiguous and section
/// crossings detectable from endpoint signs.
inline IntegrationResult integrate(const RotatorSystem& sys, const LiftedPoint& start, double tMax,
                                   const IntegrateOptions& opts = {},
                                   const std::vector<SectionSpec>& sections = {},
                                   bool stopOnEvent = false,
                                   const StepObserver& observer = nullptr) {
    if (tMax <= 0.0) throw std::invalid_argument("integrate: tMax must be positive");
    if (opts.relTol <= 0.0 || opts.absTol <= 0.0)
        throw std::invalid_argument("integrate: tolerances must be positive");

    detail::RhsField f{&sys, static_cast<double>(opts.timeDirection)};
    IntegrationResult res;
    res.trajectory.relTol = opts.relTol;
    res.trajectory.absTol = opts.absTol;

    double t = 0.0;
    LiftedPoint y = start;
    Vec2 k1 = f(y);
    double h = std::min(opts.hInit, opts.hMax);

    std::vector<double> sectionVals(sections.size());
    for (std::size_t i = 0; i < sections.size(); ++i) sectionVals[i] = sections[i].value(y);

    if (opts.storeSamples) res.trajectory.samples.push_back({t, y});
    long accepted = 0;

    auto finish = [&](Termination why) {
        res.trajectory.reason = why;
        res.tEnd = t;
        res.stateEnd = y;
        if (opts.storeSamples &&
            (res.trajectory.samples.empty() || res.trajectory.samples.back().t != t))
            res.trajectory.samples.push_back({t, y});
        return res;
    };

    while (t < tMax) {
        // cap: phase advance below ~pi/2 per step
        double speed = std::fabs(k1.x) + std::fabs(k1.y);
        double hCap = (speed > 1e-12) ? 0.5 * kPi / speed : opts.hMax;
        h = std::min({h, hCap, opts.hMax, tMax - t});
        if (h < 1e-14) return finish(Termination::stepFailure);

        LiftedPoint ynew;
        Vec2 k7;
        double ex, ey;
        detail::dopriStep(f, y, k1, h, ynew, k7, ex, ey);

        double sc1 = opts.absTol + opts.relTol * std::max(std::fabs(y.x1), std::fabs(ynew.x1));
        double sc2 = opts.absTol + opts.relTol * std::max(std::fabs(y.x2), std::fabs(ynew.x2));
        double errNorm = std::sqrt(0.5 * ((ex / sc1) * (ex / sc1) + (ey / sc2) * (ey / sc2)));

        if (errNorm > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(errNorm, -0.2));
            continue;
        }

        const double t0 = t, t1 = t + h;
        bool stop = false;
        Termination stopWhy = Termination::timeLimit;

        // section crossings inside the accepted step
        for (std::size_t i = 0; i < sections.size(); ++i) {
            const double w0 = sectionVals[i];
            const double w1 = sections[i].value(ynew);
            sectionVals[i] = w1;
            // guard against wrapPi branch jumps
            if (std::fabs(w0) > 1.5 || std::fabs(w1) > 1.5) continue;
            // strict sign change; a departure from an exact zero is not a crossing
            bool crossing = (w0 < 0.0 && w1 >= 0.0) || (w0 > 0.0 && w1 <= 0.0);
            if (!crossing) continue;
            int dir = (w1 > w0) ? +1 : -1;
            if (sections[i].direction != 0 && dir != sections[i].direction) continue;

            // bisection + secant on tau within [0, h]
            double lo = 0.0, hi = h, glo = w0, ghi = w1;
            double tau = hi, g = ghi;
            LiftedPoint ev = ynew;
            for (int it = 0; it < 100 && std::fabs(g) > opts.eventValueTol; ++it) {
                double mid;
                if (ghi != glo) {
                    mid = lo - glo * (hi - lo) / (ghi - glo); // secant
                    if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
                } else {
                    mid = 0.5 * (lo + hi);
                }
                ev = detail::substep(f, y, k1, mid);
                g = sections[i].value(ev);
                tau = mid;
                if ((g < 0.0) == (glo < 0.0)) {
                    lo = mid;
                    glo = g;
                } else {
                    hi = mid;
                    ghi = g;
                }
                if (hi - lo < 1e-15 * std::max(1.0, h)) break;
            }
            res.events.push_back({t0 + tau, ev, static_cast<int>(i)});
            if (stopOnEvent) {
                stop = true;
                stopWhy = Termination::sectionEvent;
                t = t0 + tau;
                y = ev;
                break;
            }
        }

        if (!stop) {
            t = t1;
            y = ynew;
            k1 = k7; // FSAL
            ++accepted;
            if (opts.storeSamples && accepted % opts.storeStride == 0)
                res.trajectory.samples.push_back({t, y});

            // sink capture
            if (!opts.sinks.empty()) {
                Vec2 v = sys.rhs(y);
                if (v.norm() < opts.sinkSpeedTol) {
                    TorusPoint here = y.torus();
                    for (const auto& s : opts.sinks) {
                        if (torusDist(here, s) < opts.sinkDistTol) {
                            stop = true;
                            stopWhy = Termination::sinkCapture;
                            break;
                        }
                    }
                }
            }
            if (!stop && observer && !observer(t, y)) {
                stop = true;
                stopWhy = Termination::timeLimit;
            }
            h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(errNorm, 1e-10), -0.2)));
        }

        if (stop) return finish(stopWhy);
    }
    return finish(Termination::timeLimit);
}

struct ClosestReturn {
    double returnTime = 0.0;   // elapsed time after the anchor at the minimum
    double distance = 0.0;     // torus distance back to the anchor
};

/// Integrate past a transient, anchor, and report the closest recurrence to
/// the anchor within the window. The search arms once the orbit has left a
/// small ball around the anchor; if it never leaves (equilibrium), the
/// distance is the plain minimum (zero).
inline ClosestReturn closestReturn(const RotatorSystem& sys, const TorusPoint& start,
                                   double transient, double window,
                                   const IntegrateOptions& optsIn = {}) {
    if (window <= 0.0) throw std::invalid_argument("closestReturn: window must be positive");
    IntegrateOptions opts = optsIn;
    opts.storeSamples = false;
    opts.sinks.clear();

    LiftedPoint anchor(start);
    if (transient > 0.0) {
        auto pre = integrate(sys, LiftedPoint(start), transient, opts);
        if (pre.trajectory.reason == Termination::stepFailure)
            throw StepFailure("closestReturn: step underflow in transient");
        anchor = pre.stateEnd;
    }
    TorusPoint anchorT = anchor.torus();

    // The departure segment must not count as a "return": arm only once the
    // distance to the anchor has exceeded a small radius and started to fall
    // back from its running maximum.
    bool armed = false;
    double tArmed = 0.0;
    double runningMax = 0.0;
    double best = std::numeric_limits<double>::infinity();
    double bestT = 0.0;
    double restingBest = std::numeric_limits<double>::infinity();
    double restingT = 0.0;
    const double armRadius = 0.05;

    auto obs = [&](double t1, const LiftedPoint& y1) {
        double d = torusDist(y1.torus(), anchorT);
        if (!armed) {
            if (d < restingBest) {
                // never-departing orbits (equilibria) report this minimum
                restingBest = d;
                restingT = t1;
            }
            if (d > runningMax) runningMax = d;
            if (runningMax > armRadius && d < runningMax - 1e-3) {
                armed = true;
                tArmed = t1;
            } else {
                return true;
            }
        }
        if (d < best) { best = d; bestT = t1; }
        return true;
    };

    // observer only sees endpoints; refine around the best endpoint afterwards
    auto run = integrate(sys, anchor, window, opts, {}, false, obs);
    if (run.trajectory.reason == Termination::stepFailure)
        throw StepFailure("closestReturn: step underflow");
    if (!armed) return {restingT, restingBest};

    // local refinement: golden-section around bestT, never before the arming time
    double lo = std::max(tArmed, bestT - 0.5), hi = std::min(window, bestT + 0.5);
    auto distAt = [&](double tt) {
        auto r = integrate(sys, anchor, tt, opts);
        return torusDist(r.stateEnd.torus(), anchorT);
    };
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = distAt(x1), f2 = distAt(x2);
    for (int it = 0; it < 60 && (b - a) > 1e-10; ++it) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = distAt(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = distAt(x2);
        }
    }
    double tBest = 0.5 * (a + b);
    double dBest = distAt(tBest);
    if (dBest < best) { best = dBest; bestT = tBest; }
    return {bestT, best};
}

struct NoCrossing : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Next `count` directed crossings of the section starting from an anchor on
/// (or near) the section. Fails if the time budget runs out first.
inline std::vector<EventRecord> poincareReturn(const RotatorSystem& sys, const SectionSpec& section,
                                               const LiftedPoint& anchor, int count,
                                               double tBudget = 1e4,
                                               const IntegrateOptions& optsIn = {}) {
    IntegrateOptions opts = optsIn;
    opts.storeSamples = false;
    std::vector<EventRecord> out;
    LiftedPoint y = anchor;
    double tBase = 0.0;
    // nudge off the section so the departure is not double-counted
    while (static_cast<int>(out.size()) < count) {
        auto r = integrate(sys, y, tBudget - tBase, opts, {section}, true);
        if (r.trajectory.reason != Termination::sectionEvent)
            throw NoCrossing("poincareReturn: time budget exhausted before crossing");
        // immediate re-trigger at the anchor (refinement can stop a hair short
        // of the crossing, so the guard must cover eventValueTol / speed)
        if (r.tEnd < 1e-8) {
            auto nudge = integrate(sys, y, 1e-6, opts);
            y = nudge.stateEnd;
            tBase += 1e-6;
            continue;
        }
        out.push_back({tBase + r.tEnd, r.stateEnd, 0});
        tBase += r.tEnd;
        y = r.stateEnd;
        if (tBase >= tBudget)
            if (static_cast<int>(out.size()) < count)
                throw NoCrossing("poincareReturn: time budget exhausted");
        // step slightly past the section before rearming
        auto nudge = integrate(sys, y, 1e-6, opts);
        y = nudge.stateEnd;
        tBase += 1e-6;
    }
    return out;
}

} // namespace rotator
