#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rotator/equilibria.hpp"
#include "rotator/integrate.hpp"

namespace rotator {

struct NotClosed : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AmbiguousWinding : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoApproach : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoSignChange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Worker count for grid classification; capped by ROTATORLAB_THREADS.
inline int threadCount() {
    if (const char* env = std::getenv("ROTATORLAB_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// ---------------------------------------------------------------------------
// Winding numbers
// ---------------------------------------------------------------------------

/// Integer round-trip counts of a closed path from its lift. The path must
/// close on the torus (endpoint distance < closureTol) and the lift increments
/// must sit within 0.01 revolutions of integers.
inline std::pair<int, int> windingNumbers(const Trajectory& path, double closureTol = 1e-4) {
    if (path.samples.size() < 2) throw NotClosed("windingNumbers: path has fewer than 2 samples");
    const LiftedPoint& a = path.samples.front().state;
    const LiftedPoint& b = path.samples.back().state;
    if (torusDist(a.torus(), b.torus()) >= closureTol)
        throw NotClosed("windingNumbers: path does not close on the torus");
    double dp = (b.x1 - a.x1) / kTwoPi;
    double dq = (b.x2 - a.x2) / kTwoPi;
    int p = static_cast<int>(std::lround(dp));
    int q = static_cast<int>(std::lround(dq));
    if (std::fabs(dp - p) >= 0.01 || std::fabs(dq - q) >= 0.01)
        throw AmbiguousWinding("windingNumbers: lift increment too far from an integer");
    return {p, q};
}

/// Signed area of the lifted loop (shoelace); positive = counter-clockwise.
inline double shoelaceArea(const Trajectory& path) {
    double area = 0.0;
    for (std::size_t i = 1; i < path.samples.size(); ++i) {
        const LiftedPoint& u = path.samples[i - 1].state;
        const LiftedPoint& v = path.samples[i].state;
        area += u.x1 * v.x2 - v.x1 * u.x2;
    }
    return 0.5 * area;
}

// ---------------------------------------------------------------------------
// Separatrices
// ---------------------------------------------------------------------------

enum class BranchId { unstablePlus, unstableMinus, stablePlus, stableMinus };

inline const char* branchName(BranchId b) {
    switch (b) {
    case BranchId::unstablePlus: return "unstable+";
    case BranchId::unstableMinus: return "unstable-";
    case BranchId::stablePlus: return "stable+";
    case BranchId::stableMinus: return "stable-";
    }
    return "?";
}

enum class SeparatrixEnd { reachesEquilibrium, closesHomoclinic, crossesFixR, timeLimit };

struct Separatrix {
    Equilibrium saddle;
    BranchId branch = BranchId::unstablePlus;
    Trajectory path;
    SeparatrixEnd termination = SeparatrixEnd::timeLimit;
    int equilibriumIndex = -1; // valid for reachesEquilibrium
    LiftedPoint endState;
};

/// Unit eigenvector of a 2x2 matrix for a real eigenvalue, sign-fixed so the
/// first nonzero component is positive.
inline Vec2 eigenvector(const Mat2& J, double lambda) {
    Vec2 v{J.b, lambda - J.a};
    if (v.norm() < 1e-12) v = {lambda - J.d, J.c};
    if (v.norm() < 1e-12) v = {1.0, 0.0};
    double n = v.norm();
    v = {v.x / n, v.y / n};
    if (v.x < -1e-14 || (std::fabs(v.x) <= 1e-14 && v.y < 0.0)) v = {-v.x, -v.y};
    return v;
}

/// One saddle branch seeded at saddle + 1e-6 * (unit eigenvector), stable
/// branches via time-reversed integration. Stops on arrival within 1e-5 of an
/// equilibrium, on sink capture, or on a Fix R crossing away from the saddle
/// (which closes an R-symmetric homoclinic when the saddle sits in Fix R).
inline Separatrix traceSeparatrix(const RotatorSystem& sys, const Equilibrium& saddle,
                                  BranchId branch, const std::vector<Equilibrium>& equilibria,
                                  double tMax = 200.0, const IntegrateOptions& optsIn = {}) {
    if (saddle.cls != EqClass::saddle)
        throw std::invalid_argument("traceSeparatrix: equilibrium is not a saddle");

    Separatrix sep;
    sep.saddle = saddle;
    sep.branch = branch;

    const bool unstable = branch == BranchId::unstablePlus || branch == BranchId::unstableMinus;
    const bool plus = branch == BranchId::unstablePlus || branch == BranchId::stablePlus;
    const double lambda = unstable ? saddle.ev2.real() : saddle.ev1.real();
    Vec2 v = eigenvector(saddle.jacobian, lambda);
    const double eps = 1e-6;
    LiftedPoint start{saddle.position.phi1 + (plus ? eps : -eps) * v.x,
                      saddle.position.phi2 + (plus ? eps : -eps) * v.y};

    IntegrateOptions opts = optsIn;
    opts.timeDirection = unstable ? +1 : -1;
    opts.storeSamples = true;
    opts.sinks.clear();
    for (const auto& e : equilibria)
        if ((unstable && e.cls == EqClass::sink) || (!unstable && e.cls == EqClass::source))
            opts.sinks.push_back(e.position);

    const bool homoclinicEligible = sys.isReversible() && saddle.memberships.inFixR;
    bool departed = false;
    double wPrev = wrapPi(start.x1 + start.x2);
    SeparatrixEnd why = SeparatrixEnd::timeLimit;
    int eqIndex = -1;
    LiftedPoint endState = start;
    double tPrev = 0.0;
    LiftedPoint yPrev = start;

    auto obs = [&](double t, const LiftedPoint& y) {
        TorusPoint here = y.torus();
        if (!departed && torusDist(here, saddle.position) > 0.05) departed = true;

        double w = wrapPi(y.x1 + y.x2);
        if (departed && std::fabs(w) < 1.5 && std::fabs(wPrev) < 1.5 &&
            ((wPrev < 0.0 && w >= 0.0) || (wPrev > 0.0 && w <= 0.0))) {
            why = homoclinicEligible ? SeparatrixEnd::closesHomoclinic : SeparatrixEnd::crossesFixR;
            // refine the crossing from the step start
            IntegrateOptions ropts = optsIn;
            ropts.timeDirection = unstable ? +1 : -1;
            ropts.storeSamples = false;
            ropts.sinks.clear();
            auto refined =
                integrate(sys, yPrev, 2.0 * (t - tPrev) + 1e-12, ropts, {SectionSpec::fixR()}, true);
            endState = refined.trajectory.reason == Termination::sectionEvent ? refined.stateEnd : y;
            return false;
        }
        wPrev = w;
        tPrev = t;
        yPrev = y;

        for (std::size_t i = 0; i < equilibria.size(); ++i) {
            if (!departed && torusDist(equilibria[i].position, saddle.position) < 1e-8) continue;
            if (torusDist(here, equilibria[i].position) < 1e-5) {
                why = SeparatrixEnd::reachesEquilibrium;
                eqIndex = static_cast<int>(i);
                endState = y;
                return false;
            }
        }
        return true;
    };

    auto res = integrate(sys, start, tMax, opts, {}, false, obs);
    if (res.trajectory.reason == Termination::sinkCapture) {
        why = SeparatrixEnd::reachesEquilibrium;
        endState = res.stateEnd;
        TorusPoint here = endState.torus();
        double best = 1e9;
        for (std::size_t i = 0; i < equilibria.size(); ++i) {
            double d = torusDist(here, equilibria[i].position);
            if (d < best) { best = d; eqIndex = static_cast<int>(i); }
        }
    } else if (why == SeparatrixEnd::timeLimit) {
        endState = res.stateEnd;
    }

    sep.path = std::move(res.trajectory);
    sep.termination = why;
    sep.equilibriumIndex = eqIndex;
    sep.endState = endState;
    return sep;
}

/// All four branches of one saddle.
inline std::array<Separatrix, 4> computeSeparatrices(const RotatorSystem& sys,
                                                     const Equilibrium& saddle,
                                                     const std::vector<Equilibrium>& equilibria,
                                                     double tMax = 200.0,
                                                     const IntegrateOptions& opts = {}) {
    return {traceSeparatrix(sys, saddle, BranchId::unstablePlus, equilibria, tMax, opts),
            traceSeparatrix(sys, saddle, BranchId::unstableMinus, equilibria, tMax, opts),
            traceSeparatrix(sys, saddle, BranchId::stablePlus, equilibria, tMax, opts),
            traceSeparatrix(sys, saddle, BranchId::stableMinus, equilibria, tMax, opts)};
}

// ---------------------------------------------------------------------------
// Cell classification and region maps
// ---------------------------------------------------------------------------

enum class RegionKind { dissipative, rotation, libration, undetermined };

enum class Orientation { cw, ccw };

struct RegionLabel {
    RegionKind kind = RegionKind::undetermined;
    int sinkIndex = -1; // dissipative: index into the equilibria list
    int p = 0, q = 0;   // rotation winding
    Orientation orientation = Orientation::ccw; // libration loop orientation
    double closureDist = std::numeric_limits<double>::infinity();
};

inline const char* regionKindName(RegionKind k) {
    switch (k) {
    case RegionKind::dissipative: return "dissipative";
    case RegionKind::rotation: return "rotation";
    case RegionKind::libration: return "libration";
    case RegionKind::undetermined: return "undetermined";
    }
    return "?";
}

/// Conservative-label equality; dissipative cells also match on their sink.
inline bool sameLabel(const RegionLabel& a, const RegionLabel& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case RegionKind::dissipative: return a.sinkIndex == b.sinkIndex;
    case RegionKind::rotation: return a.p == b.p && a.q == b.q;
    case RegionKind::libration: return a.orientation == b.orientation;
    case RegionKind::undetermined: return true;
    }
    return false;
}

struct ClassifyOptions {
    double tMax = 500.0;        // classification budget per cell
    double closureTol = 1e-4;   // torus-distance closure criterion
    IntegrateOptions integrate{.relTol = 1e-9, .absTol = 1e-11};
    std::vector<Equilibrium> equilibria; // precomputed census
};

namespace detail {

/// Closed-loop labeling given a point on the loop and its period.
inline RegionLabel labelClosedLoop(const RotatorSystem& sys, const LiftedPoint& loopStart,
                                   double period, const ClassifyOptions& cfg) {
    RegionLabel lab;
    IntegrateOptions opts = cfg.integrate;
    opts.storeSamples = true;
    opts.sinks.clear();
    auto loop = integrate(sys, loopStart, period, opts);
    lab.closureDist = torusDist(loop.stateEnd.torus(), loopStart.torus());
    if (lab.closureDist >= cfg.closureTol) return lab; // stays undetermined
    try {
        auto [p, q] = windingNumbers(loop.trajectory, cfg.closureTol);
        if (p == 0 && q == 0) {
            lab.kind = RegionKind::libration;
            lab.orientation = shoelaceArea(loop.trajectory) > 0.0 ? Orientation::ccw
                                                                  : Orientation::cw;
        } else {
            lab.kind = RegionKind::rotation;
            lab.p = p;
            lab.q = q;
        }
    } catch (const AmbiguousWinding&) {
        lab.kind = RegionKind::undetermined;
    }
    return lab;
}

} // namespace detail

/// Label the orbit through one initial condition. Sink capture wins; closed
/// orbits are detected by the two-Fix-R-crossing criterion in reversible
/// systems (two distinct crossings close an R-symmetric orbit of period twice
/// the crossing gap) with a closest-return fallback; everything else is
/// undetermined after the budget.
inline RegionLabel classifyCell(const RotatorSystem& sys, const TorusPoint& ic,
                                const ClassifyOptions& cfg) {
    IntegrateOptions opts = cfg.integrate;
    opts.storeSamples = false;
    opts.sinks.clear();
    std::vector<int> sinkOf;
    for (std::size_t i = 0; i < cfg.equilibria.size(); ++i) {
        if (cfg.equilibria[i].cls == EqClass::sink) {
            opts.sinks.push_back(cfg.equilibria[i].position);
            sinkOf.push_back(static_cast<int>(i));
        }
    }

    auto dissipative = [&](const LiftedPoint& end) {
        RegionLabel lab;
        lab.kind = RegionKind::dissipative;
        TorusPoint here = end.torus();
        double best = 1e9;
        for (std::size_t k = 0; k < opts.sinks.size(); ++k) {
            double d = torusDist(here, opts.sinks[k]);
            if (d < best) { best = d; lab.sinkIndex = sinkOf[k]; }
        }
        lab.closureDist = 0.0;
        return lab;
    };

    // leg 1: run until sink capture, a Fix R crossing (reversible only), or a
    // plain return to the initial condition, whichever comes first
    const bool reversible = sys.isReversible();
    std::vector<SectionSpec> sections;
    if (reversible) sections.push_back(SectionSpec::fixR());

    bool returned = false;
    double returnTime = 0.0;
    TorusPoint anchor = ic;
    bool armed = false;
    double runningMax = 0.0;
    auto returnTracker = [&](double t, const LiftedPoint& y) {
        double d = torusDist(y.torus(), anchor);
        if (!armed) {
            if (d > runningMax) runningMax = d;
            if (runningMax > 0.05 && d < runningMax - 1e-3) armed = true;
            return true;
        }
        if (d < cfg.closureTol) {
            returned = true;
            returnTime = t;
            return false;
        }
        return true;
    };

    auto leg1 = integrate(sys, LiftedPoint(ic), cfg.tMax, opts, sections, true, returnTracker);
    if (leg1.trajectory.reason == Termination::sinkCapture) return dissipative(leg1.stateEnd);
    if (returned) return detail::labelClosedLoop(sys, LiftedPoint(ic), returnTime, cfg);

    if (leg1.trajectory.reason == Termination::sectionEvent) {
        // leg 2: next Fix R crossing fixes the period of the symmetric orbit
        double t1 = leg1.tEnd;
        LiftedPoint s1 = leg1.stateEnd;
        auto nudge = integrate(sys, s1, 1e-6, opts);
        auto leg2 = integrate(sys, nudge.stateEnd, cfg.tMax - t1, opts, sections, true);
        if (leg2.trajectory.reason == Termination::sinkCapture) return dissipative(leg2.stateEnd);
        if (leg2.trajectory.reason == Termination::sectionEvent) {
            double gap = 1e-6 + leg2.tEnd;
            auto lab = detail::labelClosedLoop(sys, s1, 2.0 * gap, cfg);
            if (lab.kind != RegionKind::undetermined) return lab;
        }
    }

    // fallback: closest recurrence within the budget
    auto cr = closestReturn(sys, ic, 0.0, cfg.tMax, opts);
    if (cr.distance < cfg.closureTol)
        return detail::labelClosedLoop(sys, LiftedPoint(ic), cr.returnTime, cfg);
    RegionLabel lab;
    lab.closureDist = cr.distance;
    return lab;
}

struct RegionMap {
    int n = 0; // n x n cells, centers at ((i+0.5), (j+0.5)) * 2*pi/n
    std::string systemLabel;
    std::vector<RegionLabel> cells; // row-major: index = i * n + j

    const RegionLabel& cell(int i, int j) const { return cells[static_cast<std::size_t>(i) * n + j]; }
    TorusPoint cellCenter(int i, int j) const {
        return {(i + 0.5) * kTwoPi / n, (j + 0.5) * kTwoPi / n};
    }
};

/// Classify every cell of a uniform grid; cells are independent, so the map is
/// deterministic under any worker count.
inline RegionMap regionMap(const RotatorSystem& sys, int gridN, ClassifyOptions cfg = {}) {
    if (gridN < 16) throw std::invalid_argument("regionMap: gridN must be >= 16");
    if (cfg.equilibria.empty()) cfg.equilibria = findEquilibria(sys);

    RegionMap map;
    map.n = gridN;
    map.systemLabel = sys.label;
    map.cells.resize(static_cast<std::size_t>(gridN) * gridN);

    const int total = gridN * gridN;
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int idx = next.fetch_add(1);
            if (idx >= total) return;
            int i = idx / gridN, j = idx % gridN;
            map.cells[idx] = classifyCell(sys, map.cellCenter(i, j), cfg);
        }
    };
    int nt = std::min(threadCount(), total);
    if (nt <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (int k = 0; k < nt; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return map;
}

/// Connected components (4-neighbor, wrapping across the torus edges) among
/// cells matching the predicate; neighbors must also carry equal labels.
inline int countRegions(const RegionMap& map,
                        const std::function<bool(const RegionLabel&)>& pred) {
    const int n = map.n;
    std::vector<char> seen(map.cells.size(), 0);
    int regions = 0;
    std::vector<int> stack;
    for (int start = 0; start < n * n; ++start) {
        if (seen[start] || !pred(map.cells[start])) continue;
        ++regions;
        stack.push_back(start);
        seen[start] = 1;
        while (!stack.empty()) {
            int idx = stack.back();
            stack.pop_back();
            int i = idx / n, j = idx % n;
            const int di[4] = {1, -1, 0, 0};
            const int dj[4] = {0, 0, 1, -1};
            for (int k = 0; k < 4; ++k) {
                int ni = (i + di[k] + n) % n, nj = (j + dj[k] + n) % n;
                int nidx = ni * n + nj;
                if (seen[nidx] || !pred(map.cells[nidx])) continue;
                if (!sameLabel(map.cells[idx], map.cells[nidx])) continue;
                seen[nidx] = 1;
                stack.push_back(nidx);
            }
        }
    }
    return regions;
}

// ---------------------------------------------------------------------------
// Connection shooting
// ---------------------------------------------------------------------------

/// Shoot one unstable branch toward a target saddle and measure the signed
/// splitting between the branch and the target's stable manifold on a section
/// through the closest-approach phase. The raw perpendicular distance at
/// closest approach degrades as the square root of the parameter offset (the
/// passage past the saddle is hyperbolic), so the manifold offset is measured
/// instead: it is linear in parameters and changes sign across a connection.
inline double connectionMiss(const RotatorSystem& sys, const Equilibrium& fromSaddle,
                             const Equilibrium& target, BranchId branch, double tMax = 200.0,
                             const IntegrateOptions& optsIn = {}) {
    if (fromSaddle.cls != EqClass::saddle || target.cls != EqClass::saddle)
        throw std::invalid_argument("connectionMiss: endpoints must be saddles");
    if (branch != BranchId::unstablePlus && branch != BranchId::unstableMinus)
        throw std::invalid_argument("connectionMiss: branch must be unstable");

    const bool plus = branch == BranchId::unstablePlus;
    Vec2 v = eigenvector(fromSaddle.jacobian, fromSaddle.ev2.real());
    const double eps = 1e-6;
    LiftedPoint start{fromSaddle.position.phi1 + (plus ? eps : -eps) * v.x,
                      fromSaddle.position.phi2 + (plus ? eps : -eps) * v.y};

    IntegrateOptions opts = optsIn;
    opts.storeSamples = false;
    opts.sinks.clear();

    // first pass: locate the approach and the side it comes from
    bool departed = false;
    double best = std::numeric_limits<double>::infinity();
    bool entered = false;
    LiftedPoint entryState = start;
    const double entryRadius = 0.35;
    auto obs = [&](double, const LiftedPoint& y) {
        TorusPoint here = y.torus();
        if (!departed) {
            if (torusDist(here, fromSaddle.position) > 0.05) departed = true;
            return true;
        }
        double d = torusDist(here, target.position);
        if (!entered && d < entryRadius) {
            entered = true;
            entryState = y;
        }
        if (d < best) best = d;
        // passed the target by a wide margin; the approach will not improve
        return !(best < 0.3 && d > best + 0.5);
    };
    integrate(sys, start, tMax, opts, {}, false, obs);
    if (!(best < 0.5) || !entered)
        throw NoApproach("connectionMiss: branch never approaches the target");

    // standoff section perpendicular to the incoming stable eigendirection;
    // both crossings are event-refined, so the offset is smooth in parameters
    Vec2 vs = eigenvector(target.jacobian, target.ev1.real());
    Vec2 entryDisp{wrapPi(entryState.x1 - target.position.phi1),
                   wrapPi(entryState.x2 - target.position.phi2)};
    if (dot(vs, entryDisp) < 0.0) vs = {-vs.x, -vs.y};
    const double standoff = 0.3;
    SectionSpec section = SectionSpec::anchoredLine(vs, target.position, standoff);
    TorusPoint standPoint{target.position.phi1 + standoff * vs.x,
                          target.position.phi2 + standoff * vs.y};

    best = std::numeric_limits<double>::infinity();
    auto passObs = [&](double, const LiftedPoint& y) {
        double d = torusDist(y.torus(), target.position);
        if (d < best) best = d;
        return !(best < 0.3 && d > best + 0.5);
    };
    auto fwd = integrate(sys, start, tMax, opts, {section}, false, passObs);
    const EventRecord* crossing = nullptr;
    double crossBest = 0.5;
    for (const auto& ev : fwd.events) {
        double d = torusDist(ev.state.torus(), standPoint);
        if (d < crossBest) {
            crossBest = d;
            crossing = &ev;
        }
    }
    if (!crossing) throw NoApproach("connectionMiss: branch misses the standoff section");

    IntegrateOptions bopts = opts;
    bopts.timeDirection = -1;
    LiftedPoint bstart{target.position.phi1 + eps * vs.x, target.position.phi2 + eps * vs.y};
    auto back = integrate(sys, bstart, tMax, bopts, {section}, true);
    if (back.trajectory.reason != Termination::sectionEvent)
        throw NoApproach("connectionMiss: stable manifold misses the standoff section");

    Vec2 tangent{-vs.y, vs.x};
    Vec2 gap{wrapPi(crossing->state.x1 - back.stateEnd.x1),
             wrapPi(crossing->state.x2 - back.stateEnd.x2)};
    double miss = dot(tangent, gap);
    if (!(std::fabs(miss) < 0.5))
        throw NoApproach("connectionMiss: manifolds separate at the standoff section");
    return miss;
}

/// Signed Fix R offset of one unstable branch where it crosses a designated
/// section; among multiple crossings the one nearest Fix R is reported. Zero
/// when the branch hits Fix R on the section, closing an R-symmetric
/// connection.
inline double fixRMiss(const RotatorSystem& sys, const Equilibrium& fromSaddle, BranchId branch,
                       const SectionSpec& atSection, double tMax = 200.0,
                       const IntegrateOptions& optsIn = {}) {
    if (fromSaddle.cls != EqClass::saddle)
        throw std::invalid_argument("fixRMiss: source is not a saddle");
    const bool plus = branch == BranchId::unstablePlus;
    Vec2 v = eigenvector(fromSaddle.jacobian, fromSaddle.ev2.real());
    const double eps = 1e-6;
    LiftedPoint start{fromSaddle.position.phi1 + (plus ? eps : -eps) * v.x,
                      fromSaddle.position.phi2 + (plus ? eps : -eps) * v.y};
    IntegrateOptions opts = optsIn;
    opts.storeSamples = false;
    auto res = integrate(sys, start, tMax, opts, {atSection}, false);
    if (res.events.empty())
        throw NoApproach("fixRMiss: branch never reaches the designated section");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& ev : res.events) {
        double off = wrapPi(ev.state.x1 + ev.state.x2);
        if (std::fabs(off) < std::fabs(best)) best = off;
    }
    return best;
}

struct ConnectionRoot {
    double param = 0.0;
    double miss = 0.0;
    bool degenerateFamily = false; // miss vanishes across the whole bracket
};

/// Bisection on a signed miss function of one free parameter.
inline ConnectionRoot findConnection(const std::function<double(double)>& miss, double lo,
                                     double hi, double tol = 1e-10) {
    if (!(hi > lo)) throw std::invalid_argument("findConnection: empty bracket");
    double flo = miss(lo), fhi = miss(hi);
    if (std::fabs(flo) < 1e-9 && std::fabs(fhi) < 1e-9)
        return {0.5 * (lo + hi), 0.0, true};
    if (std::fabs(flo) < 1e-12) return {lo, flo, false};
    if (std::fabs(fhi) < 1e-12) return {hi, fhi, false};
    if ((flo < 0.0) == (fhi < 0.0))
        throw NoSignChange("findConnection: miss has the same sign at both bracket ends");
    double fm = flo;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        fm = miss(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return {0.5 * (lo + hi), fm, false};
}

} // namespace rotator
