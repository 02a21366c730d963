// Acceptance gate: one line per criterion, nonzero exit when any fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <set>
#include <vector>

#include "rotator/bifurcation.hpp"
#include "rotator/orbits.hpp"
#include "rotator/regions.hpp"

using namespace rotator;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const char* name, bool ok, double secs, const std::string& detail) {
    std::printf("%s  %2d %-28s (%6.1fs)  %s\n", ok ? "PASS" : "FAIL", id, name, secs,
                detail.c_str());
    if (!ok) ++failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

int localCount(const RotatorSystem& sys, const TorusPoint& c, double rad,
               bool syncOnly = false) {
    int n = 0;
    for (const auto& e : findEquilibria(sys))
        if (torusDist(e.position, c) < rad && (!syncOnly || e.memberships.inSynchrony)) ++n;
    return n;
}

/// Fold angle on Fix R: the root of h' whose profile value h is smallest.
double foldAngle(const RotatorSystem& sys) {
    double best = 0.0, bestScore = 1e9;
    const int N = 2000;
    double prev = fixRProfileDeriv(sys, 0.0), prevPhi = 0.0;
    for (int i = 1; i <= N; ++i) {
        double phi = kTwoPi * i / N;
        double v = fixRProfileDeriv(sys, phi);
        if ((prev < 0.0) != (v < 0.0)) {
            double lo = prevPhi, hi = phi;
            for (int k = 0; k < 60; ++k) {
                double mid = 0.5 * (lo + hi);
                if ((fixRProfileDeriv(sys, mid) < 0.0) == (prev < 0.0)) lo = mid;
                else hi = mid;
            }
            double root = 0.5 * (lo + hi);
            double score = std::fabs(fixRProfile(sys, root));
            if (score < bestScore) {
                bestScore = score;
                best = root;
            }
        }
        prev = v;
        prevPhi = phi;
    }
    return best;
}

/// Distance of (kappa, a) from a fold of the omega = 1 Fix R profile: smallest
/// |h| over roots of h' together with smallest |h'| over roots of h, so exact
/// folds (including cusps) score near zero.
double foldResidualPlaneB(bool caseI, double kappa, double a) {
    auto sys = caseI ? presets::caseI(1.0, a, kappa) : presets::caseII(1.0, a, kappa);
    const int N = 2000;
    double best = 1e9;
    double ph = fixRProfile(sys, 0.0), pd = fixRProfileDeriv(sys, 0.0), prevPhi = 0.0;
    for (int i = 1; i <= N; ++i) {
        double phi = kTwoPi * i / N;
        double h = fixRProfile(sys, phi);
        double d = fixRProfileDeriv(sys, phi);
        auto bisect = [&](auto f, double lo, double hi, bool loNeg) {
            for (int k = 0; k < 60; ++k) {
                double mid = 0.5 * (lo + hi);
                if ((f(mid) < 0.0) == loNeg) lo = mid;
                else hi = mid;
            }
            return 0.5 * (lo + hi);
        };
        if ((pd < 0.0) != (d < 0.0)) {
            double r = bisect([&](double x) { return fixRProfileDeriv(sys, x); }, prevPhi, phi,
                              pd < 0.0);
            best = std::min(best, std::fabs(fixRProfile(sys, r)));
        }
        if ((ph < 0.0) != (h < 0.0)) {
            double r = bisect([&](double x) { return fixRProfile(sys, x); }, prevPhi, phi,
                              ph < 0.0);
            best = std::min(best, std::fabs(fixRProfileDeriv(sys, r)));
        }
        ph = h;
        pd = d;
        prevPhi = phi;
    }
    return best;
}

struct MapCensus {
    int lib = 0, rot = 0, diss = 0, und = 0;
};

MapCensus censusOf(const RegionMap& map) {
    MapCensus c;
    for (const auto& cell : map.cells) {
        c.lib += cell.kind == RegionKind::libration;
        c.rot += cell.kind == RegionKind::rotation;
        c.diss += cell.kind == RegionKind::dissipative;
        c.und += cell.kind == RegionKind::undetermined;
    }
    return c;
}

void criterion1() {
    auto t0 = Clock::now();
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> uw(-2.0, 2.0), ua(0.2, 2.0), up(0.0, kTwoPi);
    double worstR = 0.0, worstR2 = 0.0;
    std::vector<TorusPoint> pts(1000);
    for (int i = 0; i < 20; ++i) {
        double w = uw(rng), a = ua(rng), k = uw(rng);
        for (auto& p : pts) p = {up(rng), up(rng)};
        worstR = std::max(worstR, reversibilityResidual(presets::caseI(w, a, k), reversalR(), pts));
        worstR = std::max(worstR, reversibilityResidual(presets::caseII(w, a, k), reversalR(), pts));
        worstR2 = std::max(worstR2,
                           reversibilityResidual(presets::caseI(0.0, a, k), reversalR2(), pts));
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    bool ok = worstR < 1e-12 && worstR2 < 1e-12 && secs < 1.0;
    report(1, "reversibility residuals", ok, secs,
           fmt("worst R %.1e, worst R2 %.1e over 20 systems x 1000 points", worstR, worstR2));
}

void criterion2() {
    auto t0 = Clock::now();
    bool rootsOk = true;
    for (double k : {0.05, 0.2, 0.5}) {
        auto eqs = findEquilibria(presets::caseI(0.5, 1.0, k));
        bool sink = false, source = false;
        for (const auto& e : eqs) {
            if (e.cls == EqClass::sink &&
                torusDist(e.position, {kTwoPi / 3.0, kTwoPi / 3.0}) < 1e-10)
                sink = true;
            if (e.cls == EqClass::source &&
                torusDist(e.position, {kTwoPi * 2.0 / 3.0, kTwoPi * 2.0 / 3.0}) < 1e-10)
                source = true;
        }
        rootsOk = rootsOk && sink && source;
    }
    int worstTotal = 0, worstFixR = 0;
    for (int ci = 0; ci < 2; ++ci) {
        for (int i = 0; i < 20; ++i) {
            for (int j = 0; j < 20; ++j) {
                double w = -1.93 + 0.197 * i;
                double k = -1.91 + 0.199 * j;
                auto sys = ci == 0 ? presets::caseI(w, 1.0, k) : presets::caseII(w, 1.0, k);
                auto eqs = findEquilibria(sys);
                int fixr = 0;
                for (const auto& e : eqs) fixr += e.memberships.inFixR;
                worstTotal = std::max(worstTotal, static_cast<int>(eqs.size()));
                worstFixR = std::max(worstFixR, fixr);
            }
        }
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    bool ok = rootsOk && worstTotal <= 6 && worstFixR <= 4;
    report(2, "equilibrium census", ok, secs,
           fmt("coupling-independent sync roots %s; max census %d, max Fix R %d over 2x400 "
               "systems",
               rootsOk ? "exact" : "MISSING", worstTotal, worstFixR));
}

void criterion3() {
    auto t0 = Clock::now();
    double worstDegen = 0.0;
    int badJumps = 0, points = 0;

    auto checkFold = [&](const RotatorSystem& atLocus, const RotatorSystem& below,
                         const RotatorSystem& above) {
        double phi = foldAngle(atLocus);
        TorusPoint pt{phi, wrap2pi(-phi)};
        auto J = atLocus.jacobian(pt);
        worstDegen = std::max(worstDegen, std::max(std::fabs(J.trace()), std::fabs(J.det())));
        int jump = std::abs(localCount(above, pt, 0.3) - localCount(below, pt, 0.3));
        badJumps += jump != 2;
        ++points;
    };

    // anti-reciprocal saddle-center pair: outer branch everywhere, inner
    // branch where defined
    for (int i = 0; i < 50; ++i) {
        double k = 0.30 + (2.50 - 0.30) * i / 49.0;
        auto loc = analyticLocus(LocusId::caseISaddleCenter, k);
        double wOuter = loc.values.back();
        checkFold(presets::caseI(wOuter, 1.0, k), presets::caseI(wOuter - 1e-3, 1.0, k),
                  presets::caseI(wOuter + 1e-3, 1.0, k));
        if (loc.values.size() == 4) {
            double wInner = loc.values[2];
            checkFold(presets::caseI(wInner, 1.0, k), presets::caseI(wInner - 1e-3, 1.0, k),
                      presets::caseI(wInner + 1e-3, 1.0, k));
        }
    }
    // reciprocal saddle-center
    for (int i = 0; i < 50; ++i) {
        double k = 0.30 + (2.00 - 0.30) * i / 49.0;
        double w = analyticLocus(LocusId::caseIISaddleCenter, k).values[0];
        checkFold(presets::caseII(w, 1.0, k), presets::caseII(w - 1e-3, 1.0, k),
                  presets::caseII(w + 1e-3, 1.0, k));
    }
    // reciprocal sink/source lines kappa = omega +- a: the degenerate point is
    // the synchronous root at phi = 0 (plus sign) or pi (minus sign); crossing
    // trades the synchronous pair against a Fix R pair, so the count jump is
    // measured inside the synchrony subspace
    for (double s : {+1.0, -1.0}) {
        for (int i = 0; i < 50; ++i) {
            double w = -1.5 + 3.0 * i / 49.0;
            double k = w + s;
            TorusPoint pt{s > 0 ? 0.0 : kPi, s > 0 ? 0.0 : kPi};
            auto sys = presets::caseII(w, 1.0, k);
            auto J = sys.jacobian(pt);
            double res = std::max({sys.rhs(pt).maxAbs(), std::fabs(J.trace()),
                                   std::fabs(J.det())});
            worstDegen = std::max(worstDegen, res);
            int jump = std::abs(localCount(presets::caseII(w, 1.0, k + 1e-3), pt, 0.3, true) -
                                localCount(presets::caseII(w, 1.0, k - 1e-3), pt, 0.3, true));
            badJumps += jump != 2;
            ++points;
        }
    }
    bool spot = analyticLocus(LocusId::caseIISaddleCenter, 0.5).values[0] == -0.75;
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    bool ok = worstDegen < 1e-6 && badJumps == 0 && spot;
    report(3, "analytic loci validity", ok, secs,
           fmt("%d locus points, worst degeneracy %.1e, %d bad count jumps, spot value %s",
               points, worstDegen, badJumps, spot ? "exact" : "WRONG"));
}

void criterion4() {
    auto t0 = Clock::now();
    auto sys = presets::caseI(1.5, 1.0, 0.3);
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    ClassifyOptions co;
    co.closureTol = 1e-6;
    co.tMax = 2000.0;
    co.equilibria = findEquilibria(sys);
    int captures = 0, closed = 0;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        auto lab = classifyCell(sys, {u(rng), u(rng)}, co);
        captures += lab.kind == RegionKind::dissipative;
        closed += lab.closureDist < 1e-6;
        worst = std::max(worst, lab.closureDist);
    }
    auto c = censusOf(regionMap(sys, 64));
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    bool ok = captures == 0 && closed == 100 && c.diss == 0 && c.und == 0;
    report(4, "conservative regime", ok, secs,
           fmt("%d captures, %d/100 orbits closed (worst %.1e); 64x64 map: %d rot, %d lib, %d "
               "other",
               captures, closed, worst, c.rot, c.lib, c.diss + c.und));
}

void criterion5() {
    auto t0 = Clock::now();
    auto low = censusOf(regionMap(presets::caseI(0.5, 1.0, 0.05), 32));
    auto mixed = censusOf(regionMap(presets::caseI(0.5, 1.0, 1.5), 32));
    bool sinkPersists = false;
    for (const auto& e : findEquilibria(presets::caseI(0.5, 1.0, 1.5)))
        sinkPersists |= e.cls == EqClass::sink;
    auto rotOnly = censusOf(regionMap(presets::caseI(1.5, 1.0, 0.3), 32));
    auto withLib = censusOf(regionMap(presets::caseI(1.5, 1.0, 2.5), 32));
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    bool birth = low.diss == 32 * 32 && mixed.rot > 0 && mixed.lib > 0 && mixed.diss > 0 &&
                 sinkPersists;
    bool reverse = rotOnly.rot == 32 * 32 && withLib.lib > 0 && withLib.rot > 0 &&
                   withLib.diss == 0;
    report(5, "oscillation birth/death", birth && reverse, secs,
           fmt("excitable sweep: all-dissipative -> %d rot + %d lib cells with sink; "
               "oscillatory sweep: all-rotation -> %d lib cells",
               mixed.rot, mixed.lib, withLib.lib));
}

void criterion6() {
    auto t0 = Clock::now();
    auto degen = presets::caseI(1.0, 0.0, 1.5);
    IntegrateOptions opts;
    opts.storeSamples = false;
    auto res = integrate(degen, {0.7, 0.2}, 100.0, opts);
    double drift = std::fabs((res.stateEnd.x1 - res.stateEnd.x2) - (0.7 - 0.2));

    // zero-velocity diagonals: roots of omega - kappa sin(psi)
    std::vector<double> lines;
    auto g = [](double psi) { return 1.0 - 1.5 * std::sin(psi); };
    const int N = 720;
    double prev = g(0.0);
    for (int i = 1; i <= N; ++i) {
        double lo = kTwoPi * (i - 1) / N, hi = kTwoPi * i / N;
        double v = g(hi);
        if ((prev < 0.0) != (v < 0.0)) {
            for (int k = 0; k < 60; ++k) {
                double mid = 0.5 * (lo + hi);
                if ((g(mid) < 0.0) == (prev < 0.0)) lo = mid;
                else hi = mid;
            }
            lines.push_back(0.5 * (lo + hi));
        }
        prev = v;
    }
    double worstSpeed = 0.0;
    for (double psi : lines)
        for (int i = 0; i < 10; ++i) {
            double x = kTwoPi * i / 10.0;
            worstSpeed = std::max(worstSpeed, degen.rhs(x, x - psi).maxAbs());
        }

    auto pert = presets::caseI(1.0, 0.02, 1.5);
    auto eqs = findEquilibria(pert);
    int saddles = 0, centers = 0;
    for (const auto& e : eqs) {
        saddles += e.cls == EqClass::saddle;
        centers += e.cls == EqClass::center;
    }
    auto map = regionMap(pert, 64);
    auto c = censusOf(map);
    // strips are narrow diagonal bands: cluster libration cells by the phase
    // difference and count circular runs of occupied bins
    std::vector<int> bins(64, 0);
    for (int i = 0; i < map.n; ++i)
        for (int j = 0; j < map.n; ++j)
            if (map.cell(i, j).kind == RegionKind::libration) {
                auto ctr = map.cellCenter(i, j);
                int b = static_cast<int>(wrap2pi(ctr.phi1 - ctr.phi2) / kTwoPi * 64) % 64;
                ++bins[b];
            }
    int strips = 0;
    for (int b = 0; b < 64; ++b)
        if (bins[b] > 0 && bins[(b + 63) % 64] == 0) ++strips;
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    bool ok = drift < 1e-9 && lines.size() == 2 && worstSpeed < 1e-9 && eqs.size() == 4 &&
              saddles == 2 && centers == 2 && strips == 2 && c.lib > 0 &&
              c.lib < 64 * 64 / 4;
    report(6, "a=0 degeneracy", ok, secs,
           fmt("drift %.1e, %zu zero-velocity lines (speed %.1e); perturbed census %dS+%dC, "
               "%d libration strips (%d cells)",
               drift, lines.size(), worstSpeed, saddles, centers, strips, c.lib));
}

void criterion7() {
    auto t0 = Clock::now();
    int checked = 0;
    double worst = 0.0;
    for (auto mc : {ModelCase::antiReciprocal, ModelCase::reciprocal}) {
        auto curves = traceAnalyticCurves(mc, ParamPlane::kappaOmega, -2.5, 2.5, 81);
        for (const auto& c : curves) {
            for (std::size_t i = 0; i < c.points.size(); i += 4) {
                const auto& p = c.points[i];
                if (std::fabs(p[1]) < 0.2) continue; // transform blows up near omega = 0
                auto q = transformPlane(p); // (kappa/omega, 1/omega)
                double res = 0.0;
                switch (c.kind) {
                case CurveKind::saddleCenterI:
                    res = foldResidualPlaneB(true, q[0], q[1]);
                    break;
                case CurveKind::saddleCenterII:
                    res = foldResidualPlaneB(false, q[0], q[1]);
                    break;
                case CurveKind::pitchforkI:
                    res = std::fabs(std::fabs(q[1]) - 1.0);
                    break;
                case CurveKind::sinkSourceII:
                    res = std::min(std::fabs(q[1] - (q[0] - 1.0)),
                                   std::fabs(q[1] - (1.0 - q[0])));
                    break;
                default: continue;
                }
                worst = std::max(worst, res);
                ++checked;
            }
        }
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    bool ok = checked >= 50 && worst < 1e-6;
    report(7, "plane-transform overlay", ok, secs,
           fmt("%d transformed points, worst defining residual %.1e", checked, worst));
}

void criterion8() {
    auto t0 = Clock::now();
    ConnectionTraceOptions opt;
    opt.step = 5e-3;
    opt.abscLo = 1.81;
    opt.abscHi = 2.26;
    auto curve = traceConnectionCurve(caseIConnectionMiss, ParamPlane::kappaOmega, 2.0, 0.10,
                                      0.17, opt);
    double anchorMiss = 1e9, worstMirror = 0.0;
    for (const auto& p : curve.points)
        if (p[0] == 2.0) anchorMiss = std::fabs(caseIConnectionMiss(p[0], p[1]));
    for (std::size_t i = 0; i < curve.points.size(); i += 10) {
        const auto& p = curve.points[i];
        worstMirror = std::max(worstMirror, std::fabs(caseIConnectionMiss(-p[0], p[1])));
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    bool ok = anchorMiss < 1e-8 && curve.points.size() >= 50 && worstMirror < 1e-6;
    report(8, "heteroclinic shooting", ok, secs,
           fmt("anchor |miss| %.1e, %zu continued points, worst mirrored |miss| %.1e",
               anchorMiss, curve.points.size(), worstMirror));
}

void criterion9() {
    auto t0 = Clock::now();
    // per-oscillator signs resolved against the described portrait: the
    // bursting attractor coexists with a source, not a sink
    auto sys = presets::sinusoidal({1.07, 1.13, 1.0, 1.0, 1.0, -1.0, 0.0});
    auto cyc = findLimitCycle(sys, {0.5, 0.5});
    auto gaps = interSpikeIntervals(sys, cyc, 5.0);
    double mx = 0.0, sum = 0.0;
    for (double g : gaps) {
        mx = std::max(mx, g);
        sum += g;
    }
    double isiRatio = mx / ((sum - mx) / (gaps.size() - 1));
    bool cycleOk = cyc.stable && std::fabs(cyc.floquet) < 1.0 && cyc.p > 0 && cyc.q > 0 &&
                   cyc.p != cyc.q && isiRatio > 3.0;

    ScanOptions so;
    so.nSteps = 200;
    so.spikeLevel = 5.0;
    auto pts = scanEpsilon(so);
    int prevN = 0, branches = 0, lastBranch = -1;
    bool monotone = true, saw45 = false;
    for (const auto& pt : pts) {
        if (!pt.converged) continue;
        saw45 |= pt.p == 4 && pt.q == 5;
        if (pt.q != pt.p + 1) continue; // mediant windows sit between branches
        monotone = monotone && pt.p >= prevN;
        prevN = pt.p;
        if (pt.p != lastBranch) {
            ++branches;
            lastBranch = pt.p;
        }
    }

    auto window = [&](double lo, double hi, int n, int p, int q) {
        ScanOptions wo;
        wo.epsLo = lo;
        wo.epsHi = hi;
        wo.nSteps = n;
        wo.spikeLevel = 5.0;
        for (const auto& pt : scanEpsilon(wo))
            if (pt.converged && pt.p == p && pt.q == q) return true;
        return false;
    };
    bool saw35 = window(0.0995, 0.1020, 60, 3, 5);
    bool saw58 = window(0.1005, 0.1010, 51, 5, 8);
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    bool ok = cycleOk && branches >= 3 && monotone && saw45 && saw35 && saw58 && secs < 300.0;
    report(9, "bursting cascade", ok, secs,
           fmt("cycle (%d,%d) floquet %.1e maxISI/meanISI %.2f; %d adjacent branches%s%s%s%s",
               cyc.p, cyc.q, cyc.floquet, isiRatio, branches, monotone ? "" : " NON-MONOTONE",
               saw45 ? ", (4,5)" : ", MISSING (4,5)", saw35 ? ", (3,5)" : ", MISSING (3,5)",
               saw58 ? ", (5,8)" : ", MISSING (5,8)"));
}

void criterion10() {
    auto t0 = Clock::now();
    auto sys = presets::higherHarmonic(0.0, 1.0, 2, 4.0, 0.0, 1);
    auto eqs = findEquilibria(sys);
    auto map = regionMap(sys, 32);
    int libRegions = countRegions(
        map, [](const RegionLabel& l) { return l.kind == RegionKind::libration; });
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    bool ok = static_cast<int>(eqs.size()) <= 4 * 2 * 2 && libRegions >= 2;
    report(10, "higher harmonics", ok, secs,
           fmt("%zu equilibria (bound 16), %d disjoint libration regions", eqs.size(),
               libRegions));
}

void criterion11() {
    auto t0 = Clock::now();
    auto R = reversalR();
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    double worst = 0.0;
    std::vector<RotatorSystem> systems{presets::caseI(0.9, 1.0, 0.6),
                                       presets::caseII(0.4, 1.0, 0.7)};
    IntegrateOptions opts;
    opts.storeSamples = false;
    for (const auto& sys : systems) {
        for (int i = 0; i < 50; ++i) {
            TorusPoint p{u(rng), u(rng)};
            auto fwd = integrate(sys, LiftedPoint(p), 5.0, opts);
            auto back = integrate(sys, LiftedPoint(R.apply(fwd.stateEnd.torus())), 5.0, opts);
            worst = std::max(worst, torusDist(back.stateEnd.torus(), R.apply(p)));
        }
    }
    double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    report(11, "flow conjugacy", worst < 1e-6, secs,
           fmt("worst conjugacy defect %.1e over 2x50 points", worst));
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();
    std::printf("%s: %d of 11 criteria failed\n", failures ? "FAIL" : "PASS", failures);
    return failures;
}
