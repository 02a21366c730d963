#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotator/geometry.hpp"
#include "rotator/system.hpp"

namespace rotator {

enum class EqClass { sink, source, saddle, center, degenerate, undeterminedFocus };

enum class DegenerateKind { none, nilpotentDoubleZero, fullZero };

struct Membership {
    bool inFixR = false;
    bool inFixR2 = false;
    bool inSynchrony = false;
};

/// Subspace membership by perpendicular torus distance to the 1-D subspace.
inline Membership membership(const TorusPoint& p, double tol = 1e-8) {
    const double invSqrt2 = 1.0 / std::sqrt(2.0);
    Membership m;
    m.inFixR = std::fabs(wrapPi(p.phi1 + p.phi2)) * invSqrt2 < tol;
    m.inFixR2 = std::fabs(wrapPi(p.phi1 - p.phi2 - kPi)) * invSqrt2 < tol;
    m.inSynchrony = std::fabs(wrapPi(p.phi1 - p.phi2)) * invSqrt2 < tol;
    return m;
}

struct Equilibrium {
    TorusPoint position;
    Mat2 jacobian;
    std::complex<double> ev1, ev2;
    EqClass cls = EqClass::saddle;
    Membership memberships;
    DegenerateKind degenerateKind = DegenerateKind::none;
};

inline const char* eqClassName(EqClass c) {
    switch (c) {
    case EqClass::sink: return "sink";
    case EqClass::source: return "source";
    case EqClass::saddle: return "saddle";
    case EqClass::center: return "center";
    case EqClass::degenerate: return "degenerate";
    case EqClass::undeterminedFocus: return "focus";
    }
    return "?";
}

/// Eigenvalue-based classification with the fixed tolerance policy.
/// Centers are only certified when the system is reversible and the point
/// lies in Fix R; otherwise pure-imaginary pairs are reported as foci.
inline Equilibrium classifyEquilibrium(const RotatorSystem& sys, const TorusPoint& p,
                                       bool reversibleHint, double tol = 1e-8) {
    if (sys.rhs(p).maxAbs() >= std::max(tol, 1e-8))
        throw std::invalid_argument("classifyEquilibrium: point is not an equilibrium to tol");

    Equilibrium eq;
    eq.position = p;
    eq.jacobian = sys.jacobian(p);
    eq.memberships = membership(p);

    const Mat2& J = eq.jacobian;
    const double tr = J.trace();
    const double det = J.det();
    const double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        double s = std::sqrt(disc);
        eq.ev1 = {(tr - s) / 2.0, 0.0};
        eq.ev2 = {(tr + s) / 2.0, 0.0};
    } else {
        double s = std::sqrt(-disc);
        eq.ev1 = {tr / 2.0, -s / 2.0};
        eq.ev2 = {tr / 2.0, s / 2.0};
    }

    const double eps = 1e-8;
    if (std::fabs(det) <= eps) {
        eq.cls = EqClass::degenerate;
        if (J.frobenius() < eps)
            eq.degenerateKind = DegenerateKind::fullZero;
        else if (J.mul(J).frobenius() < eps)
            eq.degenerateKind = DegenerateKind::nilpotentDoubleZero;
        else
            eq.degenerateKind = DegenerateKind::none;
    } else if (det < -eps) {
        eq.cls = EqClass::saddle;
    } else if (tr < -eps) {
        eq.cls = EqClass::sink;
    } else if (tr > eps) {
        eq.cls = EqClass::source;
    } else {
        eq.cls = (reversibleHint && eq.memberships.inFixR) ? EqClass::center
                                                           : EqClass::undeterminedFocus;
    }
    return eq;
}

/// Damped Newton iteration for a root of the vector field.
inline std::optional<TorusPoint> newtonEquilibrium(const RotatorSystem& sys, const TorusPoint& seed,
                                                   double tol = 1e-12, int maxIter = 50) {
    double x1 = seed.phi1, x2 = seed.phi2;
    Vec2 r = sys.rhs(x1, x2);
    double rn = r.maxAbs();
    for (int it = 0; it < maxIter; ++it) {
        if (rn < tol) return TorusPoint{x1, x2};
        Mat2 J = sys.jacobian(x1, x2);
        double det = J.det();
        if (std::fabs(det) < 1e-14) {
            // singular Jacobian: tiny gradient-descent style nudge
            x1 -= 1e-3 * r.x;
            x2 -= 1e-3 * r.y;
            r = sys.rhs(x1, x2);
            rn = r.maxAbs();
            continue;
        }
        double dx1 = (J.d * r.x - J.b * r.y) / det;
        double dx2 = (-J.c * r.x + J.a * r.y) / det;
        double step = 1.0;
        for (int half = 0; half < 8; ++half) {
            double nx1 = x1 - step * dx1, nx2 = x2 - step * dx2;
            Vec2 nr = sys.rhs(nx1, nx2);
            if (nr.maxAbs() < rn || step < 1.0 / 64.0) {
                x1 = nx1; x2 = nx2; r = nr; rn = nr.maxAbs();
                break;
            }
            step *= 0.5;
        }
    }
    return (rn < tol) ? std::optional<TorusPoint>({x1, x2}) : std::nullopt;
}

/// Newton from a uniform grid of seeds; converged roots deduplicated by torus
/// distance and classified. The returned list is ordered by position.
inline std::vector<Equilibrium> findEquilibria(const RotatorSystem& sys, int gridN = 32,
                                               double tol = 1e-12) {
    if (gridN < 8) throw std::invalid_argument("findEquilibria: gridN must be >= 8");
    const bool rev = sys.isReversible();
    std::vector<TorusPoint> roots;
    for (int i = 0; i < gridN; ++i) {
        for (int j = 0; j < gridN; ++j) {
            TorusPoint seed{(i + 0.5) * kTwoPi / gridN, (j + 0.5) * kTwoPi / gridN};
            auto root = newtonEquilibrium(sys, seed, tol);
            if (!root) continue;
            // wide dedup radius: near-degenerate parameters leave flat Newton
            // basins that converge to points ~1e-6 apart around a single root
            bool dup = false;
            for (const auto& q : roots) {
                if (torusDist(*root, q) < 1e-4) { dup = true; break; }
            }
            if (!dup) roots.push_back(*root);
        }
    }
    std::sort(roots.begin(), roots.end(), [](const TorusPoint& a, const TorusPoint& b) {
        return a.phi1 != b.phi1 ? a.phi1 < b.phi1 : a.phi2 < b.phi2;
    });
    std::vector<Equilibrium> out;
    out.reserve(roots.size());
    for (const auto& r : roots) out.push_back(classifyEquilibrium(sys, r, rev, 1e-8));
    return out;
}

// ---------------------------------------------------------------------------
// Closed-form bifurcation loci
// ---------------------------------------------------------------------------

enum class LocusId {
    caseISaddleCenter,  // fold of Fix R equilibria, anti-reciprocal coupling
    caseIPitchfork,     // omega = +-a
    caseIISaddleCenter, // omega = -a^2/(8 kappa) - kappa, |kappa| > a/4
    caseIISinkSource    // omega +- a = kappa
};

struct LocusResult {
    std::vector<double> values; // ordinates (omega) at the queried abscissa (kappa)
    std::string note;           // diagnostic when the abscissa is outside the domain
};

/// Ordinates omega of the closed-form locus at abscissa kappa, for general a
/// (obtained from the a = 1 relations by the time rescaling
/// (omega, a, kappa) -> (omega/a, 1, kappa/a)).
inline LocusResult analyticLocus(LocusId id, double kappa, double a = 1.0) {
    LocusResult res;
    switch (id) {
    case LocusId::caseISaddleCenter: {
        // Fold of the Fix R profile h = omega + cos(phi) - kappa sin(2 phi):
        // eliminating phi from h = h' = 0 gives sin(phi) = (1 +- u) / (8 kappa)
        // with u = sqrt(1 + 32 kappa^2), hence two branches
        //   omega = (u -+ 3) sqrt(2 (16 kappa^2 - 1 +- u)) / (32 |kappa|).
        // (The radicand differs between the branches; a printed form carrying
        // 16 kappa^2 - 1 - u in both does not satisfy h = h' = 0.)
        if (a == 0.0 || kappa == 0.0) {
            res.note = "locus undefined for a = 0 or kappa = 0";
            return res;
        }
        const double k = kappa / std::fabs(a);
        const double u = std::sqrt(1.0 + 32.0 * k * k);
        const double innerLow = 16.0 * k * k - 1.0 - u;
        const double innerHigh = 16.0 * k * k - 1.0 + u;
        const double wHigh = (u + 3.0) * std::sqrt(2.0 * innerHigh) / (32.0 * std::fabs(k));
        res.values.push_back(wHigh * std::fabs(a));
        res.values.push_back(-wHigh * std::fabs(a));
        if (innerLow >= 0.0) {
            const double wLow = (u - 3.0) * std::sqrt(2.0 * innerLow) / (32.0 * std::fabs(k));
            res.values.push_back(wLow * std::fabs(a));
            res.values.push_back(-wLow * std::fabs(a));
        } else {
            res.note = "inner branch absent: requires 16 kappa^2 >= 1 + sqrt(1 + 32 kappa^2)";
        }
        break;
    }
    case LocusId::caseIPitchfork:
        res.values = {std::fabs(a), -std::fabs(a)};
        break;
    case LocusId::caseIISaddleCenter: {
        if (std::fabs(kappa) <= std::fabs(a) / 4.0) {
            res.note = "outside domain: requires |kappa| > a/4";
            return res;
        }
        res.values = {-a * a / (8.0 * kappa) - kappa};
        break;
    }
    case LocusId::caseIISinkSource:
        res.values = {kappa - a, kappa + a};
        break;
    }
    std::sort(res.values.begin(), res.values.end());
    return res;
}

/// Scalar vector-field restriction to Fix R: both components of the flow at
/// (phi, -phi) coincide for reversible systems; Fix R equilibria are its roots.
inline double fixRProfile(const RotatorSystem& sys, double phi) {
    return sys.rhs(phi, -phi).x;
}

inline double fixRProfileDeriv(const RotatorSystem& sys, double phi) {
    Mat2 J = sys.jacobian(phi, -phi);
    return J.a - J.b;
}

/// Roots of the Fix R profile on [0, 2*pi), located by scan + bisection.
inline std::vector<double> fixRRoots(const RotatorSystem& sys, int scanN = 720) {
    std::vector<double> roots;
    double prevPhi = 0.0, prevVal = fixRProfile(sys, 0.0);
    for (int i = 1; i <= scanN; ++i) {
        double phi = i * kTwoPi / scanN;
        double val = fixRProfile(sys, phi);
        if ((prevVal < 0.0 && val >= 0.0) || (prevVal > 0.0 && val <= 0.0)) {
            double lo = prevPhi, hi = phi, flo = prevVal;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = fixRProfile(sys, mid);
                if ((fm < 0.0) == (flo < 0.0)) { lo = mid; flo = fm; } else { hi = mid; }
            }
            roots.push_back(wrap2pi(0.5 * (lo + hi)));
        }
        prevPhi = phi;
        prevVal = val;
    }
    return roots;
}

} // namespace rotator
