#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotator/fourier.hpp"
#include "rotator/geometry.hpp"

namespace rotator {

/// Vector field on T^2:
///   phi1' = f1(phi1) + g1(phi1 - phi2)
///   phi2' = f2(phi2) + g2(phi2 - phi1)
/// All evaluations accept lifted (real) coordinates; the field is 2*pi-periodic.
struct RotatorSystem {
    FourierSpec f1, f2, g1, g2;
    std::string label;

    Vec2 rhs(double x1, double x2) const {
        return {f1.value(x1) + g1.value(x1 - x2),
                f2.value(x2) + g2.value(x2 - x1)};
    }
    Vec2 rhs(const LiftedPoint& p) const { return rhs(p.x1, p.x2); }
    Vec2 rhs(const TorusPoint& p) const { return rhs(p.phi1, p.phi2); }

    Mat2 jacobian(double x1, double x2) const {
        const double d1 = g1.deriv(x1 - x2);
        const double d2 = g2.deriv(x2 - x1);
        return {f1.deriv(x1) + d1, -d1,
                -d2, f2.deriv(x2) + d2};
    }
    Mat2 jacobian(const TorusPoint& p) const { return jacobian(p.phi1, p.phi2); }
    Mat2 jacobian(const LiftedPoint& p) const { return jacobian(p.x1, p.x2); }

    /// Anti-reciprocal coupling: f1 = f2 even, g1 odd, g2 = -g1.
    bool isCaseI() const {
        return f1 == f2 && f1.isEven() && g1.isOdd() && g2 == g1.negated();
    }

    /// Reciprocal conservative coupling: f1 = f2 even, g1 = g2 even.
    bool isCaseII() const {
        return f1 == f2 && f1.isEven() && g1 == g2 && g1.isEven();
    }

    bool isReversible() const { return isCaseI() || isCaseII(); }
};

/// An affine involution on T^2, optionally reversing time.
struct SymmetryAction {
    Mat2 linear{1.0, 0.0, 0.0, 1.0};
    Vec2 shift{0.0, 0.0};
    int timeSign = 1; // -1 for time-reversing actions

    Vec2 apply(const Vec2& p) const { return linear.apply(p) + shift; }
    TorusPoint apply(const TorusPoint& p) const {
        Vec2 q = apply(Vec2{p.phi1, p.phi2});
        return {q.x, q.y};
    }

    /// Involution on the torus: the double application differs from the
    /// identity by multiples of 2*pi.
    bool isInvolution() const {
        Mat2 mm = linear.mul(linear);
        if (std::fabs(mm.a - 1.0) > 1e-14 || std::fabs(mm.d - 1.0) > 1e-14 ||
            std::fabs(mm.b) > 1e-14 || std::fabs(mm.c) > 1e-14)
            return false;
        Vec2 s2 = linear.apply(shift) + shift;
        return circleDist(s2.x, 0.0) < 1e-12 && circleDist(s2.y, 0.0) < 1e-12;
    }
};

/// R: (phi1, phi2, t) -> (-phi2, -phi1, -t).
inline SymmetryAction reversalR() {
    return {{0.0, -1.0, -1.0, 0.0}, {0.0, 0.0}, -1};
}

/// Second reversal present for omega = 0 in the anti-reciprocal case:
/// (phi1, phi2, t) -> (phi2 + pi, phi1 + pi, -t).
inline SymmetryAction reversalR2() {
    return {{0.0, 1.0, 1.0, 0.0}, {kPi, kPi}, -1};
}

/// R * gamma_m: (phi1, phi2, t) -> (-phi1, -phi2, -t).
inline SymmetryAction reversalRGammaM() {
    return {{-1.0, 0.0, 0.0, -1.0}, {0.0, 0.0}, -1};
}

/// max over samples of |F(A(p)) + DA F(p)| for a time-reversing action A.
inline double reversibilityResidual(const RotatorSystem& sys, const SymmetryAction& action,
                                    std::span<const TorusPoint> samples) {
    if (action.timeSign != -1)
        throw std::invalid_argument("reversibilityResidual: action must reverse time");
    double worst = 0.0;
    for (const auto& p : samples) {
        TorusPoint q = action.apply(p);
        Vec2 r = sys.rhs(q) + action.linear.apply(sys.rhs(p));
        worst = std::max(worst, r.maxAbs());
    }
    return worst;
}

/// Residual of the parametric kappa -> -kappa symmetry of the anti-reciprocal
/// case: swapping the oscillators conjugates the flow of kappa to the flow of
/// -kappa. (The printed shift (phi2+pi, phi1+pi) does not close the identity;
/// the plain swap does.)
inline double swapKappaResidual(const RotatorSystem& plus, const RotatorSystem& minus,
                                std::span<const TorusPoint> samples) {
    double worst = 0.0;
    for (const auto& p : samples) {
        TorusPoint swapped{p.phi2, p.phi1};
        Vec2 lhs = minus.rhs(swapped);
        Vec2 f = plus.rhs(p);
        Vec2 rhs{f.y, f.x};
        worst = std::max(worst, (lhs - rhs).maxAbs());
    }
    return worst;
}

namespace presets {

/// Anti-reciprocal case:
///   phi1' = omega + a cos(phi1) - kappa sin(phi1 - phi2)
///   phi2' = omega + a cos(phi2) + kappa sin(phi2 - phi1)
inline RotatorSystem caseI(double omega, double a, double kappa) {
    FourierSpec f(omega, {{1, a, 0.0}});
    FourierSpec g(0.0, {{1, 0.0, -kappa}});
    return {f, f, g, g.negated(), "caseI"};
}

/// Reciprocal case at the attraction/repulsion edge:
///   phi_i' = omega + a cos(phi_i) - kappa cos(phi_i - phi_j)
inline RotatorSystem caseII(double omega, double a, double kappa) {
    FourierSpec f(omega, {{1, a, 0.0}});
    FourierSpec g(0.0, {{1, -kappa, 0.0}});
    return {f, f, g, g, "caseII"};
}

struct SinusoidalParams {
    double omega1 = 1.0, omega2 = 1.0;
    double a1 = 0.0, a2 = 0.0;
    double kappa1 = 0.0, kappa2 = 0.0;
    double alpha = 0.0;
};

/// General first-harmonic system:
///   phi1' = omega1 + a1 cos(phi1) + kappa1 sin(phi2 - phi1 + alpha)
///   phi2' = omega2 + a2 cos(phi2) + kappa2 sin(phi1 - phi2 + alpha)
inline RotatorSystem sinusoidal(const SinusoidalParams& p) {
    // kappa sin(alpha - psi) = kappa sin(alpha) cos(psi) - kappa cos(alpha) sin(psi).
    // Coefficients that vanish up to trig roundoff are snapped to exact zeros so
    // that the coefficient-wise parity predicates remain decidable.
    auto snap = [](double v, double scale) { return std::fabs(v) < 1e-15 * scale ? 0.0 : v; };
    auto coupling = [&](double kappa) {
        double scale = std::fabs(kappa) + 1.0;
        return FourierSpec(0.0, {{1, snap(kappa * std::sin(p.alpha), scale),
                                  snap(-kappa * std::cos(p.alpha), scale)}});
    };
    FourierSpec f1(p.omega1, {{1, p.a1, 0.0}});
    FourierSpec f2(p.omega2, {{1, p.a2, 0.0}});
    return {f1, f2, coupling(p.kappa1), coupling(p.kappa2), "sinusoidal"};
}

/// Anti-reciprocal system with higher harmonics:
///   f(phi) = omega - cos(phi) - p cos(n phi)
///   g(phi) = kappa (sin(phi) + r sin(m phi)),  g2 = -g1
inline RotatorSystem higherHarmonic(double omega, double p, int n, double kappa, double r, int m) {
    std::vector<HarmonicTerm> ft{{1, -1.0, 0.0}};
    if (p != 0.0) {
        if (n == 1)
            ft[0].cosCoeff -= p;
        else
            ft.push_back({n, -p, 0.0});
    }
    std::vector<HarmonicTerm> gt{{1, 0.0, kappa}};
    if (r != 0.0) {
        if (m == 1)
            gt[0].sinCoeff += kappa * r;
        else
            gt.push_back({m, 0.0, kappa * r});
    }
    FourierSpec f(omega, std::move(ft));
    FourierSpec g(0.0, std::move(gt));
    return {f, f, g, g.negated(), "harmonic"};
}

} // namespace presets

struct PhaseDifferenceReduction {
    double delta = 0.0;     // omega1 - omega2
    double amplitude = 0.0; // A in psi' = delta - A cos(psi - sigma)
    double sigma = 0.0;

    double psidot(double psi) const { return delta - amplitude * std::cos(psi - sigma); }
};

/// Kuramoto-Sakaguchi reduction for a1 = a2 = 0. Derived from the direct
/// trigonometric expansion
///   psi' = delta + (k1 - k2) sin(alpha) cos(psi) - (k1 + k2) cos(alpha) sin(psi),
/// not from the printed radical (which carries sigma where alpha belongs).
inline PhaseDifferenceReduction reducePhaseDifference(const presets::SinusoidalParams& p) {
    if (p.a1 != 0.0 || p.a2 != 0.0)
        throw std::invalid_argument("reducePhaseDifference requires a1 = a2 = 0");
    const double b = (p.kappa1 - p.kappa2) * std::sin(p.alpha);
    const double c = (p.kappa1 + p.kappa2) * std::cos(p.alpha);
    PhaseDifferenceReduction r;
    r.delta = p.omega1 - p.omega2;
    r.amplitude = std::hypot(b, c);
    r.sigma = (r.amplitude > 0.0) ? std::atan2(c, -b) : 0.0;
    return r;
}

} // namespace rotator
