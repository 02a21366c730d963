#pragma once

#include <cmath>
#include <numbers>

namespace rotator {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kPi = std::numbers::pi;

/// Wrap an angle into [0, 2*pi).
inline double wrap2pi(double x) {
    double y = std::fmod(x, kTwoPi);
    if (y < 0.0) y += kTwoPi;
    return y;
}

/// Wrap an angle into [-pi, pi].
inline double wrapPi(double x) {
    return x - kTwoPi * std::round(x / kTwoPi);
}

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double norm() const { return std::hypot(x, y); }
    double maxAbs() const { return std::max(std::fabs(x), std::fabs(y)); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

struct Mat2 {
    // row-major: [[a, b], [c, d]]
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    double trace() const { return a + d; }
    double det() const { return a * d - b * c; }
    Vec2 apply(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    Mat2 mul(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    double frobenius() const { return std::sqrt(a * a + b * b + c * c + d * d); }
    double maxAbs() const {
        return std::max(std::max(std::fabs(a), std::fabs(b)),
                        std::max(std::fabs(c), std::fabs(d)));
    }
};

/// A point on the 2-torus, canonicalized to [0, 2*pi)^2.
struct TorusPoint {
    double phi1 = 0.0;
    double phi2 = 0.0;

    TorusPoint() = default;
    TorusPoint(double p1, double p2) : phi1(wrap2pi(p1)), phi2(wrap2pi(p2)) {}
};

/// A point on the universal cover (real lifts of the two phases).
struct LiftedPoint {
    double x1 = 0.0;
    double x2 = 0.0;

    LiftedPoint() = default;
    LiftedPoint(double a, double b) : x1(a), x2(b) {}
    explicit LiftedPoint(const TorusPoint& p) : x1(p.phi1), x2(p.phi2) {}

    TorusPoint torus() const { return {x1, x2}; }
};

/// Distance on the torus: minimum over 2*pi-shifts of the Euclidean distance.
inline double torusDist(const TorusPoint& p, const TorusPoint& q) {
    return std::hypot(wrapPi(p.phi1 - q.phi1), wrapPi(p.phi2 - q.phi2));
}

inline double torusDist(const LiftedPoint& p, const LiftedPoint& q) {
    return std::hypot(wrapPi(p.x1 - q.x1), wrapPi(p.x2 - q.x2));
}

/// Distance of a single angle pair on the circle.
inline double circleDist(double a, double b) { return std::fabs(wrapPi(a - b)); }

} // namespace rotator
