#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "rotator/equilibria.hpp"
#include "rotator/integrate.hpp"
#include "rotator/system.hpp"

using namespace rotator;

TEST_CASE("uniform rotation integrates exactly") {
    auto sys = presets::caseI(1.0, 0.0, 0.0);
    auto res = integrate(sys, LiftedPoint{0.0, 0.0}, kTwoPi);
    CHECK(res.stateEnd.x1 == Catch::Approx(kTwoPi).margin(1e-8));
    CHECK(res.stateEnd.x2 == Catch::Approx(kTwoPi).margin(1e-8));
    CHECK(res.trajectory.reason == Termination::timeLimit);

    // times strictly increasing, steps unambiguous
    for (std::size_t i = 1; i < res.trajectory.samples.size(); ++i) {
        const auto& a = res.trajectory.samples[i - 1];
        const auto& b = res.trajectory.samples[i];
        CHECK(b.t > a.t);
        CHECK(std::fabs(b.state.x1 - a.state.x1) < kPi);
        CHECK(std::fabs(b.state.x2 - a.state.x2) < kPi);
    }
}

TEST_CASE("phase difference is conserved for a = 0 anti-reciprocal coupling") {
    auto sys = presets::caseI(1.0, 0.0, 0.5);
    auto res = integrate(sys, LiftedPoint{0.3, 0.0}, 100.0, {.storeSamples = false});
    double psi = res.stateEnd.x1 - res.stateEnd.x2;
    CHECK(psi == Catch::Approx(0.3).margin(1e-9));
    // velocity omega - kappa sin(psi), from the equations (the printed
    // omega + kappa sin(psi) does not satisfy them)
    double expected = 1.0 - 0.5 * std::sin(0.3);
    CHECK(res.stateEnd.x1 / 100.0 == Catch::Approx(0.3 / 100.0 + expected).margin(1e-8));
}

TEST_CASE("Fix R crossings in the oscillatory conservative regime") {
    auto sys = presets::caseI(1.5, 1.0, 0.3);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    for (int trial = 0; trial < 3; ++trial) {
        LiftedPoint start{u(rng), u(rng)};
        auto res = integrate(sys, start, 200.0, {.storeSamples = false}, {SectionSpec::fixR()});
        CHECK(res.events.size() >= 2);
        for (const auto& ev : res.events)
            CHECK(std::fabs(SectionSpec::fixR().value(ev.state)) < 1e-10);
    }
}

TEST_CASE("closest return") {
    SECTION("conservative orbit closes") {
        auto sys = presets::caseI(1.5, 1.0, 0.3);
        auto cr = closestReturn(sys, TorusPoint{1.0, 2.0}, 0.0, 50.0);
        CHECK(cr.distance < 1e-6);
        CHECK(cr.returnTime > 0.1);
    }
    SECTION("sink start stays put") {
        auto sys = presets::caseI(0.5, 1.0, 0.2);
        auto cr = closestReturn(sys, TorusPoint{2.0 * kPi / 3.0, 2.0 * kPi / 3.0}, 0.0, 10.0);
        CHECK(cr.distance < 1e-9);
    }
    SECTION("dissipative orbit does not return") {
        auto sys = presets::caseI(0.5, 1.0, 0.2);
        // start chosen off the excitable funnel so the transit to the sink
        // at (2*pi/3, 2*pi/3) never re-approaches the initial point
        auto cr = closestReturn(sys, TorusPoint{2.8, 5.2}, 0.0, 80.0);
        CHECK(cr.distance > 0.1);
    }
}

TEST_CASE("poincare returns of the uniform rotation are spaced 2*pi") {
    auto sys = presets::caseI(1.0, 0.0, 0.0);
    auto section = SectionSpec::phase(0, kPi, +1);
    auto events = poincareReturn(sys, section, LiftedPoint{kPi, 0.0}, 3, 100.0);
    REQUIRE(events.size() == 3);
    double prev = 0.0;
    for (const auto& ev : events) {
        CHECK(ev.t - prev == Catch::Approx(kTwoPi).margin(1e-8));
        prev = ev.t;
    }
}

TEST_CASE("section never crossed exhausts the budget") {
    // libration pocket: tight loop around a Fix R center never reaches phi1 = pi + center
    auto sys = presets::caseI(1.5, 1.0, 2.5);
    auto eqs = findEquilibria(sys, 48);
    const Equilibrium* center = nullptr;
    for (const auto& e : eqs)
        if (e.cls == EqClass::center) { center = &e; break; }
    REQUIRE(center != nullptr);
    LiftedPoint near{center->position.phi1 + 0.02, center->position.phi2 + 0.02};
    auto opposite = SectionSpec::phase(0, center->position.phi1 + kPi, +1);
    CHECK_THROWS_AS(poincareReturn(sys, opposite, near, 1, 50.0), NoCrossing);
}

TEST_CASE("halving tolerances converges") {
    auto sys = presets::caseI(1.3, 1.0, 0.8);
    LiftedPoint start{0.4, 2.2};
    IntegrateOptions coarse{.relTol = 1e-8, .absTol = 1e-10, .storeSamples = false};
    IntegrateOptions fine{.relTol = 5e-9, .absTol = 5e-11, .storeSamples = false};
    auto a = integrate(sys, start, 30.0, coarse);
    auto b = integrate(sys, start, 30.0, fine);
    double diff = std::max(std::fabs(a.stateEnd.x1 - b.stateEnd.x1),
                           std::fabs(a.stateEnd.x2 - b.stateEnd.x2));
    CHECK(diff < 10.0 * 5e-9 * 30.0);
}

TEST_CASE("time-reversal flow conjugacy") {
    auto R = reversalR();
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    std::vector<RotatorSystem> systems{presets::caseI(0.9, 1.0, 0.6),
                                       presets::caseII(0.4, 1.0, 0.7)};
    for (const auto& sys : systems) {
        for (int i = 0; i < 10; ++i) {
            TorusPoint p{u(rng), u(rng)};
            double T = 5.0;
            IntegrateOptions opts{.storeSamples = false};
            auto fwd = integrate(sys, LiftedPoint(p), T, opts);
            TorusPoint mid = R.apply(fwd.stateEnd.torus());
            auto back = integrate(sys, LiftedPoint(mid), T, opts);
            CHECK(torusDist(back.stateEnd.torus(), R.apply(p)) < 1e-6);
        }
    }
}

TEST_CASE("sink capture terminates the integration") {
    auto sys = presets::caseI(0.5, 1.0, 0.2);
    TorusPoint sink{2.0 * kPi / 3.0, 2.0 * kPi / 3.0};
    IntegrateOptions opts{.storeSamples = false, .sinks = {sink}};
    auto res = integrate(sys, LiftedPoint{3.0, 1.0}, 500.0, opts);
    CHECK(res.trajectory.reason == Termination::sinkCapture);
    CHECK(torusDist(res.stateEnd.torus(), sink) < 1e-3);
}

TEST_CASE("invalid arguments are rejected") {
    auto sys = presets::caseI(1.0, 1.0, 0.5);
    CHECK_THROWS_AS(integrate(sys, LiftedPoint{0, 0}, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(integrate(sys, LiftedPoint{0, 0}, 1.0, {.relTol = 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(closestReturn(sys, TorusPoint{0, 0}, 0.0, -5.0), std::invalid_argument);
}
